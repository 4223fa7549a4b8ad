#pragma once

// Document formats, renderers and the sweep driver behind the CLI.
//
// InstanceDocument: {"n": int, "deficiencies": [[x,y,z], ...]}
// TilingDocument:   {"instance": {...}, "pieces": [{"id", "cells"}, ...],
//                    "metadata": {"solver_version", "strategy_trace"}}

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tromino/geometry.hpp"
#include "tromino/solver.hpp"
#include "tromino/verify.hpp"

namespace tromino::io {

using nlohmann::json;

inline constexpr const char* kSolverVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvalidInstance = 2;
inline constexpr int kExitVerification = 3;

class ParseError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

inline json cell_to_json(const Cell& c) { return json::array({c.x, c.y, c.z}); }

inline Cell cell_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number_integer() ||
        !j[1].is_number_integer() || !j[2].is_number_integer())
        throw ParseError(where + ": expected a [x,y,z] integer triple");
    return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

inline json instance_to_json(const Instance& inst) {
    json defs = json::array();
    for (const Cell& c : inst.deficiencies) defs.push_back(cell_to_json(c));
    return json{{"n", inst.n}, {"deficiencies", defs}};
}

inline Instance instance_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("instance: expected an object");
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw ParseError("instance.n: expected an integer");
    if (!j.contains("deficiencies") || !j["deficiencies"].is_array())
        throw ParseError("instance.deficiencies: expected an array");
    std::vector<Cell> defs;
    for (std::size_t i = 0; i < j["deficiencies"].size(); ++i)
        defs.push_back(cell_from_json(j["deficiencies"][i],
                                      "instance.deficiencies[" + std::to_string(i) + "]"));
    return make_instance(j["n"].get<int>(), std::move(defs));
}

inline json tiling_to_json(const Tiling& t, const std::vector<std::string>& trace) {
    json pieces = json::array();
    for (std::size_t i = 0; i < t.placements.size(); ++i) {
        json cells = json::array();
        for (const Cell& c : sorted_cells(t.placements[i])) cells.push_back(cell_to_json(c));
        pieces.push_back(json{{"id", i + 1}, {"cells", cells}});
    }
    return json{{"instance", instance_to_json(t.instance)},
                {"pieces", pieces},
                {"metadata", json{{"solver_version", kSolverVersion}, {"strategy_trace", trace}}}};
}

struct ParsedTiling {
    Tiling tiling;
    std::vector<std::string> trace;
};

inline ParsedTiling tiling_from_json(const json& j) {
    if (!j.is_object() || !j.contains("instance") || !j.contains("pieces"))
        throw ParseError("tiling: expected an object with instance and pieces");
    ParsedTiling out;
    out.tiling.instance = instance_from_json(j["instance"]);
    if (!j["pieces"].is_array()) throw ParseError("pieces: expected an array");
    for (std::size_t i = 0; i < j["pieces"].size(); ++i) {
        const json& piece = j["pieces"][i];
        const std::string where = "pieces[" + std::to_string(i) + "]";
        if (!piece.is_object() || !piece.contains("id") || !piece.contains("cells"))
            throw ParseError(where + ": expected {id, cells}");
        if (!piece["id"].is_number_integer() ||
            piece["id"].get<long long>() != static_cast<long long>(i) + 1)
            throw ParseError(where + ".id: ids must run 1..k in order");
        if (!piece["cells"].is_array() || piece["cells"].size() != 3)
            throw ParseError(where + ".cells: expected three cells");
        std::array<Cell, 3> cs;
        for (int k = 0; k < 3; ++k)
            cs[static_cast<std::size_t>(k)] =
                cell_from_json(piece["cells"][static_cast<std::size_t>(k)],
                               where + ".cells[" + std::to_string(k) + "]");
        auto p = placement_from_cells(cs);
        // Malformed pieces stay representable so the verifier can report them.
        out.tiling.placements.push_back(p ? *p
                                          : TrominoPlacement{cs[0], cs[1] - cs[0], cs[2] - cs[0]});
    }
    if (j.contains("metadata") && j["metadata"].is_object() &&
        j["metadata"].contains("strategy_trace") && j["metadata"]["strategy_trace"].is_array())
        for (const json& line : j["metadata"]["strategy_trace"])
            if (line.is_string()) out.trace.push_back(line.get<std::string>());
    return out;
}

inline json report_to_json(const VerificationReport& report) {
    json violations = json::array();
    for (const Violation& v : report.violations) {
        json cells = json::array();
        for (const Cell& c : v.cells) cells.push_back(cell_to_json(c));
        violations.push_back(json{{"kind", to_string(v.kind)}, {"cells", cells}});
    }
    return json{{"valid", report.valid}, {"violations", violations}};
}

// One grid per z layer from 0 upward. Rows run from y = 0 so the front row
// (y = n-1) prints last; columns are x left to right. Cells show the 1-based
// piece id; deficiencies show a dot.
inline std::string render_layers(const Tiling& t) {
    const int n = t.instance.n;
    std::vector<long long> owner(static_cast<std::size_t>(n) * n * n, 0);
    auto idx = [n](const Cell& c) {
        return (static_cast<std::size_t>(c.x) * n + c.y) * n + c.z;
    };
    for (std::size_t i = 0; i < t.placements.size(); ++i)
        for (const Cell& c : t.placements[i].cells()) owner[idx(c)] = static_cast<long long>(i) + 1;
    int width = 1;
    for (auto k = static_cast<long long>(t.placements.size()); k >= 10; k /= 10) ++width;
    std::ostringstream os;
    for (int z = 0; z < n; ++z) {
        os << "z=" << z << "\n";
        for (int y = 0; y < n; ++y) {
            for (int x = 0; x < n; ++x) {
                if (x) os << ' ';
                Cell c{x, y, z};
                if (t.instance.is_deficiency(c)) {
                    os << std::string(static_cast<std::size_t>(width - 1), ' ') << "·";
                } else {
                    std::string s = std::to_string(owner[idx(c)]);
                    os << std::string(static_cast<std::size_t>(width) - s.size(), ' ') << s;
                }
            }
            os << "\n";
        }
        if (z + 1 < n) os << "\n";
    }
    return os.str();
}

// ASCII PLY mesh: one unit cube per covered cell, vertex-colored by piece id
// through a fixed palette; deficiencies render as dark cubes.
inline std::string render_voxel_ply(const Tiling& t) {
    static constexpr std::array<std::array<int, 3>, 12> kPalette = {{
        {230, 25, 75},   {60, 180, 75},   {255, 225, 25}, {0, 130, 200},
        {245, 130, 48},  {145, 30, 180},  {70, 240, 240}, {240, 50, 230},
        {210, 245, 60},  {250, 190, 190}, {0, 128, 128},  {170, 110, 40},
    }};
    struct Voxel {
        Cell cell;
        std::array<int, 3> rgb;
    };
    std::vector<Voxel> voxels;
    for (std::size_t i = 0; i < t.placements.size(); ++i)
        for (const Cell& c : t.placements[i].cells())
            voxels.push_back({c, kPalette[i % kPalette.size()]});
    for (const Cell& c : t.instance.deficiencies) voxels.push_back({c, {40, 40, 40}});

    static constexpr int kCorners[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                           {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    static constexpr int kFaces[6][4] = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                         {2, 3, 7, 6}, {1, 2, 6, 5}, {3, 0, 4, 7}};
    std::ostringstream os;
    os << "ply\nformat ascii 1.0\ncomment trominocube voxel export\n";
    os << "element vertex " << voxels.size() * 8 << "\n";
    os << "property float x\nproperty float y\nproperty float z\n";
    os << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    os << "element face " << voxels.size() * 6 << "\n";
    os << "property list uchar int vertex_indices\nend_header\n";
    for (const Voxel& v : voxels)
        for (const auto& k : kCorners)
            os << v.cell.x + k[0] << " " << v.cell.y + k[1] << " " << v.cell.z + k[2] << " "
               << v.rgb[0] << " " << v.rgb[1] << " " << v.rgb[2] << "\n";
    for (std::size_t i = 0; i < voxels.size(); ++i)
        for (const auto& f : kFaces)
            os << "4 " << i * 8 + f[0] << " " << i * 8 + f[1] << " " << i * 8 + f[2] << " "
               << i * 8 + f[3] << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepOutcome {
    int n = 0;
    std::string mode;
    int attempted = 0;
    int solved = 0;
    std::vector<std::string> failures;
    double mean_ms = 0;
    double max_ms = 0;
    std::map<std::string, int> trace_counts;
};

inline std::string trace_label(const std::vector<std::string>& trace) {
    if (trace.empty()) return "?";
    const std::string& line = trace.front();
    auto pos = line.find(' ');
    return pos == std::string::npos ? line : line.substr(pos + 1);
}

// Solves every listed instance, verifying each result.
inline SweepOutcome sweep_instances(Solver& solver, const std::vector<Instance>& instances) {
    SweepOutcome out;
    out.attempted = static_cast<int>(instances.size());
    double total = 0;
    for (const Instance& inst : instances) {
        auto start = std::chrono::steady_clock::now();
        try {
            Solver::Result r = solver.solve_traced(inst);
            if (!verify_tiling(inst, r.tiling).valid)
                throw SolverDefect("sweep produced an invalid tiling");
            ++out.solved;
            ++out.trace_counts[trace_label(r.trace)];
        } catch (const std::exception& e) {
            out.failures.push_back(instance_key(inst) + ": " + e.what());
        }
        double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              start)
                        .count();
        total += ms;
        out.max_ms = std::max(out.max_ms, ms);
    }
    if (out.attempted > 0) out.mean_ms = total / out.attempted;
    return out;
}

inline std::vector<Cell> all_cells(int n) {
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(n) * n * n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z) cells.push_back({x, y, z});
    return cells;
}

inline std::vector<Instance> enumerate_all_instances(int n) {
    const int d = required_deficiency_count(n);
    std::vector<Instance> out;
    if (d == 0) {
        out.push_back(make_instance(n, {}));
        return out;
    }
    auto cells = all_cells(n);
    if (d == 1) {
        for (const Cell& c : cells) out.push_back(make_instance(n, {c}));
        return out;
    }
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i + 1; j < cells.size(); ++j)
            out.push_back(make_instance(n, {cells[i], cells[j]}));
    return out;
}

inline std::vector<Instance> enumerate_canonical_instances(int n) {
    std::vector<Instance> out;
    std::unordered_map<std::string, bool> seen;
    for (Instance& inst : enumerate_all_instances(n)) {
        auto canon = canonicalize(inst).first;
        if (seen.emplace(instance_key(canon), true).second) out.push_back(std::move(canon));
    }
    return out;
}

inline std::vector<Instance> random_instances(int n, int count, std::uint64_t seed) {
    const int d = required_deficiency_count(n);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coord(0, n - 1);
    auto draw = [&] { return Cell{coord(rng), coord(rng), coord(rng)}; };
    std::vector<Instance> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        if (d == 0) {
            out.push_back(make_instance(n, {}));
            continue;
        }
        Cell a = draw();
        if (d == 1) {
            out.push_back(make_instance(n, {a}));
            continue;
        }
        Cell b = draw();
        while (b == a) b = draw();
        out.push_back(make_instance(n, {a, b}));
    }
    return out;
}

inline json sweep_to_json(const SweepOutcome& s) {
    json counts = json::object();
    for (const auto& [label, count] : s.trace_counts) counts[label] = count;
    return json{{"n", s.n},           {"mode", s.mode},       {"attempted", s.attempted},
                {"solved", s.solved}, {"mean_ms", s.mean_ms}, {"max_ms", s.max_ms},
                {"trace_counts", counts}, {"failures", s.failures}};
}

// ---------------------------------------------------------------------------
// Command implementations (thin argv wrappers live in the CLI tool)

struct CacheArgs {
    std::string directory;  // empty: no persistence
};

inline void configure_cache(Solver& solver, const CacheArgs& cache) {
    if (!cache.directory.empty()) solver.gadget_cache().set_directory(cache.directory);
}

struct SolveArgs {
    std::optional<int> n;
    std::vector<Cell> deficiencies;
    std::string input;   // instance document path, "-" for stdin, empty for flags
    std::string format = "json";
    std::string output;  // path, empty for stdout
    CacheArgs cache;
};

inline int run_solve(const SolveArgs& args, std::istream& in, std::ostream& out,
                     std::ostream& err) {
    Instance inst;
    try {
        if (!args.input.empty()) {
            json doc;
            if (args.input == "-") {
                doc = json::parse(in);
            } else {
                std::ifstream f(args.input);
                if (!f) {
                    err << "cannot open " << args.input << "\n";
                    return kExitUsage;
                }
                doc = json::parse(f);
            }
            inst = instance_from_json(doc);
        } else if (args.n) {
            inst = make_instance(*args.n, args.deficiencies);
        } else {
            err << "either --input or --n is required\n";
            return kExitUsage;
        }
    } catch (const json::parse_error& e) {
        err << "instance parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "instance parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidInstance& e) {
        err << "invalid instance: " << e.what() << "\n";
        return kExitInvalidInstance;
    }

    Solver solver;
    configure_cache(solver, args.cache);
    Solver::Result result;
    try {
        result = solver.solve_traced(inst);
    } catch (const SolverDefect& e) {
        err << "internal defect: " << e.what() << "\n";
        return kExitVerification;
    }
    if (!verify_tiling(inst, result.tiling).valid) {
        err << "internal defect: emitted tiling failed verification\n";
        return kExitVerification;
    }

    std::string payload;
    if (args.format == "json") {
        payload = tiling_to_json(result.tiling, result.trace).dump(2) + "\n";
    } else if (args.format == "layers") {
        payload = render_layers(result.tiling);
    } else if (args.format == "voxel") {
        payload = render_voxel_ply(result.tiling);
    } else {
        err << "unknown format " << args.format << "\n";
        return kExitUsage;
    }
    if (args.output.empty()) {
        out << payload;
    } else {
        std::ofstream f(args.output, std::ios::trunc);
        if (!f) {
            err << "cannot write " << args.output << "\n";
            return kExitUsage;
        }
        f << payload;
    }
    return kExitOk;
}

struct VerifyArgs {
    std::string input = "-";
};

inline int run_verify(const VerifyArgs& args, std::istream& in, std::ostream& out,
                      std::ostream& err) {
    ParsedTiling parsed;
    try {
        json doc;
        if (args.input == "-") {
            doc = json::parse(in);
        } else {
            std::ifstream f(args.input);
            if (!f) {
                err << "cannot open " << args.input << "\n";
                return kExitUsage;
            }
            doc = json::parse(f);
        }
        parsed = tiling_from_json(doc);
    } catch (const json::parse_error& e) {
        err << "tiling parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "tiling parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidInstance& e) {
        err << "invalid instance: " << e.what() << "\n";
        return kExitInvalidInstance;
    }
    VerificationReport report = verify_tiling(parsed.tiling.instance, parsed.tiling);
    out << report_to_json(report).dump(2) << "\n";
    return report.valid ? kExitOk : kExitVerification;
}

struct SweepArgs {
    int n = 0;
    std::string mode = "all";  // all | classes | random
    int count = 0;
    std::uint64_t seed = 1;
    CacheArgs cache;
};

inline int run_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
    if (args.n < 1) {
        err << "--n must be >= 1\n";
        return kExitUsage;
    }
    std::vector<Instance> instances;
    try {
        if (args.mode == "all")
            instances = enumerate_all_instances(args.n);
        else if (args.mode == "classes")
            instances = enumerate_canonical_instances(args.n);
        else if (args.mode == "random")
            instances = random_instances(args.n, args.count, args.seed);
        else {
            err << "unknown sweep mode " << args.mode << "\n";
            return kExitUsage;
        }
    } catch (const InvalidInstance& e) {
        err << "invalid instance: " << e.what() << "\n";
        return kExitInvalidInstance;
    }
    Solver solver;
    configure_cache(solver, args.cache);
    SweepOutcome outcome = sweep_instances(solver, instances);
    outcome.n = args.n;
    outcome.mode = args.mode;
    out << sweep_to_json(outcome).dump(2) << "\n";
    if (!outcome.failures.empty()) {
        err << outcome.failures.size() << " placements failed\n";
        return kExitVerification;
    }
    return kExitOk;
}

struct Classify2dArgs {
    int m = 0;
};

inline int run_classify2d(const Classify2dArgs& args, std::ostream& out, std::ostream& err) {
    if (args.m < 1 || args.m > 7) {
        err << "--m must be between 1 and 7\n";
        return kExitUsage;
    }
    auto cells = classify_deficient_square(args.m);
    json cell_list = json::array();
    json ids = json::array();
    for (const Cell& c : cells) {
        cell_list.push_back(json::array({c.x, c.y}));
        ids.push_back(row_major_id(c, args.m));
    }
    out << json{{"m", args.m}, {"cells", cell_list}, {"ids", ids}}.dump(2) << "\n";
    return kExitOk;
}

}  // namespace tromino::io
