#pragma once

// Exhaustive backtracking tiler for small regions, including regions with
// designated protrusion cells outside the region proper. Branches on the
// first uncovered cell in a fixed order, so identical problems always give
// identical answers. Solved problems are memoized under a translated,
// symmetry-reduced key and can be persisted to disk.

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tromino/geometry.hpp"
#include "tromino/verify.hpp"

namespace tromino {

class MalformedProblem : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

struct GadgetProblem {
    std::vector<Cell> region;            // cells that must be covered exactly
    std::vector<Cell> forbidden;         // holes inside the bounding box, never covered
    std::vector<Cell> protrusion_sites;  // cells outside the region a tromino may occupy
    int protrusion_budget = 0;           // exact number of protrusion cells to use
};

struct GadgetSolution {
    std::vector<TrominoPlacement> placements;
    std::vector<Cell> used_protrusions;
};

inline void validate_problem(const GadgetProblem& prob) {
    auto sorted = [](std::vector<Cell> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    std::vector<Cell> r = sorted(prob.region), f = sorted(prob.forbidden), s = sorted(prob.protrusion_sites);
    if (std::adjacent_find(r.begin(), r.end()) != r.end())
        throw MalformedProblem("duplicate region cells");
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
        throw MalformedProblem("duplicate protrusion sites");
    std::vector<Cell> inter;
    std::set_intersection(r.begin(), r.end(), f.begin(), f.end(), std::back_inserter(inter));
    std::set_intersection(r.begin(), r.end(), s.begin(), s.end(), std::back_inserter(inter));
    std::set_intersection(f.begin(), f.end(), s.begin(), s.end(), std::back_inserter(inter));
    if (!inter.empty())
        throw MalformedProblem("region, forbidden and protrusion sites must be pairwise disjoint");
    if (prob.protrusion_budget < 0 ||
        prob.protrusion_budget > static_cast<int>(prob.protrusion_sites.size()))
        throw MalformedProblem("protrusion budget outside the available sites");
    if ((prob.region.size() + static_cast<std::size_t>(prob.protrusion_budget)) % 3 != 0)
        throw MalformedProblem("region size plus protrusion budget must be divisible by 3");
}

namespace gadget_detail {

// The 12 tromino orientations, each translated so its least cell sits at the
// origin. offs are sorted; corner indexes the corner cell within offs.
struct OrientedShape {
    std::array<Cell, 3> offs;
    int corner;
};

inline const std::array<OrientedShape, 12>& oriented_shapes() {
    static const std::array<OrientedShape, 12> shapes = [] {
        std::vector<OrientedShape> all;
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
                for (int sa : {1, -1})
                    for (int sb : {1, -1}) {
                        TrominoPlacement p = make_tromino({0, 0, 0}, unit(a, sa), unit(b, sb));
                        auto cs = sorted_cells(p);
                        OrientedShape s;
                        for (int i = 0; i < 3; ++i) s.offs[static_cast<std::size_t>(i)] = cs[static_cast<std::size_t>(i)] - cs[0];
                        Cell corner_off = p.corner - cs[0];
                        s.corner = static_cast<int>(std::find(s.offs.begin(), s.offs.end(), corner_off) -
                                                    s.offs.begin());
                        all.push_back(s);
                    }
        std::sort(all.begin(), all.end(),
                  [](const OrientedShape& l, const OrientedShape& r) { return l.offs < r.offs; });
        std::array<OrientedShape, 12> out{};
        std::copy(all.begin(), all.end(), out.begin());
        return out;
    }();
    return shapes;
}

struct Searcher {
    std::vector<Cell> order;  // branch priority
    std::unordered_map<Cell, int, CellHash> region_idx;
    std::unordered_map<Cell, int, CellHash> site_idx;
    std::vector<char> covered;
    std::vector<char> site_used;
    int budget_left = 0;
    int uncovered = 0;
    std::vector<TrominoPlacement> chosen;
    std::vector<Cell> used_sites;
    std::vector<GadgetSolution> solutions;
    std::size_t limit = 1;

    void init(const GadgetProblem& prob) {
        order = prob.region;
        std::sort(order.begin(), order.end());
        for (std::size_t i = 0; i < order.size(); ++i)
            region_idx.emplace(order[i], static_cast<int>(i));
        std::vector<Cell> sites = prob.protrusion_sites;
        std::sort(sites.begin(), sites.end());
        for (std::size_t i = 0; i < sites.size(); ++i)
            site_idx.emplace(sites[i], static_cast<int>(i));
        covered.assign(order.size(), 0);
        site_used.assign(sites.size(), 0);
        budget_left = prob.protrusion_budget;
        uncovered = static_cast<int>(order.size());
    }

    // True when some feasible placement still covers u.
    bool coverable(const Cell& u) const {
        for (const OrientedShape& shape : oriented_shapes()) {
            for (int role = 0; role < 3; ++role) {
                Cell base = u - shape.offs[static_cast<std::size_t>(role)];
                bool ok = true;
                int protrusions = 0;
                for (int i = 0; i < 3 && ok; ++i) {
                    Cell c = base + shape.offs[static_cast<std::size_t>(i)];
                    auto it = region_idx.find(c);
                    if (it != region_idx.end()) {
                        ok = !covered[static_cast<std::size_t>(it->second)];
                        continue;
                    }
                    auto st = site_idx.find(c);
                    ok = st != site_idx.end() && !site_used[static_cast<std::size_t>(st->second)] &&
                         ++protrusions <= budget_left;
                }
                if (ok) return true;
            }
        }
        return false;
    }

    // After placing `placed`, only cells in its 1-neighborhood can lose their
    // last covering placement; when the budget just ran out, any cell that
    // depended on a protrusion can, so rescan everything.
    bool creates_dead_cell(const std::array<Cell, 3>& placed, bool budget_exhausted_now) const {
        if (budget_exhausted_now && !site_idx.empty()) {
            for (std::size_t i = 0; i < order.size(); ++i)
                if (!covered[i] && !coverable(order[i])) return true;
            return false;
        }
        for (const Cell& w : placed)
            for (int dx = -1; dx <= 1; ++dx)
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dz = -1; dz <= 1; ++dz) {
                        Cell u = w + Cell{dx, dy, dz};
                        auto it = region_idx.find(u);
                        if (it == region_idx.end() || covered[static_cast<std::size_t>(it->second)])
                            continue;
                        if (!coverable(u)) return true;
                    }
        return false;
    }

    bool dead_end() const {
        // Each remaining tromino keeps at least one cell in the region.
        if (budget_left > 2 * uncovered) return true;
        // Uncovered components must be divisible by 3 unless a protruding
        // tromino can still reach them through an unused site.
        std::vector<char> seen(order.size(), 0);
        std::vector<int> stack;
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (covered[i] || seen[i]) continue;
            int size = 0;
            bool site_reachable = false;
            stack.push_back(static_cast<int>(i));
            seen[i] = 1;
            while (!stack.empty()) {
                int j = stack.back();
                stack.pop_back();
                ++size;
                const Cell& c = order[static_cast<std::size_t>(j)];
                for (int axis = 0; axis < 3; ++axis)
                    for (int sign : {-1, 1}) {
                        Cell nb = c + unit(axis, sign);
                        auto it = region_idx.find(nb);
                        if (it != region_idx.end()) {
                            int k = it->second;
                            if (!covered[static_cast<std::size_t>(k)] && !seen[static_cast<std::size_t>(k)]) {
                                seen[static_cast<std::size_t>(k)] = 1;
                                stack.push_back(k);
                            }
                            continue;
                        }
                        if (budget_left > 0 && !site_reachable) {
                            auto st = site_idx.find(nb);
                            if (st != site_idx.end() && !site_used[static_cast<std::size_t>(st->second)])
                                site_reachable = true;
                        }
                    }
            }
            if (size % 3 != 0 && !site_reachable) return true;
        }
        return false;
    }

    bool run() {  // returns true when the solution limit is reached
        if (uncovered == 0) {
            if (budget_left != 0) return false;
            GadgetSolution sol;
            sol.placements = chosen;
            std::sort(sol.placements.begin(), sol.placements.end());
            sol.used_protrusions = used_sites;
            std::sort(sol.used_protrusions.begin(), sol.used_protrusions.end());
            solutions.push_back(std::move(sol));
            return solutions.size() >= limit;
        }
        if (dead_end()) return false;
        int target = -1;
        for (std::size_t i = 0; i < order.size(); ++i)
            if (!covered[i]) {
                target = static_cast<int>(i);
                break;
            }
        const Cell& c = order[static_cast<std::size_t>(target)];
        for (const OrientedShape& shape : oriented_shapes()) {
            for (int role = 0; role < 3; ++role) {
                Cell base = c - shape.offs[static_cast<std::size_t>(role)];
                std::array<Cell, 3> placed;
                std::array<int, 3> reg{-1, -1, -1};
                std::array<int, 3> site{-1, -1, -1};
                int protrusions = 0;
                bool ok = true;
                for (int i = 0; i < 3 && ok; ++i) {
                    placed[static_cast<std::size_t>(i)] = base + shape.offs[static_cast<std::size_t>(i)];
                    auto it = region_idx.find(placed[static_cast<std::size_t>(i)]);
                    if (it != region_idx.end()) {
                        ok = !covered[static_cast<std::size_t>(it->second)];
                        reg[static_cast<std::size_t>(i)] = it->second;
                        continue;
                    }
                    auto st = site_idx.find(placed[static_cast<std::size_t>(i)]);
                    if (st != site_idx.end() && !site_used[static_cast<std::size_t>(st->second)] &&
                        protrusions < budget_left) {
                        ++protrusions;
                        site[static_cast<std::size_t>(i)] = st->second;
                        continue;
                    }
                    ok = false;
                }
                if (!ok) continue;

                for (int i = 0; i < 3; ++i) {
                    if (reg[static_cast<std::size_t>(i)] >= 0) {
                        covered[static_cast<std::size_t>(reg[static_cast<std::size_t>(i)])] = 1;
                        --uncovered;
                    } else {
                        site_used[static_cast<std::size_t>(site[static_cast<std::size_t>(i)])] = 1;
                        --budget_left;
                        used_sites.push_back(placed[static_cast<std::size_t>(i)]);
                    }
                }
                chosen.push_back(*placement_from_cells({placed[0], placed[1], placed[2]}));

                const bool exhausted_now = protrusions > 0 && budget_left == 0;
                if (!creates_dead_cell(placed, exhausted_now) && run()) return true;

                chosen.pop_back();
                for (int i = 0; i < 3; ++i) {
                    if (reg[static_cast<std::size_t>(i)] >= 0) {
                        covered[static_cast<std::size_t>(reg[static_cast<std::size_t>(i)])] = 0;
                        ++uncovered;
                    } else {
                        site_used[static_cast<std::size_t>(site[static_cast<std::size_t>(i)])] = 0;
                        ++budget_left;
                        used_sites.pop_back();
                    }
                }
            }
        }
        return false;
    }
};

inline std::string encode_cells(const std::vector<Cell>& cells) {
    std::string s;
    for (const Cell& c : cells) s += to_string(c);
    return s;
}

struct CanonicalForm {
    std::string key;
    GadgetProblem problem;  // the canonical representative (default order)
    Isometry to_canonical;  // maps original cells to canonical cells
};

// Least encoding of the problem over the 48 symmetries composed with the
// translation bringing the bounding corner to the origin. The encoding puts
// the forbidden cells first: the representative then keeps holes nearest the
// origin, where lexicographic branching meets them early and prunes hard.
inline CanonicalForm canonical_form(const GadgetProblem& prob) {
    CanonicalForm best;
    bool first = true;
    for (int k = 0; k < 48; ++k) {
        Isometry lin = Isometry::cube_symmetry(k, 1);  // shift-free signed permutation
        lin.shift = {0, 0, 0};
        auto map_all = [&lin](const std::vector<Cell>& v) {
            std::vector<Cell> out;
            out.reserve(v.size());
            for (const Cell& c : v) out.push_back(lin.map(c));
            return out;
        };
        std::vector<Cell> r = map_all(prob.region), f = map_all(prob.forbidden),
                          s = map_all(prob.protrusion_sites);
        Cell lo{0, 0, 0};
        bool any = false;
        for (const auto* v : {&r, &f, &s})
            for (const Cell& c : *v) {
                if (!any) {
                    lo = c;
                    any = true;
                } else {
                    lo = {std::min(lo.x, c.x), std::min(lo.y, c.y), std::min(lo.z, c.z)};
                }
            }
        for (auto* v : {&r, &f, &s}) {
            for (Cell& c : *v) c = c - lo;
            std::sort(v->begin(), v->end());
        }
        std::string key = "F" + encode_cells(f) + "|R" + encode_cells(r) + "|P" + encode_cells(s) +
                          "|B" + std::to_string(prob.protrusion_budget);
        if (first || key < best.key) {
            first = false;
            best.key = std::move(key);
            best.problem = GadgetProblem{std::move(r), std::move(f), std::move(s),
                                         prob.protrusion_budget};
            Isometry iso = lin;
            iso.shift = Cell{0, 0, 0} - lo;
            best.to_canonical = iso;
        }
    }
    return best;
}

}  // namespace gadget_detail

// Memoized witnesses keyed by the canonical problem encoding. Entries record
// unsolvable problems too. Optionally persisted one file per problem, named
// by the key hash; corrupted or mismatching files are ignored.
class GadgetCache {
   public:
    struct Stats {
        std::size_t hits = 0;
        std::size_t misses = 0;
        std::size_t disk_hits = 0;
    };

    void set_directory(std::filesystem::path dir) {
        std::lock_guard<std::mutex> lock(mu_);
        dir_ = std::move(dir);
        std::filesystem::create_directories(*dir_);
    }
    void disable_persistence() {
        std::lock_guard<std::mutex> lock(mu_);
        dir_.reset();
    }

    std::optional<std::optional<GadgetSolution>> lookup(const std::string& key,
                                                        const GadgetProblem& canonical) {
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = entries_.find(key);
            if (it != entries_.end()) {
                ++stats_.hits;
                return it->second;
            }
        }
        auto from_disk = load_file(key, canonical);
        if (from_disk) {
            std::lock_guard<std::mutex> lock(mu_);
            ++stats_.hits;
            ++stats_.disk_hits;
            entries_.emplace(key, *from_disk);
            return *from_disk;
        }
        std::lock_guard<std::mutex> lock(mu_);
        ++stats_.misses;
        return std::nullopt;
    }

    void store(const std::string& key, const std::optional<GadgetSolution>& value) {
        {
            std::lock_guard<std::mutex> lock(mu_);
            entries_.emplace(key, value);  // idempotent: first insert wins
        }
        write_file(key, value);
    }

    Stats stats() const {
        std::lock_guard<std::mutex> lock(mu_);
        return stats_;
    }
    void clear() {
        std::lock_guard<std::mutex> lock(mu_);
        entries_.clear();
        stats_ = {};
    }

   private:
    static std::string serialize_payload(const std::string& key,
                                         const std::optional<GadgetSolution>& value) {
        std::string body = "key " + key + "\n";
        body += std::string("solvable ") + (value ? "1" : "0") + "\n";
        if (value) {
            body += "pieces";
            for (const TrominoPlacement& p : value->placements)
                for (const Cell& c : p.cells()) body += " " + to_string(c);
            body += "\nprotrusions";
            for (const Cell& c : value->used_protrusions) body += " " + to_string(c);
            body += "\n";
        }
        return body;
    }

    std::filesystem::path file_for(const std::string& key) const {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(fnv1a64(key)));
        return *dir_ / (std::string(buf) + ".witness");
    }

    void write_file(const std::string& key, const std::optional<GadgetSolution>& value) const {
        std::optional<std::filesystem::path> dir;
        {
            std::lock_guard<std::mutex> lock(mu_);
            dir = dir_;
        }
        if (!dir) return;
        std::string body = serialize_payload(key, value);
        char sum[32];
        std::snprintf(sum, sizeof sum, "%016llx", static_cast<unsigned long long>(fnv1a64(body)));
        std::ofstream out(file_for(key), std::ios::trunc);
        if (!out) return;
        out << body << "checksum " << sum << "\n";
    }

    static std::optional<Cell> parse_cell(const std::string& tok) {
        Cell c;
        if (std::sscanf(tok.c_str(), "(%d,%d,%d)", &c.x, &c.y, &c.z) != 3) return std::nullopt;
        return c;
    }

    std::optional<std::optional<GadgetSolution>> load_file(const std::string& key,
                                                           const GadgetProblem& canonical) const {
        std::optional<std::filesystem::path> dir;
        {
            std::lock_guard<std::mutex> lock(mu_);
            dir = dir_;
        }
        if (!dir) return std::nullopt;
        std::ifstream in(file_for(key));
        if (!in) return std::nullopt;
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        auto pos = content.rfind("checksum ");
        if (pos == std::string::npos) return std::nullopt;
        std::string body = content.substr(0, pos);
        std::string sum_line = content.substr(pos);
        char sum[32];
        std::snprintf(sum, sizeof sum, "%016llx", static_cast<unsigned long long>(fnv1a64(body)));
        if (sum_line != std::string("checksum ") + sum + "\n") return std::nullopt;

        std::istringstream is(body);
        std::string word;
        if (!(is >> word) || word != "key") return std::nullopt;
        std::string stored_key;
        if (!(is >> stored_key) || stored_key != key) return std::nullopt;
        if (!(is >> word) || word != "solvable") return std::nullopt;
        int solvable = 0;
        if (!(is >> solvable)) return std::nullopt;
        if (!solvable) return std::optional<std::optional<GadgetSolution>>(std::nullopt);

        if (!(is >> word) || word != "pieces") return std::nullopt;
        GadgetSolution sol;
        std::vector<Cell> cells;
        while (is >> word && word != "protrusions") {
            auto c = parse_cell(word);
            if (!c) return std::nullopt;
            cells.push_back(*c);
        }
        if (word != "protrusions" || cells.size() % 3 != 0) return std::nullopt;
        for (std::size_t i = 0; i < cells.size(); i += 3) {
            auto p = placement_from_cells({cells[i], cells[i + 1], cells[i + 2]});
            if (!p) return std::nullopt;
            sol.placements.push_back(*p);
        }
        while (is >> word) {
            auto c = parse_cell(word);
            if (!c) return std::nullopt;
            sol.used_protrusions.push_back(*c);
        }
        // Never trust a stored witness without re-checking it.
        if (static_cast<int>(sol.used_protrusions.size()) != canonical.protrusion_budget)
            return std::nullopt;
        std::vector<Cell> target = canonical.region;
        target.insert(target.end(), sol.used_protrusions.begin(), sol.used_protrusions.end());
        if (!verify_exact_cover(target, sol.placements).valid) return std::nullopt;
        return std::optional<std::optional<GadgetSolution>>(std::move(sol));
    }

    mutable std::mutex mu_;
    std::unordered_map<std::string, std::optional<GadgetSolution>> entries_;
    std::optional<std::filesystem::path> dir_;
    Stats stats_;
};

namespace gadget_detail {

inline std::optional<GadgetSolution> search(const GadgetProblem& prob, std::size_t limit,
                                            std::vector<GadgetSolution>* all) {
    Searcher s;
    s.init(prob);
    s.limit = all ? limit : 1;
    s.run();
    if (all) {
        *all = std::move(s.solutions);
        return all->empty() ? std::nullopt : std::optional<GadgetSolution>(all->front());
    }
    if (s.solutions.empty()) return std::nullopt;
    return std::move(s.solutions.front());
}

inline GadgetSolution transport(const GadgetSolution& sol, const Isometry& iso) {
    GadgetSolution out;
    out.placements.reserve(sol.placements.size());
    for (const TrominoPlacement& p : sol.placements) out.placements.push_back(apply(iso, p));
    std::sort(out.placements.begin(), out.placements.end());
    out.used_protrusions.reserve(sol.used_protrusions.size());
    for (const Cell& c : sol.used_protrusions) out.used_protrusions.push_back(iso.map(c));
    std::sort(out.used_protrusions.begin(), out.used_protrusions.end());
    return out;
}

}  // namespace gadget_detail

// First solution of the canonical form of the problem, transported back, or
// nothing when no solution exists. Solving through the canonical frame keeps
// the answer identical whether it was searched fresh, remembered, or loaded
// from disk. Malformed problems throw instead.
inline std::optional<GadgetSolution> solve_gadget(const GadgetProblem& prob,
                                                  GadgetCache* cache = nullptr) {
    validate_problem(prob);
    auto cf = gadget_detail::canonical_form(prob);
    std::optional<GadgetSolution> canonical_sol;
    bool found = false;
    if (cache != nullptr) {
        auto cached = cache->lookup(cf.key, cf.problem);
        if (cached) {
            canonical_sol = *cached;
            found = true;
        }
    }
    if (!found) {
        canonical_sol = gadget_detail::search(cf.problem, 1, nullptr);
        if (cache != nullptr) cache->store(cf.key, canonical_sol);
    }
    std::optional<GadgetSolution> result;
    if (canonical_sol)
        result = gadget_detail::transport(*canonical_sol, cf.to_canonical.inverse());
    if (result) {
        std::vector<Cell> target = prob.region;
        target.insert(target.end(), result->used_protrusions.begin(), result->used_protrusions.end());
        if (!verify_exact_cover(target, result->placements).valid)
            throw std::logic_error("gadget search produced an invalid fragment");
    }
    return result;
}

// All solutions up to limit, in the deterministic search order.
inline std::vector<GadgetSolution> enumerate_gadget(const GadgetProblem& prob, std::size_t limit) {
    validate_problem(prob);
    std::vector<GadgetSolution> all;
    gadget_detail::search(prob, limit, &all);
    return all;
}

}  // namespace tromino
