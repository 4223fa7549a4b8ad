#pragma once

// Top-level solver for deficient cubes. Dispatch on n mod 3: multiples of 3
// split into 3x3x3 blocks, small sides go to exhaustive search, and larger
// sides recurse on a corner subcube of side n-3 whose surrounding shell
// (three slabs, three rods, one corner block) is tiled constructively.
// Deficiencies stuck in the shell are drained into the subcube by trominoes
// protruding across the decomposition, found with the gadget search.

#include <array>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tromino/blocks.hpp"
#include "tromino/gadget.hpp"
#include "tromino/geometry.hpp"
#include "tromino/verify.hpp"

namespace tromino {

class SolverDefect : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

// Partition of a side-n cube into a corner subcube of side n-3, three
// 3x(n-3)x(n-3) slabs, three 3x3x(n-3) rods and one 3x3x3 corner block.
struct ShellDecomposition {
    int n = 0;
    int inner = 0;
    BoxRegion subcube;
    std::array<BoxRegion, 3> slabs;  // indexed by thickness axis
    std::array<BoxRegion, 3> rods;   // indexed by run axis
    BoxRegion corner;

    std::vector<BoxRegion> parts() const {
        std::vector<BoxRegion> out{subcube};
        for (const BoxRegion& b : slabs) out.push_back(b);
        for (const BoxRegion& b : rods) out.push_back(b);
        out.push_back(corner);
        return out;
    }
    long long parts_volume() const {
        long long v = 0;
        for (const BoxRegion& b : parts()) v += b.volume();
        return v;
    }
};

inline ShellDecomposition shell_decomposition(int n) {
    if (n < 4) throw std::invalid_argument("shell decomposition needs n >= 4");
    const int m = n - 3;
    ShellDecomposition d;
    d.n = n;
    d.inner = m;
    d.subcube = {{0, 0, 0}, {m, m, m}};
    d.slabs[0] = {{m, 0, 0}, {3, m, m}};
    d.slabs[1] = {{0, m, 0}, {m, 3, m}};
    d.slabs[2] = {{0, 0, m}, {m, m, 3}};
    d.rods[0] = {{0, m, m}, {m, 3, 3}};
    d.rods[1] = {{m, 0, m}, {3, m, 3}};
    d.rods[2] = {{m, m, 0}, {3, 3, m}};
    d.corner = {{m, m, m}, {3, 3, 3}};
    return d;
}

namespace solver_detail {

// Frame whose local z runs along the slab's thickness axis, local x/y along
// the footprint axes in ascending order. Local z = -1 lands in the subcube.
inline Isometry slab_frame(int axis, int n) {
    const int m = n - 3;
    switch (axis) {
        case 0: return make_frame({m, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 0});
        case 1: return make_frame({0, m, 0}, {1, 0, 0}, {0, 0, 1}, {0, 1, 0});
        default: return make_frame({0, 0, m}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1});
    }
}

// Frame for the rod running along the given axis; local z is the run axis.
inline Isometry rod_frame(int run_axis, int n) {
    const int m = n - 3;
    std::array<int, 2> high{};
    int k = 0;
    for (int i = 0; i < 3; ++i)
        if (i != run_axis) high[static_cast<std::size_t>(k++)] = i;
    Cell origin{0, 0, 0};
    origin[high[0]] = m;
    origin[high[1]] = m;
    return make_frame(origin, unit(high[0]), unit(high[1]), unit(run_axis));
}

struct FootprintBox {
    int u = 0, v = 0, w = 0, h = 0;

    bool contains(int tu, int tv) const {
        return tu >= u && tu < u + w && tv >= v && tv < v + h;
    }
};

// A slab partition: full-depth boxes over the footprint, the index of the
// 2x2 box holding the designated footprint cell, and (for the 5x5 middle
// descriptor only) an L-shaped footprint filled by three stacked trominoes.
struct SlabPartition {
    std::vector<FootprintBox> boxes;
    int target_index = -1;
    std::array<Cell, 3> stack_cells{};  // footprint cells, z unused
    bool has_stack = false;
};

inline FootprintBox rotate_box(int m, const FootprintBox& b) {
    return {m - b.v - b.h, b.u, b.h, b.w};
}

inline SlabPartition partition_5x5(int tu, int tv) {
    SlabPartition part;
    if (tu == 2 && tv == 2) {
        // Middle descriptor: 2x2 over the center, nine 1x2 columns, one
        // L-footprint of three stacked trominoes.
        part.boxes = {{1, 1, 2, 2}, {0, 0, 2, 1}, {2, 0, 2, 1}, {4, 0, 1, 2}, {0, 1, 1, 2},
                      {3, 1, 1, 2}, {4, 2, 1, 2}, {0, 3, 1, 2}, {1, 3, 1, 2}, {2, 3, 1, 2}};
        part.target_index = 0;
        part.stack_cells = {Cell{3, 3, 0}, Cell{3, 4, 0}, Cell{4, 4, 0}};
        part.has_stack = true;
        return part;
    }
    // Corner descriptor rotated until the target falls into a 2x2 box.
    const std::vector<FootprintBox> base = {{0, 0, 2, 2}, {0, 2, 2, 2}, {2, 2, 3, 3},
                                            {0, 4, 2, 1}, {2, 0, 1, 2}, {3, 0, 1, 2},
                                            {4, 0, 1, 2}};
    for (int r = 0; r < 4; ++r) {
        std::vector<FootprintBox> boxes = base;
        for (int k = 0; k < r; ++k)
            for (FootprintBox& b : boxes) b = rotate_box(5, b);
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            if (boxes[i].w == 2 && boxes[i].h == 2 && boxes[i].contains(tu, tv)) {
                part.boxes = boxes;
                part.target_index = static_cast<int>(i);
                return part;
            }
        }
    }
    throw SolverDefect("5x5 slab descriptor misses footprint (" + std::to_string(tu) + "," +
                       std::to_string(tv) + ")");
}

// Footprint partition of an m x m slab face so that the given cell lies in a
// 2x2 full-depth box. Even m: a plain 2x2 grid. Odd m >= 7: a 3x3 corner
// block with 3-wide strips along its two edges, grid elsewhere, the corner
// chosen so the target stays in the grid. m = 5 uses fixed descriptors.
inline SlabPartition slab_partition(int m, int tu, int tv) {
    SlabPartition part;
    if (m == 5) return partition_5x5(tu, tv);
    if (m % 2 == 0) {
        for (int u = 0; u < m; u += 2)
            for (int v = 0; v < m; v += 2) {
                if (u == (tu & ~1) && v == (tv & ~1))
                    part.target_index = static_cast<int>(part.boxes.size());
                part.boxes.push_back({u, v, 2, 2});
            }
        return part;
    }
    if (m < 7) throw std::invalid_argument("odd slab partition needs m = 5 or m >= 7");
    const bool block_high_u = tu < m - 3;  // keep the target inside the grid zone
    const bool block_high_v = tv < m - 3;
    const int bu = block_high_u ? m - 3 : 0;
    const int bv = block_high_v ? m - 3 : 0;
    const int grid_u = block_high_u ? 0 : 3;
    const int grid_v = block_high_v ? 0 : 3;
    part.boxes.push_back({bu, bv, 3, 3});
    for (int u = grid_u; u < grid_u + m - 3; u += 2) part.boxes.push_back({u, bv, 2, 3});
    for (int v = grid_v; v < grid_v + m - 3; v += 2) part.boxes.push_back({bu, v, 3, 2});
    for (int u = grid_u; u < grid_u + m - 3; u += 2)
        for (int v = grid_v; v < grid_v + m - 3; v += 2) {
            if (u == grid_u + ((tu - grid_u) & ~1) && v == grid_v + ((tv - grid_v) & ~1))
                part.target_index = static_cast<int>(part.boxes.size());
            part.boxes.push_back({u, v, 2, 2});
        }
    if (part.target_index < 0)
        throw SolverDefect("slab partition missed its target footprint");
    return part;
}

// Tiles one full-depth footprint box of a slab, in slab-local coordinates.
inline Fragment footprint_box_fragment(const Isometry& slab, const FootprintBox& b) {
    const Cell o{b.u, b.v, 0};
    if (b.w == 2 && b.h == 2)
        return tile_box_3x2xn(compose(slab, make_frame(o, {0, 0, 1}, {1, 0, 0}, {0, 1, 0})), 2);
    if (b.w == 1 && b.h == 2)
        return tile_box_3x2x1(compose(slab, make_frame(o, {0, 0, 1}, {0, 1, 0}, {1, 0, 0})));
    if (b.w == 2 && b.h == 1)
        return tile_box_3x2x1(compose(slab, make_frame(o, {0, 0, 1}, {1, 0, 0}, {0, 1, 0})));
    if (b.w == 2 && b.h == 3)
        return tile_box_3x2xn(compose(slab, make_frame(o, {0, 1, 0}, {1, 0, 0}, {0, 0, 1})), 3);
    if (b.w == 3 && b.h == 2)
        return tile_box_3x2xn(compose(slab, make_frame(o, {1, 0, 0}, {0, 1, 0}, {0, 0, 1})), 3);
    if (b.w == 3 && b.h == 3)
        return tile_cube_3x3x3(compose(slab, Isometry::translation(o)));
    throw SolverDefect("unsupported footprint box");
}

inline Isometry corner_reflection(int n, const std::array<int, 3>& bits) {
    Isometry iso;
    for (int i = 0; i < 3; ++i) {
        iso.flip[i] = bits[static_cast<std::size_t>(i)] != 0;
        iso.shift[i] = iso.flip[i] ? n - 1 : 0;
    }
    return iso;
}

}  // namespace solver_detail

class Solver {
   public:
    struct Result {
        Tiling tiling;
        std::vector<std::string> trace;
    };

    // Tiles any valid instance. Deterministic; throws InvalidInstance for a
    // wrong deficiency count and SolverDefect if an internal step fails
    // (which must not happen for valid instances).
    Tiling solve(const Instance& inst) { return solve_traced(inst).tiling; }

    Result solve_traced(const Instance& inst) { return solve_impl(inst); }

    Tiling solve_base(const Instance& inst) {
        if (inst.n != 1 && inst.n != 2 && inst.n != 4 && inst.n != 5)
            throw std::invalid_argument("base solver covers n in {1,2,4,5}");
        return solve_impl(inst).tiling;
    }

    Tiling solve_5cube(const Instance& inst) {
        if (inst.n != 5) throw std::invalid_argument("expected a side-5 instance");
        return solve_impl(inst).tiling;
    }

    Tiling solve_1mod3(const Instance& inst) {
        if (inst.n < 7 || inst.n % 3 != 1)
            throw std::invalid_argument("expected side >= 7 congruent to 1 mod 3");
        return solve_impl(inst).tiling;
    }

    Tiling solve_2mod3(const Instance& inst) {
        if (inst.n < 8 || inst.n % 3 != 2)
            throw std::invalid_argument("expected side >= 8 congruent to 2 mod 3");
        return solve_impl(inst).tiling;
    }

    GadgetCache& gadget_cache() { return gcache_; }

    std::size_t instance_cache_size() const {
        std::lock_guard<std::mutex> lock(imu_);
        return icache_.size();
    }
    std::size_t instance_cache_hits() const {
        std::lock_guard<std::mutex> lock(imu_);
        return icache_hits_;
    }

   private:
    Result solve_impl(const Instance& inst_in) {
        Instance inst = make_instance(inst_in.n, inst_in.deficiencies);
        auto [canon, iso] = canonicalize(inst);
        const std::string key = instance_key(canon);
        const Result* cached = nullptr;
        {
            std::lock_guard<std::mutex> lock(imu_);
            auto it = icache_.find(key);
            if (it != icache_.end()) {
                ++icache_hits_;
                cached = &it->second;
            }
        }
        if (cached == nullptr) {
            Result fresh = solve_canonical(canon);
            fresh.tiling.instance = canon;
            std::sort(fresh.tiling.placements.begin(), fresh.tiling.placements.end());
            if (!verify_tiling(canon, fresh.tiling).valid)
                throw SolverDefect("solver produced an unverifiable tiling for " + key);
            std::lock_guard<std::mutex> lock(imu_);
            cached = &icache_.emplace(key, std::move(fresh)).first->second;
        }
        Result out;
        out.tiling = apply(iso.inverse(), cached->tiling);
        std::sort(out.tiling.placements.begin(), out.tiling.placements.end());
        out.trace = cached->trace;
        return out;
    }

    Result solve_canonical(const Instance& inst) {
        const int n = inst.n;
        if (n == 1) return {Tiling{inst, {}}, {"n=1 trivial"}};
        if (n % 3 == 0) {
            Result r{tile_multiple_of_3_cube(n), {"n=" + std::to_string(n) + " multiple-of-3 blocks"}};
            return r;
        }
        if (n == 2 || n == 4) return base_search(inst);
        if (n == 5) return five_cube(inst);
        if (n % 3 == 1) return single_shell(inst);
        return double_shell(inst);
    }

    Result base_search(const Instance& inst) {
        GadgetProblem prob;
        for (int x = 0; x < inst.n; ++x)
            for (int y = 0; y < inst.n; ++y)
                for (int z = 0; z < inst.n; ++z) {
                    Cell c{x, y, z};
                    (inst.is_deficiency(c) ? prob.forbidden : prob.region).push_back(c);
                }
        auto sol = solve_gadget(prob, &gcache_);
        if (!sol) throw SolverDefect("exhaustive search failed on a base instance");
        return {Tiling{inst, std::move(sol->placements)},
                {"n=" + std::to_string(inst.n) + " base exhaustive-search"}};
    }

    Result five_cube(const Instance& inst) {
        const Cell S = inst.deficiencies[0];
        const Cell T = inst.deficiencies[1];
        auto contains4 = [](const Cell& c, int bx, int by, int bz) {
            auto ok = [](int coord, int b) { return b ? coord >= 1 : coord < 4; };
            return ok(c.x, bx) && ok(c.y, by) && ok(c.z, bz);
        };
        int both = -1, one = -1;
        for (int bi = 0; bi < 8 && both < 0; ++bi) {
            int bx = (bi >> 2) & 1, by = (bi >> 1) & 1, bz = bi & 1;
            bool s_in = contains4(S, bx, by, bz), t_in = contains4(T, bx, by, bz);
            if (s_in && t_in) both = bi;
            if ((s_in || t_in) && one < 0) one = bi;
        }
        if (both >= 0) {
            // Both deficiencies in one corner 4-subcube: search the whole
            // 123-cell remainder at once. Lexicographic branching keeps the
            // frontier compact, which keeps the search small.
            GadgetProblem prob;
            for (int x = 0; x < 5; ++x)
                for (int y = 0; y < 5; ++y)
                    for (int z = 0; z < 5; ++z) {
                        Cell c{x, y, z};
                        (c == S || c == T ? prob.forbidden : prob.region).push_back(c);
                    }
            auto sol = solve_gadget(prob);
            if (!sol) throw SolverDefect("joint search failed on a side-5 instance");
            return {Tiling{inst, std::move(sol->placements)}, {"n=5 five-cube joint-search"}};
        }
        // Exactly one deficiency in the chosen subcube: recurse on it as a
        // side-4 instance and search the one-cell-thick shell around it.
        int bx = (one >> 2) & 1, by = (one >> 1) & 1, bz = one & 1;
        const Cell origin{bx, by, bz};
        const Cell inside = contains4(S, bx, by, bz) ? S : T;
        const Cell outside = inside == S ? T : S;
        Result sub = solve_impl(make_instance(4, {inside - origin}));
        Tiling tiling{inst, {}};
        for (const TrominoPlacement& p : sub.tiling.placements)
            tiling.placements.push_back(apply(Isometry::translation(origin), p));
        GadgetProblem shell;
        for (int x = 0; x < 5; ++x)
            for (int y = 0; y < 5; ++y)
                for (int z = 0; z < 5; ++z) {
                    Cell c{x, y, z};
                    if (contains4(c, bx, by, bz)) continue;
                    if (c == outside)
                        shell.forbidden.push_back(c);
                    else
                        shell.region.push_back(c);
                }
        auto sol = solve_gadget(shell, &gcache_);
        if (!sol) throw SolverDefect("shell search failed on a side-5 instance");
        append(tiling.placements, sol->placements);
        std::vector<std::string> trace{"n=5 five-cube split-search"};
        trace.insert(trace.end(), sub.trace.begin(), sub.trace.end());
        return {std::move(tiling), std::move(trace)};
    }

    Fragment plain_shell(int n) {
        const int m = n - 3;
        Fragment f;
        for (int axis = 0; axis < 3; ++axis)
            append(f, tile_slab(solver_detail::slab_frame(axis, n), m));
        for (int run = 0; run < 3; ++run)
            append(f, tile_rod_3x3xn(solver_detail::rod_frame(run, n), m));
        append(f, tile_cube_3x3x3(Isometry::translation({m, m, m})));
        return f;
    }

    // Tiles the slab with thickness axis `axis` around one pre-covered cell:
    // the cell's 2x2 full-depth box is tiled with one tromino protruding into
    // the subcube, everything else constructively. Returns the protrusion
    // cell (never `exclude`).
    Cell slab_with_hole(int n, int axis, const Cell& hole, const Cell& exclude, Fragment& out) {
        const int m = n - 3;
        std::array<int, 2> fp{};
        int k = 0;
        for (int i = 0; i < 3; ++i)
            if (i != axis) fp[static_cast<std::size_t>(k++)] = i;
        auto world = [&](int u, int v, int depth) {
            Cell c;
            c[axis] = m + depth;
            c[fp[0]] = u;
            c[fp[1]] = v;
            return c;
        };
        auto part = solver_detail::slab_partition(m, hole[fp[0]], hole[fp[1]]);
        const auto& target = part.boxes[static_cast<std::size_t>(part.target_index)];

        GadgetProblem prob;
        for (int du = 0; du < 2; ++du)
            for (int dv = 0; dv < 2; ++dv) {
                for (int depth = 0; depth < 3; ++depth) {
                    Cell c = world(target.u + du, target.v + dv, depth);
                    if (c != hole) prob.region.push_back(c);
                }
                Cell below = world(target.u + du, target.v + dv, -1);
                if (below != exclude) prob.protrusion_sites.push_back(below);
            }
        prob.forbidden.push_back(hole);
        prob.protrusion_budget = 1;
        auto sol = solve_gadget(prob, &gcache_);
        if (!sol) throw SolverDefect("slab drain gadget has no solution");
        append(out, sol->placements);

        const Isometry slab = solver_detail::slab_frame(axis, n);
        for (std::size_t i = 0; i < part.boxes.size(); ++i) {
            if (static_cast<int>(i) == part.target_index) continue;
            append(out, solver_detail::footprint_box_fragment(slab, part.boxes[i]));
        }
        if (part.has_stack) {
            for (int depth = 0; depth < 3; ++depth) {
                std::array<Cell, 3> cells;
                for (int i = 0; i < 3; ++i) {
                    const Cell& fp_cell = part.stack_cells[static_cast<std::size_t>(i)];
                    cells[static_cast<std::size_t>(i)] = apply(slab, Cell{fp_cell.x, fp_cell.y, depth});
                }
                auto p = placement_from_cells(cells);
                if (!p) throw SolverDefect("stacked tromino footprint is not an L");
                out.push_back(*p);
            }
        }
        return sol->used_protrusions.front();
    }

    // Tiles the remainder of the slab whose corner 2x2 full-depth box was
    // already consumed by a composite gadget.
    void slab_minus_corner_box(int n, int axis, Fragment& out) {
        const int m = n - 3;
        auto part = solver_detail::slab_partition(m, m - 2, m - 2);
        const Isometry slab = solver_detail::slab_frame(axis, n);
        for (std::size_t i = 0; i < part.boxes.size(); ++i) {
            if (static_cast<int>(i) == part.target_index) continue;
            append(out, solver_detail::footprint_box_fragment(slab, part.boxes[i]));
        }
        if (part.has_stack) throw SolverDefect("corner-box partition cannot need a stack");
    }

    Result single_shell(const Instance& inst) {
        const int n = inst.n;
        const int m = n - 3;
        const Cell T = inst.deficiencies[0];
        std::array<int, 3> bits{};
        for (int i = 0; i < 3; ++i) bits[static_cast<std::size_t>(i)] = T[i] < m ? 0 : 1;
        const Isometry rho = solver_detail::corner_reflection(n, bits);
        const Cell T2 = rho.map(T);

        Result sub = solve_impl(make_instance(m, {T2}));
        Tiling reflected{apply(rho, inst), sub.tiling.placements};
        append(reflected.placements, plain_shell(n));

        Result out;
        out.tiling = apply(rho, reflected);  // reflection is an involution
        out.tiling.instance = inst;
        out.trace = {"n=" + std::to_string(n) + " single-deficiency shell-recursion"};
        out.trace.insert(out.trace.end(), sub.trace.begin(), sub.trace.end());
        return out;
    }

    Result double_shell(const Instance& inst) {
        const int n = inst.n;
        const int m = n - 3;
        const Cell S = inst.deficiencies[0];
        const Cell T = inst.deficiencies[1];
        auto contains = [m](const Cell& c, int bx, int by, int bz) {
            auto ok = [m](int coord, int b) { return b ? coord >= 3 : coord < m; };
            return ok(c.x, bx) && ok(c.y, by) && ok(c.z, bz);
        };

        for (int bi = 0; bi < 8; ++bi) {
            int bx = (bi >> 2) & 1, by = (bi >> 1) & 1, bz = bi & 1;
            if (!contains(S, bx, by, bz) || !contains(T, bx, by, bz)) continue;
            const Isometry rho = solver_detail::corner_reflection(n, {bx, by, bz});
            Result sub = solve_impl(make_instance(m, {rho.map(S), rho.map(T)}));
            Tiling reflected{apply(rho, inst), sub.tiling.placements};
            append(reflected.placements, plain_shell(n));
            Result out;
            out.tiling = apply(rho, reflected);
            out.tiling.instance = inst;
            out.trace = {"n=" + std::to_string(n) + " double-deficiency both-in-subcube"};
            out.trace.insert(out.trace.end(), sub.trace.begin(), sub.trace.end());
            return out;
        }

        int chosen = -1;
        for (int bi = 0; bi < 8 && chosen < 0; ++bi) {
            int bx = (bi >> 2) & 1, by = (bi >> 1) & 1, bz = bi & 1;
            if (contains(S, bx, by, bz) || contains(T, bx, by, bz)) chosen = bi;
        }
        if (chosen < 0) throw SolverDefect("no corner subcube contains a deficiency");
        const std::array<int, 3> bits{(chosen >> 2) & 1, (chosen >> 1) & 1, chosen & 1};
        const Isometry rho = solver_detail::corner_reflection(n, bits);
        Cell inner = rho.map(S);
        Cell shell_cell = rho.map(T);
        const bool inner_ok = inner.x < m && inner.y < m && inner.z < m;
        if (!inner_ok) std::swap(inner, shell_cell);

        std::vector<int> highs;
        for (int i = 0; i < 3; ++i)
            if (shell_cell[i] >= m) highs.push_back(i);

        Fragment frag;
        Cell drained;  // second deficiency handed to the subcube
        std::string label;
        if (highs.size() == 1) {
            label = "deficiency-in-slab";
            drained = slab_with_hole(n, highs[0], shell_cell, inner, frag);
            for (int axis = 0; axis < 3; ++axis)
                if (axis != highs[0])
                    append(frag, tile_slab(solver_detail::slab_frame(axis, n), m));
            for (int run = 0; run < 3; ++run)
                append(frag, tile_rod_3x3xn(solver_detail::rod_frame(run, n), m));
            append(frag, tile_cube_3x3x3(Isometry::translation({m, m, m})));
        } else if (highs.size() == 2) {
            label = "deficiency-in-rod";
            drained = drain_through_rod(n, highs[0], highs[1], shell_cell, inner, frag);
        } else {
            label = "deficiency-in-corner-block";
            drained = drain_through_corner(n, shell_cell, inner, frag);
        }

        Result sub = solve_impl(make_instance(m, {inner, drained}));
        Tiling reflected{apply(rho, inst), sub.tiling.placements};
        append(reflected.placements, frag);
        Result out;
        out.tiling = apply(rho, reflected);
        out.tiling.instance = inst;
        out.trace = {"n=" + std::to_string(n) + " double-deficiency " + label};
        out.trace.insert(out.trace.end(), sub.trace.begin(), sub.trace.end());
        return out;
    }

    // Deficiency inside the rod with high axes (h1,h2): view rod plus corner
    // block as one extended rod, put the deficiency in a 3x3x2 box, tile that
    // box with one tromino poking into the neighboring slab, then drain that
    // slab into the subcube. Returns the subcube cell consumed.
    Cell drain_through_rod(int n, int h1, int h2, const Cell& t, const Cell& exclude,
                           Fragment& frag) {
        const int m = n - 3;
        int run = 3 - h1 - h2;
        const int t_pos = t[run];
        const int s = pick_box_start(n, t_pos);
        const auto segs = *decompose_rod(n, s);

        GadgetProblem prob;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = s; k < s + 2; ++k) {
                    Cell c;
                    c[h1] = m + i;
                    c[h2] = m + j;
                    c[run] = k;
                    if (c != t) prob.region.push_back(c);
                }
        prob.forbidden.push_back(t);
        for (int i = 0; i < 3; ++i)
            for (int k = s; k < s + 2; ++k) {
                if (k >= m) continue;
                Cell c;
                c[h1] = m + i;
                c[h2] = m - 1;
                c[run] = k;
                prob.protrusion_sites.push_back(c);
            }
        prob.protrusion_budget = 1;
        auto sol = solve_gadget(prob, &gcache_);
        if (!sol) throw SolverDefect("rod drain gadget has no solution");
        append(frag, sol->placements);
        const Cell into_slab = sol->used_protrusions.front();

        const Isometry rod = solver_detail::rod_frame(run, n);
        for (const RodSegment& seg : segs) {
            if (seg.offset == s) continue;
            Isometry at = compose(rod, Isometry::translation({0, 0, seg.offset}));
            append(frag, seg.length == 2 ? tile_box_3x3x2(at) : tile_cube_3x3x3(at));
        }

        const Cell drained = slab_with_hole(n, h1, into_slab, exclude, frag);
        append(frag, tile_slab(solver_detail::slab_frame(h2, n), m));
        append(frag, tile_slab(solver_detail::slab_frame(run, n), m));
        append(frag, tile_rod_3x3xn(solver_detail::rod_frame(h1, n), m));
        append(frag, tile_rod_3x3xn(solver_detail::rod_frame(h2, n), m));
        return drained;
    }

    // Deficiency inside the 3x3x3 corner block: extend the rod running along
    // x through the block, box the deficiency there, and solve one composite
    // gadget spanning that box, the end box of a second rod, and the corner
    // 2x2 column of a slab, with one cell protruding into the subcube.
    Cell drain_through_corner(int n, const Cell& t, const Cell& exclude, Fragment& frag) {
        const int m = n - 3;
        const int t_pos = t.x;  // extended rod runs along x, high axes y,z
        const int s = pick_box_start(n, t_pos);
        const auto segs = *decompose_rod(n, s);

        GadgetProblem prob;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = s; k < s + 2; ++k) {
                    Cell c{k, m + i, m + j};
                    if (c != t) prob.region.push_back(c);
                }
        prob.forbidden.push_back(t);
        // End box of the rod running along z (high x,y).
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = m - 2; k < m; ++k) prob.region.push_back({m + i, m + j, k});
        // Corner 2x2 column of the slab with thickness axis x.
        for (int i = 0; i < 3; ++i)
            for (int v = m - 2; v < m; ++v)
                for (int w = m - 2; w < m; ++w) prob.region.push_back({m + i, v, w});
        for (int v = m - 2; v < m; ++v)
            for (int w = m - 2; w < m; ++w) {
                Cell below{m - 1, v, w};
                if (below != exclude) prob.protrusion_sites.push_back(below);
            }
        prob.protrusion_budget = 1;
        auto sol = solve_gadget(prob, &gcache_);
        if (!sol) throw SolverDefect("corner drain gadget has no solution");
        append(frag, sol->placements);

        const Isometry ext_rod = solver_detail::rod_frame(0, n);
        for (const RodSegment& seg : segs) {
            if (seg.offset == s) continue;
            Isometry at = compose(ext_rod, Isometry::translation({0, 0, seg.offset}));
            append(frag, seg.length == 2 ? tile_box_3x3x2(at) : tile_cube_3x3x3(at));
        }
        // Rest of the z-running rod below its consumed end box.
        append(frag, tile_rod_3x3xn(solver_detail::rod_frame(2, n), m - 2));
        slab_minus_corner_box(n, 0, frag);
        append(frag, tile_slab(solver_detail::slab_frame(1, n), m));
        append(frag, tile_slab(solver_detail::slab_frame(2, n), m));
        append(frag, tile_rod_3x3xn(solver_detail::rod_frame(1, n), m));
        return sol->used_protrusions.front();
    }

    // First start in {t, t-1} whose rod partition has a 3x3x2 box there.
    static int pick_box_start(int length, int t_pos) {
        for (int s : {t_pos, t_pos - 1})
            if (s >= 0 && s <= length - 2 && decompose_rod(length, s)) return s;
        throw SolverDefect("no 3x3x2 box can cover position " + std::to_string(t_pos) +
                           " in a rod of length " + std::to_string(length));
    }

    GadgetCache gcache_;
    std::unordered_map<std::string, Result> icache_;
    std::size_t icache_hits_ = 0;
    mutable std::mutex imu_;
};

}  // namespace tromino
