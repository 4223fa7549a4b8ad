#pragma once

// Independent validity checking plus brute-force oracles. The enumeration
// here deliberately shares nothing with the gadget search beyond the core
// geometry types: it branches on the reverse-lexicographic frontier and
// derives its candidate shapes from 2x2x1 boxes instead of arm pairs.

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tromino/geometry.hpp"

namespace tromino {

enum class ViolationKind { Overlap, Gap, BadShape, OutOfBounds, DeficiencyCovered };

inline const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::Overlap: return "overlap";
        case ViolationKind::Gap: return "gap";
        case ViolationKind::BadShape: return "bad-shape";
        case ViolationKind::OutOfBounds: return "out-of-bounds";
        case ViolationKind::DeficiencyCovered: return "deficiency-covered";
    }
    return "?";
}

struct Violation {
    ViolationKind kind;
    std::vector<Cell> cells;
};

struct VerificationReport {
    bool valid = true;
    std::vector<Violation> violations;

    void add(ViolationKind kind, std::vector<Cell> cells) {
        valid = false;
        violations.push_back({kind, std::move(cells)});
    }
};

// Valid iff the placements are pairwise disjoint well-formed trominoes inside
// the cube that avoid every deficiency and cover everything else. Runs in
// time linear in n^3 + placements.
inline VerificationReport verify_tiling(const Instance& inst, const Tiling& t) {
    VerificationReport report;
    const int n = inst.n;
    std::vector<int> owner(static_cast<std::size_t>(n) * n * n, 0);
    auto idx = [n](const Cell& c) {
        return (static_cast<std::size_t>(c.x) * n + c.y) * n + c.z;
    };
    auto in_bounds = [n](const Cell& c) {
        return c.x >= 0 && c.x < n && c.y >= 0 && c.y < n && c.z >= 0 && c.z < n;
    };

    for (std::size_t i = 0; i < t.placements.size(); ++i) {
        const TrominoPlacement& p = t.placements[i];
        if (!p.is_valid()) {
            report.add(ViolationKind::BadShape, {p.corner, p.corner + p.arm1, p.corner + p.arm2});
            continue;
        }
        for (const Cell& c : p.cells()) {
            if (!in_bounds(c)) {
                report.add(ViolationKind::OutOfBounds, {c});
                continue;
            }
            if (inst.is_deficiency(c)) {
                report.add(ViolationKind::DeficiencyCovered, {c});
                continue;
            }
            if (owner[idx(c)] != 0) {
                report.add(ViolationKind::Overlap, {c});
                continue;
            }
            owner[idx(c)] = static_cast<int>(i) + 1;
        }
    }

    std::vector<Cell> gaps;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z) {
                Cell c{x, y, z};
                if (owner[idx(c)] == 0 && !inst.is_deficiency(c)) gaps.push_back(c);
            }
    if (!gaps.empty()) report.add(ViolationKind::Gap, std::move(gaps));
    return report;
}

// Exact-cover check for fragments: the placements must tile precisely the
// given cell set, no more, no less.
inline VerificationReport verify_exact_cover(const std::vector<Cell>& target,
                                             const std::vector<TrominoPlacement>& placements) {
    VerificationReport report;
    std::unordered_map<Cell, int, CellHash> state;  // 0 uncovered, 1 covered
    state.reserve(target.size() * 2);
    for (const Cell& c : target) state.emplace(c, 0);
    if (state.size() != target.size()) report.add(ViolationKind::Overlap, {});

    for (const TrominoPlacement& p : placements) {
        if (!p.is_valid()) {
            report.add(ViolationKind::BadShape, {p.corner, p.corner + p.arm1, p.corner + p.arm2});
            continue;
        }
        for (const Cell& c : p.cells()) {
            auto it = state.find(c);
            if (it == state.end()) {
                report.add(ViolationKind::OutOfBounds, {c});
            } else if (it->second != 0) {
                report.add(ViolationKind::Overlap, {c});
            } else {
                it->second = 1;
            }
        }
    }
    std::vector<Cell> gaps;
    for (const Cell& c : target) {
        auto it = state.find(c);
        if (it != state.end() && it->second == 0) gaps.push_back(c);
    }
    if (!gaps.empty()) {
        std::sort(gaps.begin(), gaps.end());
        report.add(ViolationKind::Gap, std::move(gaps));
    }
    return report;
}

namespace oracle_detail {

using Triple = std::array<Cell, 3>;

// All tromino cell sets inside a 2x2x1 box touching the origin, derived by
// dropping one cell of each box. Sorted member cells, deterministic order.
inline const std::vector<Triple>& box_shapes() {
    static const std::vector<Triple> shapes = [] {
        std::vector<Triple> out;
        for (int plane = 0; plane < 3; ++plane) {
            int u = plane == 0 ? 1 : 0;
            int v = plane == 2 ? 1 : 2;
            std::array<Cell, 4> box;
            for (int i = 0; i < 4; ++i) {
                Cell c;
                c[u] = i & 1;
                c[v] = (i >> 1) & 1;
                box[i] = c;
            }
            for (int drop = 0; drop < 4; ++drop) {
                Triple t;
                int k = 0;
                for (int i = 0; i < 4; ++i)
                    if (i != drop) t[k++] = box[i];
                std::sort(t.begin(), t.end());
                out.push_back(t);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }();
    return shapes;
}

struct Enumerator {
    std::vector<Cell> cells;  // sorted
    std::unordered_map<Cell, int, CellHash> index;
    std::vector<char> covered;
    std::vector<Triple> chosen;
    std::vector<std::vector<Triple>>* sink = nullptr;
    long long count = 0;
    long long limit = 0;

    bool covered_cell(const Cell& c) const {
        auto it = index.find(c);
        return it != index.end() && covered[static_cast<std::size_t>(it->second)];
    }

    // Size mod 3 of each uncovered connected component must vanish.
    bool component_prune() const {
        std::vector<char> seen(cells.size(), 0);
        std::vector<int> stack;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (covered[i] || seen[i]) continue;
            int size = 0;
            stack.push_back(static_cast<int>(i));
            seen[i] = 1;
            while (!stack.empty()) {
                int j = stack.back();
                stack.pop_back();
                ++size;
                for (int axis = 0; axis < 3; ++axis)
                    for (int sign : {-1, 1}) {
                        auto it = index.find(cells[static_cast<std::size_t>(j)] + unit(axis, sign));
                        if (it == index.end()) continue;
                        int k = it->second;
                        if (covered[static_cast<std::size_t>(k)] || seen[static_cast<std::size_t>(k)]) continue;
                        seen[static_cast<std::size_t>(k)] = 1;
                        stack.push_back(k);
                    }
            }
            if (size % 3 != 0) return true;
        }
        return false;
    }

    void run() {
        // Reverse-lexicographic frontier: branch on the greatest uncovered cell.
        int target = -1;
        for (int i = static_cast<int>(cells.size()) - 1; i >= 0; --i)
            if (!covered[static_cast<std::size_t>(i)]) {
                target = i;
                break;
            }
        if (target == -1) {
            ++count;
            if (sink) {
                auto sol = chosen;
                std::sort(sol.begin(), sol.end());
                sink->push_back(std::move(sol));
            }
            return;
        }
        if (component_prune()) return;
        const Cell& c = cells[static_cast<std::size_t>(target)];
        for (const Triple& shape : box_shapes()) {
            for (int role = 0; role < 3; ++role) {
                Cell base = c - shape[static_cast<std::size_t>(role)];
                Triple placed;
                bool ok = true;
                for (int i = 0; i < 3 && ok; ++i) {
                    placed[static_cast<std::size_t>(i)] = base + shape[static_cast<std::size_t>(i)];
                    auto it = index.find(placed[static_cast<std::size_t>(i)]);
                    ok = it != index.end() && !covered[static_cast<std::size_t>(it->second)];
                }
                if (!ok) continue;
                for (const Cell& pc : placed) covered[static_cast<std::size_t>(index.at(pc))] = 1;
                chosen.push_back(placed);
                run();
                chosen.pop_back();
                for (const Cell& pc : placed) covered[static_cast<std::size_t>(index.at(pc))] = 0;
                if (count >= limit) return;
            }
        }
    }
};

inline Enumerator make_enumerator(const std::vector<Cell>& region, long long limit) {
    Enumerator e;
    e.cells = region;
    std::sort(e.cells.begin(), e.cells.end());
    e.cells.erase(std::unique(e.cells.begin(), e.cells.end()), e.cells.end());
    for (std::size_t i = 0; i < e.cells.size(); ++i)
        e.index.emplace(e.cells[i], static_cast<int>(i));
    e.covered.assign(e.cells.size(), 0);
    e.limit = limit;
    return e;
}

}  // namespace oracle_detail

// Exact number of tromino tilings of the region, counted up to limit.
inline long long brute_force_count(const std::vector<Cell>& region, long long limit = 1'000'000) {
    if (region.size() % 3 != 0) return 0;
    auto e = oracle_detail::make_enumerator(region, limit);
    if (e.cells.empty()) return 1;
    e.run();
    return e.count;
}

// Every tiling of the region (up to limit), each as a sorted list of sorted
// cell triples.
inline std::vector<std::vector<std::array<Cell, 3>>> brute_force_tilings(
    const std::vector<Cell>& region, long long limit = 1'000'000) {
    std::vector<std::vector<std::array<Cell, 3>>> out;
    if (region.size() % 3 != 0) return out;
    auto e = oracle_detail::make_enumerator(region, limit);
    if (e.cells.empty()) {
        out.emplace_back();
        return out;
    }
    e.sink = &out;
    e.run();
    return out;
}

// Quadrant recursion for a 2^k x 2^k square with one removed cell (in the
// z = 0 plane): place one tromino around the center through the three
// quadrants not containing the deficiency, recurse into all four.
inline std::vector<TrominoPlacement> golomb_2d(int k, Cell deficiency) {
    if (k < 1) throw std::invalid_argument("exponent must be >= 1");
    const int side = 1 << k;
    deficiency.z = 0;
    if (deficiency.x < 0 || deficiency.x >= side || deficiency.y < 0 || deficiency.y >= side)
        throw std::invalid_argument("deficiency outside the square");

    std::vector<TrominoPlacement> out;
    struct Job {
        Cell origin;
        int size;
        Cell hole;
    };
    std::vector<Job> jobs{{Cell{0, 0, 0}, side, deficiency}};
    while (!jobs.empty()) {
        Job job = jobs.back();
        jobs.pop_back();
        if (job.size == 2) {
            std::array<Cell, 3> rest;
            int k2 = 0;
            for (int dx = 0; dx < 2; ++dx)
                for (int dy = 0; dy < 2; ++dy) {
                    Cell c{job.origin.x + dx, job.origin.y + dy, 0};
                    if (c != job.hole) rest[static_cast<std::size_t>(k2++)] = c;
                }
            out.push_back(*placement_from_cells(rest));
            continue;
        }
        const int h = job.size / 2;
        std::array<Cell, 3> center_cells;
        int k2 = 0;
        for (int qx = 0; qx < 2; ++qx)
            for (int qy = 0; qy < 2; ++qy) {
                Cell origin{job.origin.x + qx * h, job.origin.y + qy * h, 0};
                // Center-most cell of this quadrant.
                Cell center{origin.x + (qx ? 0 : h - 1), origin.y + (qy ? 0 : h - 1), 0};
                bool holds_hole = job.hole.x >= origin.x && job.hole.x < origin.x + h &&
                                  job.hole.y >= origin.y && job.hole.y < origin.y + h;
                if (holds_hole) {
                    jobs.push_back({origin, h, job.hole});
                } else {
                    center_cells[static_cast<std::size_t>(k2++)] = center;
                    jobs.push_back({origin, h, center});
                }
            }
        out.push_back(*placement_from_cells(center_cells));
    }
    return out;
}

// Cells of an m x m board whose removal leaves a tromino-tileable region,
// decided by exhaustive search. Keep m <= 7.
inline std::vector<Cell> classify_deficient_square(int m) {
    if (m < 1 || m > 7) throw std::invalid_argument("classification supported for m <= 7");
    std::vector<Cell> board;
    for (int y = 0; y < m; ++y)
        for (int x = 0; x < m; ++x) board.push_back({x, y, 0});
    std::vector<Cell> tileable;
    for (const Cell& hole : board) {
        std::vector<Cell> region;
        for (const Cell& c : board)
            if (c != hole) region.push_back(c);
        if (brute_force_count(region, 1) > 0) tileable.push_back(hole);
    }
    std::sort(tileable.begin(), tileable.end());
    return tileable;
}

// Row-major 1-based id used when reporting square classifications.
inline int row_major_id(const Cell& c, int m) {
    return c.y * m + c.x + 1;
}

}  // namespace tromino
