#pragma once

// Shared generators for the property-style tests.

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "tromino/geometry.hpp"

namespace testutil {

using tromino::Cell;

inline Cell random_cell(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<int> d(0, n - 1);
    return {d(rng), d(rng), d(rng)};
}

inline tromino::Instance random_instance(std::mt19937_64& rng, int n) {
    const int need = tromino::required_deficiency_count(n);
    std::set<Cell> defs;
    while (static_cast<int>(defs.size()) < need) defs.insert(random_cell(rng, n));
    return tromino::make_instance(n, {defs.begin(), defs.end()});
}

inline tromino::Isometry random_symmetry(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<int> d(0, 47);
    return tromino::Isometry::cube_symmetry(d(rng), n);
}

// Connected cell set grown from the origin inside a small bounding box.
inline std::vector<Cell> random_region(std::mt19937_64& rng, int size, int span = 4) {
    std::set<Cell> cells{{0, 0, 0}};
    std::vector<Cell> pool{{0, 0, 0}};
    std::uniform_int_distribution<int> d6(0, 5);
    while (static_cast<int>(cells.size()) < size) {
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        Cell base = pool[pick(rng)];
        int dir = d6(rng);
        Cell next = base + tromino::unit(dir / 2, dir % 2 ? 1 : -1);
        bool in_span = next.x >= 0 && next.x < span && next.y >= 0 && next.y < span &&
                       next.z >= 0 && next.z < span;
        if (!in_span) continue;
        if (cells.insert(next).second) pool.push_back(next);
    }
    return {cells.begin(), cells.end()};
}

inline std::vector<std::array<Cell, 3>> as_triples(
    const std::vector<tromino::TrominoPlacement>& placements) {
    std::vector<std::array<Cell, 3>> out;
    out.reserve(placements.size());
    for (const auto& p : placements) out.push_back(tromino::sorted_cells(p));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace testutil
