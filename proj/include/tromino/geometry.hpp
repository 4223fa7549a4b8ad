#pragma once

// Lattice cells, L-tromino placements, deficient cube instances, and the
// 48-element symmetry group of the cube acting on all of them.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tromino {

struct Cell {
    int x = 0;
    int y = 0;
    int z = 0;

    auto operator<=>(const Cell&) const = default;

    int operator[](int axis) const {
        return axis == 0 ? x : axis == 1 ? y : z;
    }
    int& operator[](int axis) {
        return axis == 0 ? x : axis == 1 ? y : z;
    }
    Cell operator+(const Cell& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Cell operator-(const Cell& o) const { return {x - o.x, y - o.y, z - o.z}; }
};

inline Cell unit(int axis, int sign = 1) {
    Cell c;
    c[axis] = sign;
    return c;
}

// Axis index of a signed unit vector, or -1 if the offset is not one.
inline int axis_of(const Cell& d) {
    int axis = -1;
    for (int i = 0; i < 3; ++i) {
        if (d[i] == 0) continue;
        if (d[i] != 1 && d[i] != -1) return -1;
        if (axis != -1) return -1;
        axis = i;
    }
    return axis;
}

struct CellHash {
    std::size_t operator()(const Cell& c) const {
        std::uint64_t h = 1469598103934665603ull;
        for (int v : {c.x, c.y, c.z}) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

inline std::string to_string(const Cell& c) {
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + "," +
           std::to_string(c.z) + ")";
}

// An L-tromino: a corner cell plus one neighbor along each of two distinct
// axes. Stored arm-normalized (arm1 < arm2) so equal cell sets compare equal.
struct TrominoPlacement {
    Cell corner;
    Cell arm1;
    Cell arm2;

    auto operator<=>(const TrominoPlacement&) const = default;

    bool is_valid() const {
        int a = axis_of(arm1);
        int b = axis_of(arm2);
        return a != -1 && b != -1 && a != b;
    }
    std::array<Cell, 3> cells() const {
        return {corner, corner + arm1, corner + arm2};
    }
};

inline std::array<Cell, 3> cells_of(const TrominoPlacement& p) {
    return p.cells();
}

inline std::array<Cell, 3> sorted_cells(const TrominoPlacement& p) {
    auto cs = p.cells();
    std::sort(cs.begin(), cs.end());
    return cs;
}

inline TrominoPlacement make_tromino(Cell corner, Cell arm1, Cell arm2) {
    TrominoPlacement p{corner, arm1, arm2};
    if (!p.is_valid())
        throw std::invalid_argument("tromino arms must be unit offsets along two distinct axes");
    if (p.arm2 < p.arm1) std::swap(p.arm1, p.arm2);
    return p;
}

// Reconstructs a placement from its three cells: the corner is the unique
// cell face-adjacent to both others. Returns nothing for non-L cell sets.
inline std::optional<TrominoPlacement> placement_from_cells(std::array<Cell, 3> cs) {
    std::sort(cs.begin(), cs.end());
    if (cs[0] == cs[1] || cs[1] == cs[2]) return std::nullopt;
    for (int i = 0; i < 3; ++i) {
        const Cell& corner = cs[i];
        const Cell& a = cs[(i + 1) % 3];
        const Cell& b = cs[(i + 2) % 3];
        TrominoPlacement p{corner, a - corner, b - corner};
        if (p.is_valid()) {
            if (p.arm2 < p.arm1) std::swap(p.arm1, p.arm2);
            return p;
        }
    }
    return std::nullopt;
}

struct BoxRegion {
    Cell origin;
    Cell extent;  // all components > 0

    long long volume() const {
        return 1ll * extent.x * extent.y * extent.z;
    }
    bool contains(const Cell& c) const {
        for (int i = 0; i < 3; ++i)
            if (c[i] < origin[i] || c[i] >= origin[i] + extent[i]) return false;
        return true;
    }
    std::vector<Cell> cells() const {
        std::vector<Cell> out;
        out.reserve(static_cast<std::size_t>(volume()));
        for (int x = origin.x; x < origin.x + extent.x; ++x)
            for (int y = origin.y; y < origin.y + extent.y; ++y)
                for (int z = origin.z; z < origin.z + extent.z; ++z)
                    out.push_back({x, y, z});
        return out;
    }
};

class InvalidInstance : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

// Number of removed cells a side-n cube needs before the rest splits into
// trominoes: n^3 mod 3, which equals n mod 3.
inline int required_deficiency_count(int n) {
    return ((n % 3) + 3) % 3;
}

// A side-n cube with 0, 1 or 2 removed cells, as n mod 3 dictates.
struct Instance {
    int n = 1;
    std::vector<Cell> deficiencies;  // sorted, unique

    auto operator<=>(const Instance&) const = default;

    bool is_deficiency(const Cell& c) const {
        return std::binary_search(deficiencies.begin(), deficiencies.end(), c);
    }
    long long tromino_count() const {
        return (1ll * n * n * n - static_cast<long long>(deficiencies.size())) / 3;
    }
};

inline Instance make_instance(int n, std::vector<Cell> defs) {
    if (n < 1) throw InvalidInstance("side length must be >= 1");
    std::sort(defs.begin(), defs.end());
    if (std::adjacent_find(defs.begin(), defs.end()) != defs.end())
        throw InvalidInstance("deficiency cells must be distinct");
    for (const Cell& c : defs)
        for (int i = 0; i < 3; ++i)
            if (c[i] < 0 || c[i] >= n)
                throw InvalidInstance("deficiency cell " + to_string(c) + " outside cube of side " +
                                      std::to_string(n));
    if (static_cast<int>(defs.size()) != required_deficiency_count(n))
        throw InvalidInstance("side " + std::to_string(n) + " needs exactly " +
                              std::to_string(required_deficiency_count(n)) + " deficiencies, got " +
                              std::to_string(defs.size()));
    return Instance{n, std::move(defs)};
}

struct Tiling {
    Instance instance;
    std::vector<TrominoPlacement> placements;

    auto operator<=>(const Tiling&) const = default;
};

// A signed axis permutation plus translation: q[i] = +-p[perm[i]] + shift[i].
// The 48 (perm, flip) pairs form the symmetry group of the cube.
struct Isometry {
    std::array<int, 3> perm{0, 1, 2};
    std::array<bool, 3> flip{false, false, false};
    Cell shift{0, 0, 0};

    Cell map(const Cell& c) const {
        Cell q;
        for (int i = 0; i < 3; ++i)
            q[i] = (flip[i] ? -c[perm[i]] : c[perm[i]]) + shift[i];
        return q;
    }
    // Linear part only; for direction vectors.
    Cell map_dir(const Cell& c) const {
        Cell q;
        for (int i = 0; i < 3; ++i) q[i] = flip[i] ? -c[perm[i]] : c[perm[i]];
        return q;
    }
    bool is_identity() const {
        return perm == std::array<int, 3>{0, 1, 2} && !flip[0] && !flip[1] && !flip[2] &&
               shift == Cell{0, 0, 0};
    }

    Isometry inverse() const {
        Isometry inv;
        for (int i = 0; i < 3; ++i) {
            inv.perm[perm[i]] = i;
            inv.flip[perm[i]] = flip[i];
        }
        inv.shift = {0, 0, 0};
        Cell s = inv.map_dir(shift);
        inv.shift = Cell{0, 0, 0} - s;
        return inv;
    }

    static Isometry identity() { return {}; }
    static Isometry translation(const Cell& t) { return {{0, 1, 2}, {false, false, false}, t}; }

    // k in [0,48): one of the symmetries of the cube [0,n)^3, identity at k=0.
    static Isometry cube_symmetry(int k, int n) {
        static constexpr std::array<std::array<int, 3>, 6> kPerms = {{
            {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
        }};
        Isometry iso;
        iso.perm = kPerms[static_cast<std::size_t>(k / 8)];
        for (int i = 0; i < 3; ++i) {
            iso.flip[i] = (k >> i) & 1;
            iso.shift[i] = iso.flip[i] ? n - 1 : 0;
        }
        return iso;
    }
};

// outer . inner: apply inner first.
inline Isometry compose(const Isometry& outer, const Isometry& inner) {
    Isometry c;
    for (int i = 0; i < 3; ++i) {
        c.perm[i] = inner.perm[outer.perm[i]];
        c.flip[i] = outer.flip[i] != inner.flip[outer.perm[i]];
    }
    c.shift = outer.map(inner.shift);
    return c;
}

// Frame with the given origin whose local +x/+y/+z point along the given
// world unit directions (must be mutually orthogonal signed axes).
inline Isometry make_frame(Cell origin, Cell dir_x, Cell dir_y, Cell dir_z) {
    std::array<Cell, 3> dirs{dir_x, dir_y, dir_z};
    Isometry f;
    f.shift = origin;
    std::array<bool, 3> seen{false, false, false};
    for (int world = 0; world < 3; ++world) {
        int local = -1;
        for (int j = 0; j < 3; ++j)
            if (dirs[j][world] != 0) {
                if (local != -1 || axis_of(dirs[j]) == -1)
                    throw std::invalid_argument("frame directions must be orthogonal signed axes");
                local = j;
            }
        if (local == -1) throw std::invalid_argument("frame directions must span all axes");
        f.perm[world] = local;
        f.flip[world] = dirs[local][world] < 0;
        seen[local] = true;
    }
    if (!(seen[0] && seen[1] && seen[2]))
        throw std::invalid_argument("frame directions must be distinct axes");
    return f;
}

inline Cell apply(const Isometry& iso, const Cell& c) { return iso.map(c); }

inline TrominoPlacement apply(const Isometry& iso, const TrominoPlacement& p) {
    TrominoPlacement q{iso.map(p.corner), iso.map_dir(p.arm1), iso.map_dir(p.arm2)};
    if (q.arm2 < q.arm1) std::swap(q.arm1, q.arm2);
    return q;
}

// Deficiencies are mapped and re-sorted; iso is expected to preserve the cube.
inline Instance apply(const Isometry& iso, const Instance& inst) {
    Instance out;
    out.n = inst.n;
    out.deficiencies.reserve(inst.deficiencies.size());
    for (const Cell& c : inst.deficiencies) out.deficiencies.push_back(iso.map(c));
    std::sort(out.deficiencies.begin(), out.deficiencies.end());
    return out;
}

inline Tiling apply(const Isometry& iso, const Tiling& t) {
    Tiling out;
    out.instance = apply(iso, t.instance);
    out.placements.reserve(t.placements.size());
    for (const TrominoPlacement& p : t.placements) out.placements.push_back(apply(iso, p));
    return out;
}

// Lexicographically least image of the instance under the 48 cube symmetries,
// together with the symmetry that achieves it. Applying the inverse to a
// tiling of the canonical instance gives a tiling of the original.
inline std::pair<Instance, Isometry> canonicalize(const Instance& inst) {
    Instance best = inst;
    Isometry best_iso = Isometry::identity();
    for (int k = 0; k < 48; ++k) {
        Isometry iso = Isometry::cube_symmetry(k, inst.n);
        Instance img = apply(iso, inst);
        if (k == 0 || img.deficiencies < best.deficiencies) {
            best = std::move(img);
            best_iso = iso;
        }
    }
    return {best, best_iso};
}

inline std::string instance_key(const Instance& inst) {
    std::string key = "n" + std::to_string(inst.n);
    for (const Cell& c : inst.deficiencies) key += "|" + to_string(c);
    return key;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace tromino
