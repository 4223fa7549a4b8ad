#pragma once

// Deterministic, search-free tilers for the rectangular building blocks the
// recursive solver assembles shells from. Every builder produces placements
// in a local coordinate box and maps them through an explicit frame, so the
// same block drops into any face of a shell.

#include <optional>
#include <stdexcept>
#include <vector>

#include "tromino/geometry.hpp"

namespace tromino {

using Fragment = std::vector<TrominoPlacement>;

inline void append(Fragment& dst, const Fragment& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

inline Fragment apply(const Isometry& iso, const Fragment& frag) {
    Fragment out;
    out.reserve(frag.size());
    for (const TrominoPlacement& p : frag) out.push_back(apply(iso, p));
    return out;
}

// 3x2x1 box (local x in [0,3), y in [0,2), z = 0): two interlocking pieces.
inline Fragment tile_box_3x2x1(const Isometry& frame = Isometry::identity()) {
    Fragment out{
        make_tromino({0, 0, 0}, {1, 0, 0}, {0, 1, 0}),
        make_tromino({2, 1, 0}, {0, -1, 0}, {-1, 0, 0}),
    };
    return tromino::apply(frame, out);
}

// 3x2xn box as n parallel 3x2x1 layers stacked along local z.
inline Fragment tile_box_3x2xn(const Isometry& frame, int n) {
    if (n < 1) throw std::invalid_argument("box length must be >= 1");
    Fragment out;
    out.reserve(static_cast<std::size_t>(2 * n));
    for (int k = 0; k < n; ++k)
        append(out, tile_box_3x2x1(compose(frame, Isometry::translation({0, 0, k}))));
    return out;
}

// 3x3x2 box: two flat 3x2x1 layers plus a 3x1x2 wall along local y = 2.
inline Fragment tile_box_3x3x2(const Isometry& frame = Isometry::identity()) {
    Fragment out;
    append(out, tile_box_3x2x1(compose(frame, Isometry::translation({0, 0, 0}))));
    append(out, tile_box_3x2x1(compose(frame, Isometry::translation({0, 0, 1}))));
    append(out, tile_box_3x2x1(compose(frame, make_frame({0, 2, 0}, {1, 0, 0}, {0, 0, 1}, {0, 1, 0}))));
    return out;
}

// 3x3x3 cube: three 3x2x1 boxes (one flat, two on edge) leaving an L-shaped
// groove filled by three parallel trominoes. Fixed witness, asserted valid
// by the tests.
inline Fragment tile_cube_3x3x3(const Isometry& frame = Isometry::identity()) {
    Fragment out;
    // Flat box on the floor.
    append(out, tile_box_3x2x1(frame));
    // Wall along y = 2, standing on its long edge.
    append(out, tile_box_3x2x1(compose(frame, make_frame({0, 2, 0}, {1, 0, 0}, {0, 0, 1}, {0, 1, 0}))));
    // Wall along y = 0 raised to z in [1,3).
    append(out, tile_box_3x2x1(compose(frame, make_frame({0, 0, 1}, {1, 0, 0}, {0, 0, 1}, {0, 1, 0}))));
    // Three parallel trominoes through the remaining groove.
    for (int x = 0; x < 3; ++x)
        out.push_back(apply(frame, make_tromino({x, 1, 2}, {0, 0, -1}, {0, 1, 0})));
    return out;
}

// 3x3xn rod (local z the long axis). Even lengths stack 3x3x2 blocks; odd
// lengths place one 3x3x3 cube at the z = 0 end and continue even.
inline Fragment tile_rod_3x3xn(const Isometry& frame, int n) {
    if (n < 2) throw std::invalid_argument("rod length must be >= 2");
    Fragment out;
    int start = 0;
    if (n % 2 == 1) {
        append(out, tile_cube_3x3x3(frame));
        start = 3;
    }
    for (int k = start; k < n; k += 2)
        append(out, tile_box_3x3x2(compose(frame, Isometry::translation({0, 0, k}))));
    return out;
}

struct RodSegment {
    int offset;
    int length;  // 2 or 3

    auto operator<=>(const RodSegment&) const = default;
};

// Splits a rod of the given length (2 mod 3) into 3x3x2 boxes and at most one
// 3x3x3 cube so that one box starts exactly at required_box_start. The cube,
// when needed, goes as early as the requirement allows. Returns nothing when
// no such partition exists.
inline std::optional<std::vector<RodSegment>> decompose_rod(int length, int required_box_start) {
    if (length < 2 || length % 3 != 2) return std::nullopt;
    if (required_box_start < 0 || required_box_start > length - 2) return std::nullopt;
    auto build = [length](int cube_at) {
        std::vector<RodSegment> segs;
        for (int o = 0; o < (cube_at < 0 ? length : cube_at); o += 2) segs.push_back({o, 2});
        if (cube_at >= 0) {
            segs.push_back({cube_at, 3});
            for (int o = cube_at + 3; o < length; o += 2) segs.push_back({o, 2});
        }
        return segs;
    };
    auto has_box_at = [](const std::vector<RodSegment>& segs, int start) {
        for (const RodSegment& s : segs)
            if (s.offset == start && s.length == 2) return true;
        return false;
    };
    if (length % 2 == 0) {
        auto segs = build(-1);
        if (has_box_at(segs, required_box_start)) return segs;
        return std::nullopt;
    }
    for (int cube_at = 0; cube_at <= length - 3; cube_at += 2) {
        auto segs = build(cube_at);
        if (has_box_at(segs, required_box_start)) return segs;
    }
    return std::nullopt;
}

// Slab of footprint side x side and thickness 3 (local z), side mod 3 in
// {1,2}, side >= 4. Even sides split into 3x2xside strips; odd sides peel a
// rim of two rods and a corner cube off a smaller slab.
inline Fragment tile_slab(const Isometry& frame, int side) {
    if (side < 4 || side % 3 == 0)
        throw std::invalid_argument("slab side must be >= 4 and not a multiple of 3");
    Fragment out;
    if (side % 2 == 0) {
        for (int j = 0; j < side; j += 2)
            append(out, tile_box_3x2xn(
                            compose(frame, make_frame({0, j, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0})),
                            side));
        return out;
    }
    const int rest = side - 3;
    if (rest == 2) {
        // 2x2x3 remainder in the low corner.
        append(out, tile_box_3x2xn(
                        compose(frame, make_frame({0, 0, 0}, {0, 0, 1}, {1, 0, 0}, {0, 1, 0})), 2));
    } else {
        append(out, tile_slab(frame, rest));
    }
    append(out, tile_rod_3x3xn(
                    compose(frame, make_frame({rest, 0, 0}, {1, 0, 0}, {0, 0, 1}, {0, 1, 0})), rest));
    append(out, tile_rod_3x3xn(
                    compose(frame, make_frame({0, rest, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 0})), rest));
    append(out, tile_cube_3x3x3(compose(frame, Isometry::translation({rest, rest, 0}))));
    return out;
}

// Cube of side a multiple of 3: a grid of 3x3x3 blocks.
inline Tiling tile_multiple_of_3_cube(int n) {
    if (n < 3 || n % 3 != 0) throw std::invalid_argument("side must be a positive multiple of 3");
    Tiling t;
    t.instance = make_instance(n, {});
    for (int x = 0; x < n; x += 3)
        for (int y = 0; y < n; y += 3)
            for (int z = 0; z < n; z += 3)
                append(t.placements, tile_cube_3x3x3(Isometry::translation({x, y, z})));
    return t;
}

}  // namespace tromino
