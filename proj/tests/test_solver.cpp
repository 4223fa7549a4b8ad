#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <random>
#include <set>
#include <string>
#include <thread>

#include "helpers.hpp"
#include "tromino/io.hpp"
#include "tromino/solver.hpp"
#include "tromino/verify.hpp"

using namespace tromino;

namespace {

bool trace_mentions(const std::vector<std::string>& trace, const std::string& token) {
    for (const auto& line : trace)
        if (line.find(token) != std::string::npos) return true;
    return false;
}

Tiling solve_checked(Solver& solver, const Instance& inst) {
    Tiling t = solver.solve(inst);
    REQUIRE(verify_tiling(inst, t).valid);
    REQUIRE(static_cast<long long>(t.placements.size()) == inst.tromino_count());
    return t;
}

// Unordered pairs of cells fixed setwise by each symmetry, averaged over the
// group: an independent count of the deficiency-pair classes.
long long pair_classes_by_counting(int n) {
    long long total = 0;
    for (int k = 0; k < 48; ++k) {
        Isometry iso = Isometry::cube_symmetry(k, n);
        long long fixed = 0, swapped = 0;
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z) {
                    Cell c{x, y, z};
                    Cell img = iso.map(c);
                    if (img == c)
                        ++fixed;
                    else if (iso.map(img) == c)
                        ++swapped;
                }
        total += fixed * (fixed - 1) / 2 + swapped / 2;
    }
    return total / 48;
}

}  // namespace

TEST_CASE("trivial sides") {
    Solver solver;
    Tiling t1 = solve_checked(solver, make_instance(1, {{0, 0, 0}}));
    CHECK(t1.placements.empty());
}

TEST_CASE("every doubly deficient 2-cube splits into two trominoes") {
    Solver solver;
    auto cells = io::all_cells(2);
    int count = 0;
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            Instance inst = make_instance(2, {cells[i], cells[j]});
            Tiling t = solve_checked(solver, inst);
            CHECK(t.placements.size() == 2);
            // Independent engine agrees the remainder is tileable.
            std::vector<Cell> region;
            for (const Cell& c : cells)
                if (!inst.is_deficiency(c)) region.push_back(c);
            CHECK(brute_force_count(region, 1) >= 1);
            ++count;
        }
    CHECK(count == 28);
}

TEST_CASE("multiple-of-3 sides need no deficiencies") {
    Solver solver;
    CHECK(solve_checked(solver, make_instance(3, {})).placements.size() == 9);
    CHECK(solve_checked(solver, make_instance(6, {})).placements.size() == 72);
    CHECK_THROWS_AS(solver.solve(Instance{6, {{0, 0, 0}}}), InvalidInstance);
}

TEST_CASE("singly deficient 4-cube, all positions") {
    Solver solver;
    for (const Cell& c : io::all_cells(4)) {
        Tiling t = solve_checked(solver, make_instance(4, {c}));
        CHECK(t.placements.size() == 21);
    }
    // 64 positions collapse onto 4 canonical classes.
    CHECK(solver.instance_cache_size() == 4);
}

TEST_CASE("doubly deficient 5-cube, both solve paths") {
    Solver solver;
    SUBCASE("opposite corners go through the split path") {
        Instance inst = make_instance(5, {{0, 0, 0}, {4, 4, 4}});
        auto r = solver.solve_traced(inst);
        CHECK(verify_tiling(inst, r.tiling).valid);
        CHECK(r.tiling.placements.size() == 41);
        CHECK(trace_mentions(r.trace, "five-cube split-search"));
    }
    SUBCASE("interior pair goes through the joint path") {
        Instance inst = make_instance(5, {{1, 1, 1}, {2, 2, 2}});
        auto r = solver.solve_traced(inst);
        CHECK(verify_tiling(inst, r.tiling).valid);
        CHECK(r.tiling.placements.size() == 41);
        CHECK(trace_mentions(r.trace, "five-cube joint-search"));
    }
    SUBCASE("deficiency at the front-face center") {
        Instance inst = make_instance(5, {{1, 1, 1}, {2, 4, 2}});
        CHECK(solve_checked(solver, inst).placements.size() == 41);
    }
}

TEST_CASE("5-cube pair classes match the group-counting oracle") {
    std::set<std::string> classes;
    auto cells = io::all_cells(5);
    long long pairs = 0;
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            classes.insert(instance_key(canonicalize(make_instance(5, {cells[i], cells[j]})).first));
            ++pairs;
        }
    CHECK(pairs == 7750);
    CHECK(static_cast<long long>(classes.size()) == pair_classes_by_counting(5));
    CHECK(classes.size() == 245);  // value confirmed by the counting oracle above
}

TEST_CASE("shell decomposition partitions the cube, volumes included") {
    for (int n = 4; n <= 50; ++n) {
        if (n % 3 == 0) continue;
        auto d = shell_decomposition(n);
        CHECK(d.parts_volume() == 1ll * n * n * n);
    }
    // Small n: the parts are disjoint and cover every cell.
    for (int n : {4, 5, 7, 8}) {
        auto d = shell_decomposition(n);
        std::set<Cell> seen;
        for (const BoxRegion& part : d.parts())
            for (const Cell& c : part.cells()) CHECK(seen.insert(c).second);
        CHECK(seen.size() == static_cast<std::size_t>(n) * n * n);
    }
}

TEST_CASE("singly deficient shells recurse cleanly") {
    Solver solver;
    Tiling t = solve_checked(solver, make_instance(7, {{0, 0, 0}}));
    CHECK(t.placements.size() == 114);
    solve_checked(solver, make_instance(7, {{3, 3, 3}}));
    solve_checked(solver, make_instance(7, {{6, 6, 6}}));

    auto r = solver.solve_traced(make_instance(10, {{5, 4, 7}}));
    CHECK(verify_tiling(r.tiling.instance, r.tiling).valid);
    CHECK(trace_mentions(r.trace, "n=10 single-deficiency shell-recursion"));
    CHECK(trace_mentions(r.trace, "n=7 single-deficiency shell-recursion"));
    CHECK(trace_mentions(r.trace, "n=4 base exhaustive-search"));
}

TEST_CASE("doubly deficient 8-cube hits all three shell cases") {
    Solver solver;
    auto run = [&](Cell s, Cell t, const char* token) {
        Instance inst = make_instance(8, {s, t});
        auto r = solver.solve_traced(inst);
        CHECK(verify_tiling(inst, r.tiling).valid);
        CHECK(r.tiling.placements.size() == 170);
        CHECK(trace_mentions(r.trace, token));
    };
    run({0, 0, 0}, {1, 1, 1}, "both-in-subcube");
    run({0, 0, 0}, {6, 0, 0}, "deficiency-in-slab");
    run({0, 0, 0}, {6, 6, 0}, "deficiency-in-rod");
    run({0, 0, 0}, {7, 7, 7}, "deficiency-in-corner-block");
}

TEST_CASE("every corner-block cell drains correctly") {
    Solver solver;
    for (int x = 5; x < 8; ++x)
        for (int y = 5; y < 8; ++y)
            for (int z = 5; z < 8; ++z)
                solve_checked(solver, make_instance(8, {{1, 1, 1}, {x, y, z}}));
}

TEST_CASE("every cell of one rod drains correctly") {
    Solver solver;
    for (int x = 5; x < 8; ++x)
        for (int y = 5; y < 8; ++y)
            for (int z = 0; z < 5; ++z)
                solve_checked(solver, make_instance(8, {{1, 1, 1}, {x, y, z}}));
}

TEST_CASE("every cell of one slab drains correctly") {
    Solver solver;
    for (int x = 5; x < 8; ++x)
        for (int y = 0; y < 5; ++y)
            for (int z = 0; z < 5; ++z)
                solve_checked(solver, make_instance(8, {{1, 1, 1}, {x, y, z}}));
}

TEST_CASE("n=11 randomized pair sweep") {
    Solver solver;
    std::mt19937_64 rng(1101);
    for (int i = 0; i < 100; ++i) {
        Instance inst = testutil::random_instance(rng, 11);
        Tiling t = solve_checked(solver, inst);
        CHECK(t.placements.size() == (11 * 11 * 11 - 2) / 3);
    }
}

TEST_CASE("odd inner slabs (side 11) handle all shell cases") {
    Solver solver;
    // n=14 recurses on an 11-subcube; targets placed in slab, rod and corner.
    solve_checked(solver, make_instance(14, {{0, 0, 0}, {12, 1, 1}}));
    solve_checked(solver, make_instance(14, {{0, 0, 0}, {12, 5, 5}}));   // slab interior
    solve_checked(solver, make_instance(14, {{0, 0, 0}, {12, 12, 4}}));  // rod
    solve_checked(solver, make_instance(14, {{0, 0, 0}, {13, 13, 13}})); // corner block
    solve_checked(solver, make_instance(14, {{6, 6, 6}, {12, 7, 7}}));
}

TEST_CASE("deficiency directly over the 5x5 slab center uses the middle descriptor") {
    Solver solver;
    // n=8, subcube side 5: the slab footprint center is (2,2); put the shell
    // deficiency right above it at each height of the slab.
    for (int depth = 5; depth < 8; ++depth)
        solve_checked(solver, make_instance(8, {{1, 1, 1}, {depth, 2, 2}}));
}

TEST_CASE("inner deficiency sitting on a drain site forces another site") {
    Solver solver;
    // Subcube deficiency right under the corner column used by the
    // corner-block chain.
    solve_checked(solver, make_instance(8, {{4, 4, 4}, {7, 7, 7}}));
    solve_checked(solver, make_instance(8, {{4, 3, 4}, {5, 6, 7}}));
    // And right under the slab column that receives the shell deficiency.
    solve_checked(solver, make_instance(8, {{4, 2, 2}, {6, 2, 2}}));
    solve_checked(solver, make_instance(8, {{4, 0, 0}, {6, 0, 0}}));
    solve_checked(solver, make_instance(8, {{4, 0, 1}, {5, 0, 0}}));
}

TEST_CASE("solver is deterministic") {
    Instance inst = make_instance(8, {{2, 3, 4}, {7, 0, 6}});
    Solver a, b;
    CHECK(a.solve(inst) == b.solve(inst));
    CHECK(a.solve(inst) == a.solve(inst));
}

TEST_CASE("canonical instances are solved once, then transported") {
    Solver solver;
    Instance inst = make_instance(4, {{0, 0, 0}});
    solver.solve(inst);
    std::size_t size_after_first = solver.instance_cache_size();
    solver.solve(make_instance(4, {{3, 3, 3}}));  // same class
    CHECK(solver.instance_cache_size() == size_after_first);
    CHECK(solver.instance_cache_hits() >= 1);
}

TEST_CASE("solving a transformed instance still verifies") {
    std::mt19937_64 rng(555);
    Solver solver;
    for (int trial = 0; trial < 12; ++trial) {
        int n = 4 + static_cast<int>(rng() % 5);  // 4..8
        Instance inst = testutil::random_instance(rng, n);
        Isometry iso = testutil::random_symmetry(rng, n);
        Instance moved = apply(iso, inst);
        Tiling t = solve_checked(solver, moved);
        // And the transformed output of the original solve verifies too.
        Tiling original = solver.solve(inst);
        Tiling transported = apply(iso, original);
        CHECK(verify_tiling(moved, transported).valid);
    }
}

TEST_CASE("public entry points check their domains") {
    Solver solver;
    CHECK_THROWS_AS(solver.solve_base(make_instance(7, {{0, 0, 0}})), std::invalid_argument);
    CHECK_THROWS_AS(solver.solve_5cube(make_instance(4, {{0, 0, 0}})), std::invalid_argument);
    CHECK_THROWS_AS(solver.solve_1mod3(make_instance(4, {{0, 0, 0}})), std::invalid_argument);
    CHECK_THROWS_AS(solver.solve_2mod3(make_instance(5, {{0, 0, 0}, {1, 0, 0}})),
                    std::invalid_argument);
    CHECK(solver.solve_base(make_instance(5, {{0, 0, 0}, {1, 0, 0}})).placements.size() == 41);
    CHECK(solver.solve_1mod3(make_instance(7, {{1, 2, 3}})).placements.size() == 114);
    CHECK(solver.solve_2mod3(make_instance(8, {{1, 2, 3}, {4, 5, 6}})).placements.size() == 170);
}

TEST_CASE("recursion depth follows the side length") {
    Solver solver;
    auto r = solver.solve_traced(make_instance(13, {{12, 12, 12}}));
    CHECK(verify_tiling(r.tiling.instance, r.tiling).valid);
    // 13 -> 10 -> 7 -> 4: four strategy lines.
    CHECK(r.trace.size() == 4);
}

TEST_CASE("seeded soak across side lengths up to 50") {
    Solver solver;
    for (int n : {13, 14, 16, 17, 19, 20, 22, 23, 25, 26, 28, 29, 34, 35, 49, 50}) {
        for (const Instance& inst : io::random_instances(n, 4, 1000 + n)) {
            Tiling t = solver.solve(inst);
            REQUIRE(verify_tiling(inst, t).valid);
            REQUIRE(static_cast<long long>(t.placements.size()) == inst.tromino_count());
        }
    }
}

TEST_CASE("one solver instance works from several threads") {
    Solver solver;
    std::mt19937_64 rng(4242);
    std::vector<Instance> work;
    for (int i = 0; i < 40; ++i) work.push_back(testutil::random_instance(rng, 5 + i % 4));
    std::vector<std::thread> threads;
    std::atomic<int> bad{0};
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] {
            for (std::size_t i = static_cast<std::size_t>(t); i < work.size(); i += 4) {
                Tiling tiling = solver.solve(work[i]);
                if (!verify_tiling(work[i], tiling).valid) ++bad;
            }
        });
    for (auto& th : threads) th.join();
    CHECK(bad == 0);
}
