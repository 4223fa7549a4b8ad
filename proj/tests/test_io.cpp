#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <sys/wait.h>

#include "helpers.hpp"
#include "tromino/io.hpp"

using namespace tromino;
using tromino::io::json;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(TROMINOCUBE_BIN) + " " + args;
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("instance documents round trip") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 1 + static_cast<int>(rng() % 9);
        Instance inst = testutil::random_instance(rng, n);
        json j = io::instance_to_json(inst);
        CHECK(io::instance_from_json(json::parse(j.dump())) == inst);
    }
}

TEST_CASE("tiling documents round trip") {
    Solver solver;
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 2 + static_cast<int>(rng() % 6);
        Instance inst = testutil::random_instance(rng, n);
        auto r = solver.solve_traced(inst);
        json doc = io::tiling_to_json(r.tiling, r.trace);
        auto parsed = io::tiling_from_json(json::parse(doc.dump()));
        CHECK(parsed.tiling == r.tiling);
        CHECK(parsed.trace == r.trace);
        CHECK(io::tiling_to_json(parsed.tiling, parsed.trace) == doc);
    }
}

TEST_CASE("document parsers report context") {
    CHECK_THROWS_AS(io::instance_from_json(json::parse(R"({"n": 4})")), io::ParseError);
    CHECK_THROWS_AS(io::instance_from_json(json::parse(R"({"n": 4, "deficiencies": [[0,0]]})")),
                    io::ParseError);
    // A document violating the instance invariants fails to parse.
    CHECK_THROWS_AS(io::instance_from_json(json::parse(R"({"n": 4, "deficiencies": []})")),
                    InvalidInstance);
    CHECK_THROWS_AS(
        io::tiling_from_json(json::parse(
            R"({"instance": {"n":1,"deficiencies":[[0,0,0]]}, "pieces": [{"id": 7, "cells": []}]})")),
        io::ParseError);
}

TEST_CASE("a tampered piece is reported by the verifier, not the parser") {
    Solver solver;
    Instance inst = make_instance(4, {{1, 2, 3}});
    auto r = solver.solve_traced(inst);
    json doc = io::tiling_to_json(r.tiling, r.trace);
    // Redirect one cell of piece 0 onto a cell of piece 1: a guaranteed
    // overlap plus a gap, never a parse failure.
    doc["pieces"][0]["cells"][0] = doc["pieces"][1]["cells"][0];
    auto parsed = io::tiling_from_json(doc);
    auto report = verify_tiling(parsed.tiling.instance, parsed.tiling);
    CHECK_FALSE(report.valid);
}

TEST_CASE("layer rendering shows every cell exactly once") {
    Solver solver;
    Instance inst = make_instance(5, {{0, 0, 0}, {2, 2, 2}});
    Tiling t = solver.solve(inst);
    std::string text = io::render_layers(t);

    int dots = 0;
    std::istringstream is(text);
    std::string line;
    int rows = 0;
    std::vector<long long> seen;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == 'z') continue;
        ++rows;
        std::istringstream ls(line);
        std::string tok;
        int cols = 0;
        while (ls >> tok) {
            ++cols;
            if (tok == "·")
                ++dots;
            else
                seen.push_back(std::stoll(tok));
        }
        CHECK(cols == 5);
    }
    CHECK(rows == 25);
    CHECK(dots == 2);
    // Each piece id appears exactly three times.
    std::map<long long, int> freq;
    for (long long id : seen) ++freq[id];
    CHECK(freq.size() == t.placements.size());
    for (const auto& [id, count] : freq) {
        CHECK(id >= 1);
        CHECK(id <= static_cast<long long>(t.placements.size()));
        CHECK(count == 3);
    }
}

TEST_CASE("voxel export is a consistent PLY mesh") {
    Solver solver;
    Tiling t = solver.solve(make_instance(4, {{0, 0, 0}}));
    std::string ply = io::render_voxel_ply(t);
    std::istringstream is(ply);
    std::string line;
    std::getline(is, line);
    CHECK(line == "ply");
    std::size_t vertex_count = 0, face_count = 0;
    while (std::getline(is, line) && line != "end_header") {
        std::istringstream ls(line);
        std::string a, b;
        ls >> a >> b;
        if (a == "element" && b == "vertex") ls >> vertex_count;
        if (a == "element" && b == "face") ls >> face_count;
    }
    const std::size_t cells = t.placements.size() * 3 + 1;
    CHECK(vertex_count == cells * 8);
    CHECK(face_count == cells * 6);
    std::size_t body_lines = 0;
    while (std::getline(is, line)) ++body_lines;
    CHECK(body_lines == vertex_count + face_count);
}

TEST_CASE("run_solve emits a verified document") {
    io::SolveArgs args;
    args.n = 5;
    args.deficiencies = {{0, 0, 0}, {4, 4, 4}};
    std::istringstream in;
    std::ostringstream out, err;
    CHECK(io::run_solve(args, in, out, err) == io::kExitOk);
    auto parsed = io::tiling_from_json(json::parse(out.str()));
    CHECK(parsed.tiling.placements.size() == 41);

    io::VerifyArgs vargs;
    std::istringstream vin(out.str());
    std::ostringstream vout, verr;
    CHECK(io::run_verify(vargs, vin, vout, verr) == io::kExitOk);
}

TEST_CASE("run_solve rejects a wrong deficiency count") {
    io::SolveArgs args;
    args.n = 5;
    args.deficiencies = {{0, 0, 0}};
    std::istringstream in;
    std::ostringstream out, err;
    CHECK(io::run_solve(args, in, out, err) == io::kExitInvalidInstance);
}

TEST_CASE("run_solve reads an instance document from stdin") {
    io::SolveArgs args;
    args.input = "-";
    args.format = "layers";
    std::istringstream in(R"({"n": 4, "deficiencies": [[2,1,0]]})");
    std::ostringstream out, err;
    CHECK(io::run_solve(args, in, out, err) == io::kExitOk);
    CHECK(out.str().find("·") != std::string::npos);

    std::istringstream garbage("{nope");
    std::ostringstream out2, err2;
    io::SolveArgs bad;
    bad.input = "-";
    CHECK(io::run_solve(bad, garbage, out2, err2) == io::kExitUsage);
}

TEST_CASE("run_verify flags an invalid document with exit 3") {
    Solver solver;
    auto r = solver.solve_traced(make_instance(4, {{0, 0, 0}}));
    json doc = io::tiling_to_json(r.tiling, r.trace);
    doc["pieces"][2]["cells"][0] = json::array({3, 3, 3});
    io::VerifyArgs args;
    std::istringstream in(doc.dump());
    std::ostringstream out, err;
    CHECK(io::run_verify(args, in, out, err) == io::kExitVerification);
    auto report = json::parse(out.str());
    CHECK(report["valid"] == false);
    CHECK_FALSE(report["violations"].empty());
}

TEST_CASE("run_sweep covers classes and randoms") {
    std::ostringstream out, err;
    io::SweepArgs args;
    args.n = 4;
    args.mode = "classes";
    CHECK(io::run_sweep(args, out, err) == io::kExitOk);
    auto report = json::parse(out.str());
    CHECK(report["attempted"] == 4);
    CHECK(report["solved"] == 4);

    std::ostringstream out2, err2;
    args.mode = "random";
    args.count = 25;
    args.seed = 9;
    CHECK(io::run_sweep(args, out2, err2) == io::kExitOk);
    auto report2 = json::parse(out2.str());
    CHECK(report2["solved"] == 25);
}

TEST_CASE("run_classify2d emits the 9-cell set for m=5") {
    std::ostringstream out, err;
    CHECK(io::run_classify2d({5}, out, err) == io::kExitOk);
    auto report = json::parse(out.str());
    std::set<int> ids(report["ids"].begin(), report["ids"].end());
    CHECK(ids == std::set<int>{1, 3, 5, 11, 13, 15, 21, 23, 25});
    CHECK(io::run_classify2d({9}, out, err) == io::kExitUsage);
}

TEST_CASE("cli binary end to end") {
    fs::path doc = temp_file("tromino_cli_t6.json");
    fs::path layers = temp_file("tromino_cli_t6.txt");

    CHECK(run_cli("solve --n 6 --output " + doc.string()) == 0);
    CHECK(run_cli("verify " + doc.string()) == 0);
    CHECK(run_cli("solve --n 5 --deficiency 0,0,0 --deficiency 4,4,4 --format layers --output " +
                  layers.string()) == 0);
    CHECK(fs::file_size(layers) > 0);

    // Wrong deficiency count: invalid instance.
    CHECK(run_cli("solve --n 5 --deficiency 0,0,0 --output /dev/null 2>/dev/null") == 2);
    // Unknown flag: usage.
    CHECK(run_cli("solve --frobnicate 2>/dev/null") == 1);
    // No subcommand: usage.
    CHECK(run_cli("2>/dev/null") == 1);

    // Tamper with the tiling document: verify exits 3.
    {
        std::ifstream in(doc);
        json j = json::parse(in);
        j["pieces"][0]["cells"][0] = json::array({5, 5, 5});
        std::ofstream out(doc, std::ios::trunc);
        out << j.dump();
    }
    CHECK(run_cli("verify " + doc.string() + " >/dev/null") == 3);

    // Sweep with a persistent cache directory.
    fs::path cache = temp_file("tromino_cli_cache");
    fs::remove_all(cache);
    CHECK(run_cli("sweep --n 4 --all --cache-dir " + cache.string() + " >/dev/null") == 0);
    CHECK_FALSE(fs::is_empty(cache));
    CHECK(run_cli("classify2d --m 2 >/dev/null") == 0);

    // The cache directory can come from the environment instead.
    fs::path env_cache = temp_file("tromino_cli_env_cache");
    fs::remove_all(env_cache);
    int status = std::system(("TROMINO_CACHE_DIR=" + env_cache.string() + " " + TROMINOCUBE_BIN +
                              " solve --n 4 --deficiency 0,0,0 >/dev/null")
                                 .c_str());
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(env_cache));
    CHECK_FALSE(fs::is_empty(env_cache));

    // Voxel export through the binary.
    fs::path ply = temp_file("tromino_cli_t4.ply");
    CHECK(run_cli("solve --n 4 --deficiency 1,1,1 --format voxel --output " + ply.string()) == 0);
    {
        std::ifstream f(ply);
        std::string first;
        std::getline(f, first);
        CHECK(first == "ply");
    }

    fs::remove(doc);
    fs::remove(layers);
    fs::remove(ply);
    fs::remove_all(cache);
    fs::remove_all(env_cache);
}
