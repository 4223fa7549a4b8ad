// trominocube: tile deficient cubes with 3D L-trominoes, verify tilings,
// run sweeps and classify deficient squares.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tromino/io.hpp"

namespace {

tromino::Cell parse_cell_flag(const std::string& s) {
    tromino::Cell c;
    char extra = 0;
    if (std::sscanf(s.c_str(), "%d,%d,%d%c", &c.x, &c.y, &c.z, &extra) != 3)
        throw CLI::ValidationError("--deficiency", "expected x,y,z");
    return c;
}

std::string resolve_cache_dir(const std::string& flag, bool no_cache) {
    if (no_cache) return "";
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("TROMINO_CACHE_DIR")) return env;
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact tromino tilings of deficient cubes"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "Tile one instance");
    int n = 0;
    std::vector<std::string> deficiency_flags;
    std::string input, format = "json", output, cache_dir;
    bool no_cache = false;
    solve->add_option("--n", n, "Cube side length");
    solve->add_option("--deficiency", deficiency_flags, "Deficiency cell as x,y,z (repeatable)");
    solve->add_option("--input", input, "Instance document (json), '-' for stdin");
    solve->add_option("--format", format, "Output format: json | layers | voxel")
        ->check(CLI::IsMember({"json", "layers", "voxel"}));
    solve->add_option("--output", output, "Output path (default stdout)");
    solve->add_option("--cache-dir", cache_dir, "Witness cache directory");
    solve->add_flag("--no-cache", no_cache, "Disable the persistent witness cache");

    // verify
    auto* verify = app.add_subcommand("verify", "Check a tiling document");
    std::string verify_input = "-";
    verify->add_option("input", verify_input, "Tiling document (json), '-' for stdin");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Solve every (or sampled) deficiency placement");
    int sweep_n = 0;
    bool sweep_all = false, sweep_classes = false;
    int sweep_random = 0;
    std::uint64_t sweep_seed = 1;
    std::string sweep_cache_dir;
    bool sweep_no_cache = false;
    sweep->add_option("--n", sweep_n, "Cube side length")->required();
    sweep->add_flag("--all", sweep_all, "Every deficiency placement");
    sweep->add_flag("--classes", sweep_classes, "One representative per symmetry class");
    sweep->add_option("--random", sweep_random, "K random placements");
    sweep->add_option("--seed", sweep_seed, "Seed for --random");
    sweep->add_option("--cache-dir", sweep_cache_dir, "Witness cache directory");
    sweep->add_flag("--no-cache", sweep_no_cache, "Disable the persistent witness cache");

    // classify2d
    auto* classify = app.add_subcommand("classify2d", "Tileable deficiency cells of an m x m square");
    int m = 0;
    classify->add_option("--m", m, "Square side (<= 7)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? tromino::io::kExitOk : tromino::io::kExitUsage;
    }

    try {
        if (solve->parsed()) {
            tromino::io::SolveArgs args;
            if (solve->count("--n")) args.n = n;
            for (const std::string& s : deficiency_flags)
                args.deficiencies.push_back(parse_cell_flag(s));
            args.input = input;
            args.format = format;
            args.output = output;
            args.cache.directory = resolve_cache_dir(cache_dir, no_cache);
            return tromino::io::run_solve(args, std::cin, std::cout, std::cerr);
        }
        if (verify->parsed()) {
            tromino::io::VerifyArgs args;
            args.input = verify_input;
            return tromino::io::run_verify(args, std::cin, std::cout, std::cerr);
        }
        if (sweep->parsed()) {
            tromino::io::SweepArgs args;
            args.n = sweep_n;
            if (sweep_all + sweep_classes + (sweep_random > 0) != 1) {
                std::cerr << "pick exactly one of --all, --classes, --random K\n";
                return tromino::io::kExitUsage;
            }
            args.mode = sweep_all ? "all" : sweep_classes ? "classes" : "random";
            args.count = sweep_random;
            args.seed = sweep_seed;
            args.cache.directory = resolve_cache_dir(sweep_cache_dir, sweep_no_cache);
            return tromino::io::run_sweep(args, std::cout, std::cerr);
        }
        tromino::io::Classify2dArgs args;
        args.m = m;
        return tromino::io::run_classify2d(args, std::cout, std::cerr);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return tromino::io::kExitUsage;
    } catch (const tromino::InvalidInstance& e) {
        std::cerr << "invalid instance: " << e.what() << "\n";
        return tromino::io::kExitInvalidInstance;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return tromino::io::kExitVerification;
    }
}
