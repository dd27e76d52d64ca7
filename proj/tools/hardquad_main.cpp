// hardquad command-line runner: batch experiments over the hard-instance
// constructions, emitting CSV (or gnuplot two-column) reports.
//
// Exit codes: 0 success, 1 assertion/check failure, 2 configuration error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hardquad/config.hpp"
#include "hardquad/experiments.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
    std::string format = "csv";
};

int emit(const hardquad::ExperimentOutput& out, const CommonArgs& args, std::size_t gx,
         std::size_t gy) {
    std::string text = out.text;
    if (args.format == "gnuplot") text = hardquad::csv_to_gnuplot(out.text, gx, gy);
    if (args.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(args.out_path, std::ios::binary);
        if (!f) {
            std::cerr << "hardquad: cannot open output file " << args.out_path << "\n";
            return 2;
        }
        f << text;
    }
    if (!out.ok) std::cerr << "hardquad: " << out.message << "\n";
    return out.ok ? 0 : 1;
}

hardquad::ParsedConfig load_config(const CommonArgs& args, const std::string& section) {
    hardquad::ParsedConfig cfg;
    if (!args.config_path.empty()) {
        std::ifstream f(args.config_path, std::ios::binary);
        if (!f) throw hardquad::ConfigError("cannot read config file " + args.config_path);
        std::stringstream ss;
        ss << f.rdbuf();
        cfg = hardquad::parse_config(ss.str());
    }
    if (args.seed_set) {
        if (section == "oracle" || section == "euler")
            cfg.sections[section]["seed"] = std::to_string(args.seed);
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hard-instance constructions for SDE quadrature"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    CommonArgs args;
    app.add_option("--config", args.config_path, "configuration file (key = value sections)");
    app.add_option("--out", args.out_path, "output path (default: stdout)");
    auto* seed_opt = app.add_option("--seed", args.seed, "master seed (overrides config)");
    app.add_option("--threads", args.threads, "worker threads (affects speed only)")
        ->check(CLI::Range(1, 256));
    app.add_option("--format", args.format, "csv | gnuplot")
        ->check(CLI::IsMember({"csv", "gnuplot"}));

    auto* cmd_verify = app.add_subcommand("verify", "run the grid-certificate property suite");
    auto* cmd_oracle =
        app.add_subcommand("oracle", "direct sampling vs the exact expectation oracle");
    auto* cmd_euler = app.add_subcommand("euler", "Euler Monte Carlo error vs cost");
    auto* cmd_fool_sde = app.add_subcommand("fool-sde", "fooling adversary vs an SDE rule");
    auto* cmd_fool_quad =
        app.add_subcommand("fool-quad", "fooling adversary vs a 1-d quadrature rule");
    auto* cmd_bounds = app.add_subcommand("bounds", "tabulate the lower-bound formulas");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    args.seed_set = seed_opt->count() > 0;

    try {
        if (cmd_verify->parsed()) {
            return emit(hardquad::run_verify(load_config(args, "verify"), args.threads), args, 0,
                        2);
        }
        if (cmd_oracle->parsed()) {
            return emit(hardquad::run_oracle(load_config(args, "oracle"), args.threads), args, 1,
                        6);
        }
        if (cmd_euler->parsed()) {
            return emit(hardquad::run_euler(load_config(args, "euler"), args.threads), args, 2,
                        5);
        }
        if (cmd_fool_sde->parsed()) {
            return emit(hardquad::run_fool_sde(load_config(args, "fool-sde"), args.threads),
                        args, 0, 5);
        }
        if (cmd_fool_quad->parsed()) {
            return emit(hardquad::run_fool_quad(load_config(args, "fool-quad"), args.threads),
                        args, 0, 5);
        }
        if (cmd_bounds->parsed()) {
            return emit(hardquad::run_bounds(load_config(args, "bounds"), args.threads), args, 0,
                        2);
        }
    } catch (const hardquad::ConfigError& e) {
        std::cerr << "hardquad: config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "hardquad: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
