#pragma once

// Batch experiment runners behind the CLI subcommands.  Each runner maps a
// parsed configuration to a CSV document; outputs are deterministic
// functions of (config, seed) and independent of the thread count.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "hardquad/adversary.hpp"
#include "hardquad/config.hpp"
#include "hardquad/csv.hpp"
#include "hardquad/growth.hpp"
#include "hardquad/sde.hpp"
#include "hardquad/verify.hpp"

namespace hardquad {

struct ExperimentOutput {
    std::string text;
    bool ok = true;          // false -> CLI exits 1
    std::string message;     // failure summary
};

// ---------------------------------------------------------------------------
// named catalog pieces

inline GrowthFn make_named_u(const std::string& name) {
    if (name == "exp-cubic") return make_exp_cubic_u();
    if (name == "identity") return make_identity_u();
    if (name == "affine") return make_affine_u(1.0, 1.0);
    if (name.rfind("lin-n:", 0) == 0) {
        const int n = std::stoi(name.substr(6));
        return build_u_lin_n(n, 1.0);
    }
    throw ConfigError("unknown growth function '" + name + "'");
}

// v_easy: smooth, positive, bounded by 1 with derivative below 4 e^{-2};
// lies in V_u for every nonnegative u.
inline SmoothScalarFn make_v_easy() {
    auto f = MollifierEta(0.0, 1.0).as_fn();
    f.label = "v_easy";
    return f;
}

inline SmoothScalarFn make_named_v(const std::string& name, const GrowthFn& u, double delta,
                                   double x_delta, int n, double tol) {
    if (name == "easy") return make_v_easy();
    if (name == "zero") return zero_fn();
    if (name == "vn") {
        const auto adm = GrowthAdmissibility::make(u, delta, x_delta);
        return build_v_n(adm, u, n, tol).as_fn();
    }
    throw ConfigError("unknown v selection '" + name + "'");
}

// The five pinned oracle instances plus the hard demo instance.
inline SdeInstance make_named_instance(const std::string& name, double tol = 1e-10) {
    const GrowthFn u = make_exp_cubic_u();
    if (name == "zero") return make_instance(zero_fn(), make_v_easy(), u, tol, "zero");
    if (name == "easy") {
        auto fam = build_bump_family_sde(1, tol);
        return make_instance(fam.members[0], make_v_easy(), u, tol, "easy");
    }
    if (name == "const") {
        auto fam = build_bump_family_sde(1, tol);
        return make_instance(fam.members[0], constant_fn(0.7, "v=0.7"), u, tol, "const");
    }
    if (name == "neg") {
        auto fam = build_bump_family_sde(1, tol);
        return make_instance(negate_fn(fam.members[0]), make_v_easy(), u, tol, "neg");
    }
    if (name == "plateau2") {
        auto fam = build_bump_family_sde(5, tol);
        auto v = MollifierEta(1.0, 2.0).as_fn();
        v.label = "v=eta_{1,2}";
        return make_instance(fam.members[2], v, u, tol, "plateau2");
    }
    if (name == "hard") {
        auto fam = build_bump_family_sde(17, tol);
        const auto adm = GrowthAdmissibility::make(u, 1.0, 1.0);
        return make_instance(fam.members[0], build_v_n(adm, u, 1, tol).as_fn(), u, tol, "hard");
    }
    throw ConfigError("unknown instance '" + name + "'");
}

inline const std::vector<std::string>& pinned_oracle_instances() {
    static const std::vector<std::string> names = {"zero", "easy", "const", "neg", "plateau2"};
    return names;
}

// Built-in deterministic node rules on an interval (lo, hi): `equidistant`
// places k interior points evenly, `midpoint` uses panel midpoints,
// `gauss-like` uses Chebyshev points, `empty` places none, and `file:PATH`
// reads one node per line (the interval is ignored).
inline std::vector<double> make_rule_nodes(const std::string& rule, int k, double lo, double hi) {
    std::vector<double> nodes;
    if (rule.rfind("file:", 0) == 0) {
        const std::string path = rule.substr(5);
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot read node file '" + path + "'");
        double x;
        while (f >> x) nodes.push_back(x);
        return nodes;
    }
    if (rule == "empty" || k <= 0) return nodes;
    nodes.reserve(static_cast<std::size_t>(k));
    if (rule == "equidistant") {
        for (int j = 1; j <= k; ++j) nodes.push_back(lo + (hi - lo) * j / (k + 1));
    } else if (rule == "midpoint") {
        for (int j = 0; j < k; ++j) nodes.push_back(lo + (hi - lo) * (j + 0.5) / k);
    } else if (rule == "gauss-like") {
        for (int j = 1; j <= k; ++j) {
            const double c = std::cos((2.0 * j - 1.0) / (2.0 * k) * M_PI);
            nodes.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * c);
        }
    } else {
        throw ConfigError("unknown rule '" + rule + "'");
    }
    return nodes;
}

// ---------------------------------------------------------------------------
// runners

inline ExperimentOutput run_verify(const ParsedConfig& cfg, int /*threads*/) {
    const double tol = cfg.get_double("verify", "quad_tol", 1e-10);
    const int grid = static_cast<int>(cfg.get_int("verify", "grid_points", 10000));
    const auto rows = run_verification_suite(tol, grid);
    CsvWriter csv({"check", "status", "value", "bound_lo", "bound_hi", "detail"});
    bool all_pass = true;
    for (const auto& r : rows) {
        all_pass = all_pass && r.pass;
        csv.row({r.name, r.pass ? "pass" : "FAIL", cell(r.value), cell(r.bound_lo),
                 cell(r.bound_hi), r.detail});
    }
    return {csv.text(), all_pass, all_pass ? "" : "verification checks failed"};
}

inline ExperimentOutput run_oracle(const ParsedConfig& cfg, int threads) {
    (void)threads;  // direct sampling is cheap enough single-threaded
    const auto samples = static_cast<std::size_t>(cfg.get_int("oracle", "samples", 1000000));
    const std::uint64_t seed = cfg.get_u64("oracle", "seed", 20260809);
    const double tol = cfg.get_double("oracle", "quad_tol", 1e-10);
    CsvWriter csv({"instance", "samples", "exact", "exact_err_bound", "mc_mean", "mc_stderr",
                   "abs_diff", "four_stderr", "status"});
    bool ok = true;
    std::uint64_t stream_base = 0;
    for (const auto& name : pinned_oracle_instances()) {
        const auto inst = make_named_instance(name, tol);
        const auto exact = exact_expectation(inst);
        std::vector<double> draws(samples);
        for (std::size_t i = 0; i < samples; ++i) {
            RngStream rng(seed, stream_base + i);
            draws[i] = direct_sample(inst, rng);
        }
        stream_base += samples;
        const auto st = mean_and_stderr(draws);
        const double diff = std::abs(st.mean - exact.value);
        const bool pass = diff <= 4.0 * st.std_error + exact.error_bound;
        ok = ok && pass;
        csv.row({name, cell(static_cast<std::uint64_t>(samples)), cell(exact.value),
                 cell(exact.error_bound), cell(st.mean), cell(st.std_error), cell(diff),
                 cell(4.0 * st.std_error), pass ? "pass" : "FAIL"});
    }
    return {csv.text(), ok, ok ? "" : "oracle consistency failed"};
}

inline ExperimentOutput run_euler(const ParsedConfig& cfg, int threads) {
    const auto steps = cfg.get_int_list("euler", "steps", {64, 256, 1024});
    const int reps = static_cast<int>(cfg.get_int("euler", "replications", 100000));
    const std::string instance = cfg.get("euler", "instance", "easy");
    const std::uint64_t seed = cfg.get_u64("euler", "seed", 20260809);
    const double tol = cfg.get_double("euler", "quad_tol", 1e-10);
    const std::string u_name = cfg.get("euler", "u", "exp-cubic");
    const double delta = cfg.get_double("euler", "delta", 1.0);
    const double x_delta = cfg.get_double("euler", "x_delta", 1.0);

    const auto inst = make_named_instance(instance, tol);
    const auto exact = exact_expectation(inst);
    const GrowthFn u = make_named_u(u_name);

    CsvWriter csv({"n_steps", "replications", "cost", "estimate", "exact", "abs_error",
                   "std_error", "theorem_bound_logspace"});
    for (int n : steps) {
        McConfig mc{n, reps, seed};
        const auto est = mc_euler_estimate(inst, mc, threads);
        // the bound's budget is the rule's total evaluation count
        const int budget = static_cast<int>(std::min<std::uint64_t>(est.cost, 1000000000ULL));
        double bound_log;
        try {
            bound_log = theorem_bound_sde_log(u, delta, x_delta, budget);
        } catch (const GrowthInversionError&) {
            bound_log = std::numeric_limits<double>::quiet_NaN();
        }
        csv.row({cell(n), cell(reps), cell(est.cost), cell(est.estimate), cell(exact.value),
                 cell(std::abs(est.estimate - exact.value)), cell(est.std_error),
                 cell(bound_log)});
    }
    return {csv.text(), true, ""};
}

inline ExperimentOutput run_fool_sde(const ParsedConfig& cfg, int /*threads*/) {
    const auto n_list = cfg.get_int_list("fool-sde", "n", {1, 2});
    const std::string rule = cfg.get("fool-sde", "rule", "equidistant");
    const std::string v_name = cfg.get("fool-sde", "v", "easy");
    const double tol = cfg.get_double("fool-sde", "quad_tol", 1e-10);
    const std::string u_name = cfg.get("fool-sde", "u", "exp-cubic");
    const double delta = cfg.get_double("fool-sde", "delta", 1.0);
    const double x_delta = cfg.get_double("fool-sde", "x_delta", 1.0);
    const GrowthFn u = make_named_u(u_name);

    CsvWriter csv({"n", "m", "touched", "J", "epsilon", "measured_gap", "det_bound",
                   "ran_bound", "status"});
    bool ok = true;
    for (int n : n_list) {
        const auto v = make_named_v(v_name, u, delta, x_delta, n, tol);
        const int m = 17 * n;
        auto nodes = make_rule_nodes(rule, n, 0.0, 0.5);
        std::vector<Vec4> node4;
        node4.reserve(nodes.size());
        for (double x : nodes) node4.push_back(Vec4{0.0, 0.0, 0.0, x});
        auto strategy = fixed_node_strategy<Vec4, SdeTowerAnswer>(node4);
        const auto rep = fool_deterministic_sde_rule(strategy, n, v, u, tol);
        const double det_bound = static_cast<double>(rep.untouched.size()) * rep.epsilon;
        const bool pass = rep.measured_gap >= det_bound - 1e-8;
        ok = ok && pass;
        csv.row({cell(n), cell(m), cell(static_cast<int>(m - rep.untouched.size())),
                 cell(static_cast<int>(rep.untouched.size())), cell(rep.epsilon),
                 cell(rep.measured_gap), cell(det_bound), cell(rep.bound_value),
                 pass ? "pass" : "FAIL"});
    }
    return {csv.text(), ok, ok ? "" : "fooling gap below |J| * epsilon"};
}

inline ExperimentOutput run_fool_quad(const ParsedConfig& cfg, int /*threads*/) {
    const auto n_list = cfg.get_int_list("fool-quad", "n", {2, 4});
    const std::string rule = cfg.get("fool-quad", "rule", "equidistant");
    const double tol = cfg.get_double("fool-quad", "quad_tol", 1e-10);
    const std::string u_name = cfg.get("fool-quad", "u", "affine");
    const GrowthFn u = make_named_u(u_name);

    CsvWriter csv({"n", "m", "touched", "J", "epsilon", "measured_gap", "det_bound",
                   "ran_bound", "status"});
    bool ok = true;
    for (int n : n_list) {
        const auto fam = build_bump_family_1d(n, u);
        const auto nodes =
            make_rule_nodes(rule, n, fam.support_start, fam.support_start + 2.0);
        const auto rep = fool_deterministic_quadrature(nodes, n, u, tol);
        const double floor = static_cast<double>(rep.untouched.size()) * rep.epsilon;
        const bool pass = rep.integrand_gap >= floor - 1e-8;
        ok = ok && pass;
        csv.row({cell(n), cell(rep.m), cell(static_cast<int>(rep.m - rep.untouched.size())),
                 cell(static_cast<int>(rep.untouched.size())), cell(rep.epsilon),
                 cell(rep.integrand_gap), cell(rep.bound_value),
                 rep.ran_bound ? cell(*rep.ran_bound) : std::string(""),
                 pass ? "pass" : "FAIL"});
    }
    return {csv.text(), ok, ok ? "" : "fooling gap below |J| * epsilon"};
}

inline ExperimentOutput run_bounds(const ParsedConfig& cfg, int /*threads*/) {
    const auto n_list = cfg.get_int_list("bounds", "n", {1, 2, 4, 8, 16});
    const std::string u_name = cfg.get("bounds", "u", "exp-cubic");
    const double delta = cfg.get_double("bounds", "delta", 1.0);
    const double x_delta = cfg.get_double("bounds", "x_delta", 1.0);
    const bool proof_constant = cfg.get_bool("bounds", "proof_constant", false);
    const GrowthFn u = make_named_u(u_name);

    CsvWriter csv({"n", "sde_bound", "sde_bound_log", "oneD_bound", "oneD_bound_log", "status"});
    for (int n : n_list) {
        std::string status = "ok";
        double sde_log = std::numeric_limits<double>::quiet_NaN();
        double oned_log = std::numeric_limits<double>::quiet_NaN();
        try {
            sde_log = theorem_bound_sde_log(u, delta, x_delta, n, proof_constant);
        } catch (const GrowthInversionError&) {
            status = "sde_inversion_failure";
        }
        try {
            oned_log = theorem_bound_1d_log(u, n);
        } catch (const GrowthInversionError&) {
            status = status == "ok" ? "oneD_inversion_failure" : "both_inversion_failure";
        }
        csv.row({cell(n), cell(std::exp(sde_log)), cell(sde_log), cell(std::exp(oned_log)),
                 cell(oned_log), status});
    }
    return {csv.text(), true, ""};
}

// gnuplot-ready two-column variant: "# x y" header then the experiment's
// primary pair per row.
inline std::string csv_to_gnuplot(const std::string& csv_text, std::size_t x_col,
                                  std::size_t y_col) {
    std::string out = "# x y\n";
    std::size_t start = 0;
    bool header = true;
    while (start < csv_text.size()) {
        const std::size_t end = csv_text.find('\n', start);
        const std::string line = csv_text.substr(start, end - start);
        start = end == std::string::npos ? csv_text.size() : end + 1;
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> cells = config_detail::split(line, ',');
        if (x_col < cells.size() && y_col < cells.size())
            out += cells[x_col] + " " + cells[y_col] + "\n";
    }
    return out;
}

}  // namespace hardquad
