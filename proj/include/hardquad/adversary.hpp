#pragma once

// Fooling-set adversaries and the analytic lower-bound formulas.
//
// The SDE pipeline builds 17n disjoint sign pairs (+-h_i, v) whose
// functional gap epsilon is measured through the exact expectation oracle;
// any deterministic rule with few queries misses most supports, and
// flipping signs on the untouched set produces two instances the rule
// cannot distinguish.  The 1-d pipeline plays the same game for Gaussian
// quadrature of sin(sum h_{i,+-}).  Bound formulas are exposed in linear
// and log space; the hard constructions underflow doubles in linear space.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardquad/growth.hpp"
#include "hardquad/infoalg.hpp"
#include "hardquad/quadrature.hpp"
#include "hardquad/sde.hpp"
#include "hardquad/smoothfn.hpp"

namespace hardquad {

// ---------------------------------------------------------------------------
// bound formulas

// randomized lower bound from the 2m-pair fooling family:
// ((m - 16n) / (8m)) * eps; may be non-positive (vacuous), callers interpret.
inline double prop1_bound(int m, int n, double eps) {
    return (static_cast<double>(m) - 16.0 * static_cast<double>(n)) * eps /
           (8.0 * static_cast<double>(m));
}

inline double prop1_bound_log(int m, int n, double log_eps) {
    const double factor = static_cast<double>(m) - 16.0 * static_cast<double>(n);
    if (!(factor > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(factor / (8.0 * static_cast<double>(m))) + log_eps;
}

struct Prop2Bounds {
    double det = 0.0;
    std::optional<double> ran;  // present only when n <= m/4
};

// additive-family bounds: deterministic ((m-n)/2) eps, randomized
// sqrt((m-4n)/128) eps for n <= m/4.
inline Prop2Bounds prop2_bounds(int m, int n, double eps) {
    Prop2Bounds b;
    b.det = (static_cast<double>(m) - static_cast<double>(n)) / 2.0 * eps;
    if (4 * n <= m) {
        b.ran = std::sqrt((static_cast<double>(m) - 4.0 * static_cast<double>(n)) / 128.0) * eps;
    }
    return b;
}

// Exhaustive check of the Khintchine inequality with constant 2^{-1/2}:
// sum over all sign vectors of |sum_i delta_i a_i| >= 2^{k-1/2} (sum a_i^2)^{1/2}.
inline bool khintchine_verify(std::span<const double> a) {
    const std::size_t k = a.size();
    if (k == 0 || k > 12)
        throw std::invalid_argument("khintchine_verify: vector length must be in [1, 12]");
    double lhs = 0.0;
    for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) s += (mask >> i & 1) ? a[i] : -a[i];
        lhs += std::abs(s);
    }
    double sq = 0.0;
    for (double x : a) sq += x * x;
    const double rhs = std::pow(2.0, static_cast<double>(k) - 0.5) * std::sqrt(sq);
    return lhs >= rhs * (1.0 - 1e-12);
}

inline double theorem_sde_prefactor() {
    return 1.0 / (17.0 * 128.0 * std::exp(1.0) * std::sqrt(M_PI));
}

// Lower bound for the class E_u at budget n:
//   prefactor * exp(-2^13 * (u^{-1}(17^2 * 56^4 * kappa_delta^2 * n^4))^2).
// The chain through beta_n <= (17/4)(102n)^2 actually yields 17^2 * 51^4;
// `proof_constant` switches to that variant.
inline double theorem_bound_sde_log(const GrowthFn& u, double delta, double x_delta, int n,
                                    bool proof_constant = false, double inv_tol = 1e-10) {
    const double kappa = 8.0 / std::sqrt(delta) * std::max(u.eval(x_delta + 1.0), 1.0);
    const double base = proof_constant ? 51.0 : 56.0;
    const double factor = 17.0 * 17.0 * base * base * base * base;
    const double n4 = static_cast<double>(n) * n * n * n;
    const double arg = factor * kappa * kappa * n4;
    const double xstar = invert_growth(u, arg, inv_tol);
    return std::log(theorem_sde_prefactor()) - 8192.0 * xstar * xstar;
}

inline double theorem_bound_sde(const GrowthFn& u, double delta, double x_delta, int n,
                                bool proof_constant = false, double inv_tol = 1e-10) {
    return std::exp(theorem_bound_sde_log(u, delta, x_delta, n, proof_constant, inv_tol));
}

inline double theorem_1d_prefactor() {
    return std::sqrt(2.0) * std::sin(1.0 / 12.0) * std::exp(-4.0) / (6.0 * std::sqrt(M_PI));
}

// Deterministic lower bound for the class F_u at budget n:
//   prefactor * exp(-(u^{-1}(max(n, u(0))))^2).
inline double theorem_bound_1d_log(const GrowthFn& u, int n, double inv_tol = 1e-10) {
    const double z = std::max(static_cast<double>(n), u.eval(0.0));
    const double xstar = invert_growth(u, z, inv_tol);
    return std::log(theorem_1d_prefactor()) - xstar * xstar;
}

inline double theorem_bound_1d(const GrowthFn& u, int n, double inv_tol = 1e-10) {
    return std::exp(theorem_bound_1d_log(u, n, inv_tol));
}

// ---------------------------------------------------------------------------
// answer encodings for the queried derivative towers

// Order-<=1 tower of (a, b, f) at a 4-point; higher derivatives of the bump
// pieces are nonzero only on the bump supports, which the truncation flag
// records (the adversary argument needs support membership only).
struct SdeTowerAnswer {
    Vec4 a{};
    std::array<Vec4, 4> da{};  // da[i][j] = d a_j / d x_{i+1}
    Vec4 b{};
    std::array<Vec4, 4> db{};
    double f = 0.0;
    Vec4 df{};
    bool higher_only_on_support = true;

    bool operator==(const SdeTowerAnswer&) const = default;
};

struct OneDTowerAnswer {
    double h = 0.0;
    double dh = 0.0;
    bool higher_only_on_support = true;

    bool operator==(const OneDTowerAnswer&) const = default;
};

namespace detail {

// h = sum_i sign_i h_i over the family (disjoint supports)
inline double family_sum_value(const BumpFamilySde& fam, std::span<const int> signs, double x) {
    double s = 0.0;
    for (int i = 0; i < fam.m; ++i) s += signs[i] * fam.members[i].value(x);
    return s;
}
inline double family_sum_deriv(const BumpFamilySde& fam, std::span<const int> signs, double x) {
    double s = 0.0;
    for (int i = 0; i < fam.m; ++i) s += signs[i] * fam.members[i].deriv(x);
    return s;
}

}  // namespace detail

// Oracle for the input (a^{h,v}, b, pi_1) with h = sum_i sign_i h_i.
inline QueryableInput<Vec4, SdeTowerAnswer> make_sde_tower_input(
    std::shared_ptr<const BumpFamilySde> fam, std::vector<int> signs, SmoothScalarFn v,
    std::string tag) {
    auto sv = std::make_shared<std::vector<int>>(std::move(signs));
    auto vf = std::make_shared<SmoothScalarFn>(std::move(v));
    QueryableInput<Vec4, SdeTowerAnswer> in;
    in.tag = std::move(tag);
    in.query = [fam, sv, vf](const Vec4& x) {
        SdeTowerAnswer ans;
        const double h = detail::family_sum_value(*fam, *sv, x[3]);
        const double hp = detail::family_sum_deriv(*fam, *sv, x[3]);
        const double ratio = x[2] / (1.0 + x[2] * x[2]);
        const double arg = ratio * vf->value(x[1]);
        const double r2 = rho2(x[3]);
        const double r3 = rho3(arg);
        const double r3p = rho3_deriv(arg);
        ans.a = {r2 * r3, 0.0, h, 1.0};
        ans.da[1] = {r2 * ratio * vf->deriv(x[1]) * r3p, 0.0, 0.0, 0.0};
        ans.da[2] = {r2 * (1.0 - x[2] * x[2]) / ((1.0 + x[2] * x[2]) * (1.0 + x[2] * x[2])) *
                         vf->value(x[1]) * r3p,
                     0.0, 0.0, 0.0};
        ans.da[3] = {rho2_deriv(x[3]) * r3, 0.0, hp, 0.0};
        ans.b = {0.0, rho1(x[3]), 0.0, 0.0};
        ans.db[3] = {0.0, rho1_deriv(x[3]), 0.0, 0.0};
        ans.f = x[0];
        ans.df = {1.0, 0.0, 0.0, 0.0};
        return ans;
    };
    return in;
}

inline QueryableInput<double, OneDTowerAnswer> make_1d_tower_input(
    std::shared_ptr<const BumpFamily1d> fam, std::vector<int> signs, std::string tag) {
    auto sv = std::make_shared<std::vector<int>>(std::move(signs));
    QueryableInput<double, OneDTowerAnswer> in;
    in.tag = std::move(tag);
    in.query = [fam, sv](const double& x) {
        OneDTowerAnswer ans;
        for (std::size_t i = 0; i < fam->plus.size(); ++i) {
            ans.h += (*sv)[i] * fam->plus[i].value(x);
            ans.dh += (*sv)[i] * fam->plus[i].deriv(x);
        }
        return ans;
    };
    return in;
}

// ---------------------------------------------------------------------------
// SDE fooling pipeline

struct FoolingReportSde {
    int n = 0;          // algorithm budget
    int m = 0;          // family size (17n unless overridden)
    std::shared_ptr<const BumpFamilySde> family;
    SmoothScalarFn v;
    double epsilon = 0.0;      // common pair gap S(g_{i,+}) - S(g_{i,-})
    double epsilon_err = 0.0;
    double log_epsilon = -std::numeric_limits<double>::infinity();
    double bound_value = 0.0;      // prop1_bound(m, n, epsilon)
    double log_bound_value = -std::numeric_limits<double>::infinity();
    bool vacuous = false;

    // filled by fool_deterministic_sde_rule
    std::vector<Vec4> rule_nodes;
    std::vector<int> untouched;  // 1-based indices of J
    double measured_gap = std::numeric_limits<double>::quiet_NaN();
    double s_g = std::numeric_limits<double>::quiet_NaN();
    double s_h = std::numeric_limits<double>::quiet_NaN();
    std::optional<SdeInstance> g_instance;  // all-plus
    std::optional<SdeInstance> h_instance;  // signs flipped on J
};

namespace detail {

inline SdeInstance make_family_instance(std::shared_ptr<const BumpFamilySde> fam,
                                        std::span<const int> signs, const SmoothScalarFn& v,
                                        const GrowthFn& u, double tol, std::string name) {
    std::vector<int> s(signs.begin(), signs.end());
    SmoothScalarFn h;
    h.value = [fam, s](double x) { return family_sum_value(*fam, s, x); };
    h.deriv = [fam, s](double x) { return family_sum_deriv(*fam, s, x); };
    h.sup_bound = fam->members.empty() ? 0.0 : fam->members.front().sup_bound;
    h.deriv_sup_bound = fam->members.empty() ? 0.0 : fam->members.front().deriv_sup_bound;
    h.label = std::move(name);
    return make_instance(h, v, u, tol, h.label);
}

}  // namespace detail

// Builds the m = 17n pair family against v, measures the common gap through
// the expectation oracle (in linear and log space) and evaluates the
// randomized lower bound.
inline FoolingReportSde build_fooling_sde(int n, const SmoothScalarFn& v, const GrowthFn& u,
                                          double tol = 1e-10, int m_override = 0,
                                          double log_half_width = 16.0) {
    if (n < 1) throw std::invalid_argument("build_fooling_sde: n must be >= 1");
    FoolingReportSde rep;
    rep.n = n;
    rep.m = m_override > 0 ? m_override : 17 * n;
    rep.family = std::make_shared<const BumpFamilySde>(build_bump_family_sde(rep.m, tol));
    rep.v = v;

    // per-pair gaps; identical across i because the h_i share their integral
    double eps1 = 0.0;
    for (int i = 1; i <= rep.m; ++i) {
        auto inst = make_instance(rep.family->members[i - 1], v, u, tol,
                                  "pair_" + std::to_string(i));
        const auto plus = exact_expectation(inst);
        auto inst_minus = make_instance(negate_fn(rep.family->members[i - 1]), v, u, tol,
                                        "pair_-" + std::to_string(i));
        const auto minus = exact_expectation(inst_minus);
        const double gap = plus.value - minus.value;
        if (i == 1) {
            eps1 = gap;
            rep.epsilon = gap;
            rep.epsilon_err = plus.error_bound + minus.error_bound;
            const auto lg = exact_expectation_log(inst, log_half_width);
            rep.log_epsilon = lg.sign == 0 ? -std::numeric_limits<double>::infinity()
                                           : std::log(2.0) + lg.log_abs;
        } else if (std::abs(gap - eps1) > 1e-10 * std::max(1.0, std::abs(eps1))) {
            throw std::logic_error("build_fooling_sde: pair gaps deviate beyond tolerance");
        }
    }
    rep.vacuous = !(rep.epsilon > 0.0);
    rep.bound_value = prop1_bound(rep.m, rep.n, rep.epsilon);
    rep.log_bound_value = prop1_bound_log(rep.m, rep.n, rep.log_epsilon);
    return rep;
}

// Runs a deterministic rule against g = sum_i h_{i,+}, reads the touched
// supports off the trace's x4 coordinates (boundaries count as touching),
// flips the signs on the untouched set J and measures |S(g) - S(h)|.
inline FoolingReportSde fool_deterministic_sde_rule(const Strategy<Vec4, SdeTowerAnswer>& rule,
                                                    int n_budget, const SmoothScalarFn& v,
                                                    const GrowthFn& u, double tol = 1e-10,
                                                    int m_override = 0,
                                                    double log_half_width = 16.0) {
    if (!rule.deterministic)
        throw std::invalid_argument("fool_deterministic_sde_rule: rule must be deterministic");
    FoolingReportSde rep = build_fooling_sde(std::max(n_budget, 1), v, u, tol, m_override,
                                             log_half_width);
    rep.n = n_budget;
    rep.bound_value = prop1_bound(rep.m, std::max(n_budget, 1), rep.epsilon);
    rep.log_bound_value = prop1_bound_log(rep.m, std::max(n_budget, 1), rep.log_epsilon);
    const int m = rep.m;

    std::vector<int> all_plus(m, +1);
    auto g_input = make_sde_tower_input(rep.family, all_plus, v, "g=sum h_i,+");
    const auto run = run_strategy(g_input, rule, 0,
                                  static_cast<std::size_t>(std::max(n_budget, 0)));
    rep.rule_nodes = run.trace.nodes;

    std::vector<bool> touched(static_cast<std::size_t>(m), false);
    for (const Vec4& node : run.trace.nodes) {
        const double x4 = node[3];
        for (int i = 1; i <= m; ++i) {
            const auto [lo, hi] = rep.family->support(i);
            if (x4 >= lo && x4 <= hi) touched[static_cast<std::size_t>(i - 1)] = true;
        }
    }
    std::vector<int> signs(static_cast<std::size_t>(m), +1);
    for (int i = 1; i <= m; ++i) {
        if (!touched[static_cast<std::size_t>(i - 1)]) {
            rep.untouched.push_back(i);
            signs[static_cast<std::size_t>(i - 1)] = -1;
        }
    }

    auto g_inst = detail::make_family_instance(rep.family, all_plus, v, u, tol, "g_all_plus");
    auto h_inst = detail::make_family_instance(rep.family, signs, v, u, tol, "h_flipped");
    rep.s_g = exact_expectation(g_inst).value;
    rep.s_h = exact_expectation(h_inst).value;
    rep.measured_gap = std::abs(rep.s_g - rep.s_h);
    rep.g_instance = std::move(g_inst);
    rep.h_instance = std::move(h_inst);
    return rep;
}

// ---------------------------------------------------------------------------
// 1-d fooling pipeline (quadrature of E[f(W(1))] over F_u)

// (1/sqrt(2 pi)) ∫_a^b sin(f(x)) exp(-x^2/2) dx
inline double s_int_gaussian(const std::function<double(double)>& f, double a, double b,
                             double tol = 1e-10) {
    auto integrand = [&f](double x) { return std::sin(f(x)) * std::exp(-0.5 * x * x); };
    return integrate_adaptive(integrand, a, b, tol).value / std::sqrt(2.0 * M_PI);
}

struct FoolingReport1d {
    int n = 0;  // budget
    int m = 0;  // 2n intervals
    BumpFamily1d family;
    std::vector<double> gaps;  // per-pair gaps 2 S^int(h_{i,+})
    double epsilon = 0.0;      // min over pairs
    double bound_value = 0.0;  // prop2(m, |nodes|, eps).det
    std::optional<double> ran_bound;

    std::vector<double> rule_nodes;
    std::vector<int> signs;      // fooling sign per interval
    std::vector<int> untouched;  // 1-based J
    double integrand_gap = std::numeric_limits<double>::quiet_NaN();
    double s_g = std::numeric_limits<double>::quiet_NaN();
    double s_h = std::numeric_limits<double>::quiet_NaN();
};

// S^int(sum_i sign_i h_{i,+}) summed per interval; supports are disjoint,
// so sin distributes over the sum.
namespace detail {
inline double s_int_family(const BumpFamily1d& fam, std::span<const int> signs, double tol) {
    double total = 0.0;
    for (int i = 1; i <= static_cast<int>(fam.plus.size()); ++i) {
        const auto [lo, hi] = fam.support(i);
        const auto& f = fam.plus[i - 1].value;
        const int sg = signs[static_cast<std::size_t>(i - 1)];
        total += s_int_gaussian([&f, sg](double x) { return sg * f(x); }, lo, hi, tol);
    }
    return total;
}
}  // namespace detail

inline FoolingReport1d build_fooling_1d(int n, const GrowthFn& u, double tol = 1e-10) {
    if (n < 1) throw std::invalid_argument("build_fooling_1d: n must be >= 1");
    FoolingReport1d rep;
    rep.n = n;
    rep.m = 2 * n;
    rep.family = build_bump_family_1d(n, u);
    rep.gaps.resize(static_cast<std::size_t>(rep.m));
    rep.epsilon = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= rep.m; ++i) {
        const auto [lo, hi] = rep.family.support(i);
        const double s_plus = s_int_gaussian(rep.family.plus[i - 1].value, lo, hi, tol);
        rep.gaps[static_cast<std::size_t>(i - 1)] = 2.0 * s_plus;  // S^- = -S^+ by oddness
        rep.epsilon = std::min(rep.epsilon, rep.gaps[static_cast<std::size_t>(i - 1)]);
    }
    const auto b = prop2_bounds(rep.m, n, rep.epsilon);
    rep.bound_value = b.det;
    rep.ran_bound = b.ran;
    return rep;
}

// Concrete node set |nodes| <= n: flips the fooling signs on the intervals
// no node touches and measures the gap between the two sign choices.
inline FoolingReport1d fool_deterministic_quadrature(std::span<const double> nodes, int n,
                                                     const GrowthFn& u, double tol = 1e-10) {
    FoolingReport1d rep = build_fooling_1d(n, u, tol);
    if (static_cast<int>(nodes.size()) > n)
        throw std::invalid_argument("fool_deterministic_quadrature: more nodes than budget");
    rep.rule_nodes.assign(nodes.begin(), nodes.end());
    rep.signs.assign(static_cast<std::size_t>(rep.m), +1);
    for (int i = 1; i <= rep.m; ++i) {
        const auto [lo, hi] = rep.family.support(i);
        bool touched = false;
        for (double x : nodes) {
            if (x >= lo && x <= hi) {  // boundary counts as touching
                touched = true;
                break;
            }
        }
        if (!touched) {
            rep.untouched.push_back(i);
            rep.signs[static_cast<std::size_t>(i - 1)] = -1;
        }
    }
    std::vector<int> all_plus(static_cast<std::size_t>(rep.m), +1);
    rep.s_g = detail::s_int_family(rep.family, all_plus, tol);
    rep.s_h = detail::s_int_family(rep.family, rep.signs, tol);
    rep.integrand_gap = std::abs(rep.s_g - rep.s_h);
    const auto b = prop2_bounds(rep.m, static_cast<int>(nodes.size()), rep.epsilon);
    rep.bound_value = b.det;
    rep.ran_bound = b.ran;
    return rep;
}

}  // namespace hardquad
