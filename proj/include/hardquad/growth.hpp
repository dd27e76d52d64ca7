#pragma once

// Growth functions u and their derived objects: bracketed inversion, the
// cumulative-integral map zeta_u, the adversarial staircase v_n, the
// constructive u's for prescribed convergence speeds, and the signed 1-d
// bump family whose supports start at u^{-1}(z_n).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardquad/quadrature.hpp"
#include "hardquad/smoothfn.hpp"

namespace hardquad {

struct GrowthInversionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Strictly increasing continuous u: [0,inf) -> [0,inf), represented by a
// black-box evaluator plus a declared search bound for inversion.
struct GrowthFn {
    std::function<double(double)> eval;
    double domain_cap = 50.0;
    std::string description;

    double operator()(double x) const { return eval(x); }
};

inline GrowthFn make_identity_u(double cap = 50.0) {
    return {[](double x) { return x; }, cap, "u(x)=x"};
}

inline GrowthFn make_affine_u(double a, double b, double cap = 50.0) {
    return {[a, b](double x) { return a + b * x; }, cap,
            "u(x)=" + std::to_string(a) + "+" + std::to_string(b) + "x"};
}

// The demo growth function u(x) = exp(x^3); saturates to +inf where the
// exponent overflows, which keeps comparisons monotone.
inline GrowthFn make_exp_cubic_u(double cap = 50.0) {
    return {[](double x) { return std::exp(x * x * x); }, cap, "u(x)=exp(x^3)"};
}

// Solves u(x) = y by exponential bracket expansion followed by bisection;
// the result satisfies |u(x) - y| <= tol * (1 + y).  Values y <= u(0) clamp
// to 0.  Throws GrowthInversionError when u(domain_cap) < y.
inline double invert_growth(const GrowthFn& u, double y, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("invert_growth: tol must be positive");
    if (!(u.eval(0.0) <= y)) return 0.0;
    double lo = 0.0;
    double hi = std::min(1.0, u.domain_cap);
    while (u.eval(hi) < y && hi < u.domain_cap) hi = std::min(2.0 * hi, u.domain_cap);
    if (u.eval(hi) < y) {
        throw GrowthInversionError("invert_growth: no bracket up to domain_cap=" +
                                   std::to_string(u.domain_cap) + " for y=" + std::to_string(y));
    }
    for (int it = 0; it < 240; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double um = u.eval(mid);
        if (std::abs(um - y) <= tol * (1.0 + std::abs(y))) return mid;
        if (um < y) lo = mid; else hi = mid;
    }
    const double x = 0.5 * (lo + hi);
    if (std::abs(u.eval(x) - y) > tol * (1.0 + std::abs(y)) &&
        std::abs(u.eval(lo) - y) > tol * (1.0 + std::abs(y)) &&
        std::abs(u.eval(hi) - y) > tol * (1.0 + std::abs(y))) {
        throw GrowthInversionError("invert_growth: bisection stalled (u not continuous?)");
    }
    return x;
}

// Admissibility data for u: inf_{x >= x_delta} u(x)/x >= delta, and the
// derived constant kappa_delta = (8/sqrt(delta)) * max(u(x_delta+1), 1).
struct GrowthAdmissibility {
    double delta = 0.0;
    double x_delta = 0.0;
    double kappa_delta = 0.0;

    static GrowthAdmissibility make(const GrowthFn& u, double delta, double x_delta) {
        if (!(delta > 0.0) || !(x_delta > 0.0))
            throw std::invalid_argument("GrowthAdmissibility: delta and x_delta must be positive");
        GrowthAdmissibility a;
        a.delta = delta;
        a.x_delta = x_delta;
        a.kappa_delta = 8.0 / std::sqrt(delta) * std::max(u.eval(x_delta + 1.0), 1.0);
        return a;
    }
};

// Grid check of the admissibility condition on [x_delta, grid_hi].
inline bool check_growth_admissibility(const GrowthFn& u, const GrowthAdmissibility& adm,
                                       double grid_hi, int points = 2000) {
    for (int i = 0; i <= points; ++i) {
        const double x = adm.x_delta + (grid_hi - adm.x_delta) * i / points;
        if (x <= 0.0) continue;
        const double ux = u.eval(x);
        if (std::isfinite(ux) && ux / x < adm.delta) return false;
    }
    return true;
}

// zeta_u(x) = sqrt(∫_0^{x-1} u), x >= 1.  The cumulative integral is cached
// on an eagerly built knot table (step 1/2 up to the representable range of
// u); only the partial final segment is integrated per query.  Immutable
// after construction.
class ZetaU {
public:
    explicit ZetaU(GrowthFn u, double tol = 1e-10) : u_(std::move(u)), tol_(tol) {
        build_table();
    }

    // ∫_0^T u with the cached prefix table; +inf once u itself overflows
    // (u is increasing, so a finite u(T) keeps the whole overhang finite)
    double cumulative(double T) const {
        if (T <= 0.0) return 0.0;
        if (T > knot_x_.back()) {
            if (!std::isfinite(u_.eval(T))) return std::numeric_limits<double>::infinity();
            return knot_cum_.back() + integrate_adaptive(u_.eval, knot_x_.back(), T,
                                                         segment_tol(), 50000, kRelFloor).value;
        }
        const auto it = std::upper_bound(knot_x_.begin(), knot_x_.end(), T);
        const std::size_t k = static_cast<std::size_t>(it - knot_x_.begin()) - 1;
        if (knot_x_[k] == T) return knot_cum_[k];
        return knot_cum_[k] + integrate_adaptive(u_.eval, knot_x_[k], T, segment_tol(), 50000,
                                                 kRelFloor).value;
    }

    double eval(double x) const {
        if (!(x >= 1.0)) throw std::invalid_argument("ZetaU::eval: requires x >= 1");
        return std::sqrt(cumulative(x - 1.0));
    }

    // Smallest x >= 1 with zeta_u(x) = y (within tol); bracket + bisection.
    double invert(double y, double tol) const {
        if (!(y >= 0.0)) throw std::invalid_argument("ZetaU::invert: requires y >= 0");
        if (y == 0.0) return 1.0;
        double lo = 1.0;
        double hi = 1.5;
        const double cap = u_.domain_cap + 1.0;
        while (eval(hi) < y && hi < cap) hi = std::min(1.0 + 2.0 * (hi - 1.0), cap);
        if (eval(hi) < y) {
            throw GrowthInversionError("ZetaU::invert: no bracket below domain_cap for y=" +
                                       std::to_string(y));
        }
        for (int it = 0; it < 240; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double zm = eval(mid);
            if (std::abs(zm - y) <= tol) return mid;
            if (zm < y) lo = mid; else hi = mid;
        }
        return 0.5 * (lo + hi);
    }
    double invert(double y) const { return invert(y, tol_); }

    const GrowthFn& u() const { return u_; }
    double table_cap() const { return knot_x_.back(); }
    double tol() const { return tol_; }

private:
    // huge cumulative integrals sit far above the absolute tolerance; a
    // machine-level relative floor keeps those segments terminating
    static constexpr double kRelFloor = 1e-14;

    double segment_tol() const { return tol_ / std::max<std::size_t>(knot_x_.size(), 4); }

    void build_table() {
        constexpr double kStep = 0.5;
        constexpr double kValueCap = 1e280;
        knot_x_.push_back(0.0);
        knot_cum_.push_back(0.0);
        const std::size_t max_knots =
            static_cast<std::size_t>(std::ceil(u_.domain_cap / kStep)) + 2;
        double seg_tol = tol_ / static_cast<double>(max_knots);
        while (knot_x_.back() + kStep <= u_.domain_cap) {
            const double next = knot_x_.back() + kStep;
            const double u_next = u_.eval(next);
            if (!std::isfinite(u_next) || u_next > kValueCap || knot_cum_.back() > kValueCap)
                break;
            const double seg =
                integrate_adaptive(u_.eval, knot_x_.back(), next, seg_tol, 50000, kRelFloor)
                    .value;
            knot_x_.push_back(next);
            knot_cum_.push_back(knot_cum_.back() + seg);
        }
    }

    GrowthFn u_;
    double tol_;
    std::vector<double> knot_x_, knot_cum_;
};

// the inner-integral accuracy is fixed by the table built at construction
inline double zeta_eval(const ZetaU& z, double x) { return z.eval(x); }

inline double zeta_invert(const ZetaU& z, double y, double tol) { return z.invert(y, tol); }

// One mollifier segment of v_n on the half-open interval [lo, hi).
struct VnPiece {
    double lo, hi;
    MollifierTheta theta;
};

// The adversarial strictly increasing v_n: an eta head left of
// alpha_n - k_n, a theta ladder along the unit intervals of zeta_u, and two
// half-interval theta pieces just before alpha_n; everything scaled by
// 1/kappa_delta.  Satisfies v_n, v_n' <= 1 + u(|.|).
struct VnSpec {
    int n = 0;
    GrowthAdmissibility adm;
    double alpha_n = 0.0;
    double beta_n = 0.0;
    int k_n = 0;
    double head_tau = 0.0;  // alpha_n - k_n
    MollifierEta head{0.0, 1.0};  // placeholder until build_v_n fills it
    std::vector<VnPiece> pieces;  // explicit pieces covering [alpha_n - k_n, alpha_n)
    std::shared_ptr<const ZetaU> zeta;

    double value(double x) const {
        const double kappa = adm.kappa_delta;
        if (x < head_tau) return head.eval(x) / kappa;
        if (x < alpha_n) {
            for (const auto& p : pieces)
                if (x >= p.lo && x < p.hi) return p.theta.eval(x) / kappa;
            // only reachable through rounding at a piece boundary
            return pieces.back().theta.eval(x) / kappa;
        }
        return ladder_eval(x, false) / kappa;
    }

    double deriv(double x) const {
        const double kappa = adm.kappa_delta;
        if (x < head_tau) return head.deriv(x) / kappa;
        if (x < alpha_n) {
            for (const auto& p : pieces)
                if (x >= p.lo && x < p.hi) return p.theta.deriv(x) / kappa;
            return pieces.back().theta.deriv(x) / kappa;
        }
        return ladder_eval(x, true) / kappa;
    }

    SmoothScalarFn as_fn() const {
        VnSpec self = *this;
        return {[self](double x) { return self.value(x); },
                [self](double x) { return self.deriv(x); },
                std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(),
                "v_" + std::to_string(n)};
    }

    // piece boundaries up to hi; near each seam the mollifier tails sit below
    // double resolution, so strict-increase grid checks exclude small
    // neighborhoods of these points
    std::vector<double> seam_points(double hi) const {
        std::vector<double> seams{head_tau};
        for (const auto& p : pieces) seams.push_back(p.hi);
        for (double s = alpha_n + 1.0; s <= hi; s += 1.0) seams.push_back(s);
        return seams;
    }

private:
    // on-demand theta piece for x >= alpha_n: [alpha_n + k, alpha_n + k + 1).
    // Beyond the representable range of zeta the staircase saturates to +inf
    // (the class cap 1 + u(|x|) is +inf there as well).
    double ladder_eval(double x, bool want_deriv) const {
        const double k = std::floor(x - alpha_n);
        const double lo = alpha_n + k;
        const double zlo = zeta->eval(lo);
        const double zhi = zeta->eval(lo + 1.0);
        if (!std::isfinite(zlo)) return zlo;
        if (!std::isfinite(zhi)) {
            const double e = 1.0 / (x - lo) - 1.0 / (lo + 1.0 - x);
            if (e >= kMollifierExpCut) return want_deriv ? 0.0 : zlo;
            return zhi;
        }
        const MollifierTheta piece(lo, lo + 1.0, zlo, zhi);
        return want_deriv ? piece.deriv(x) : piece.eval(x);
    }
};

inline double beta_n_of(int n) {
    const double s = 102.0 * n;
    return (1.0 + 16.0 * s * s * s * s) / (4.0 * s * s);
}

inline VnSpec build_v_n(const GrowthAdmissibility& adm, const GrowthFn& u, int n,
                        double tol = 1e-10) {
    if (n < 1) throw std::invalid_argument("build_v_n: n must be >= 1");
    auto zeta = std::make_shared<ZetaU>(u, tol);

    VnSpec v;
    v.n = n;
    v.adm = adm;
    v.beta_n = beta_n_of(n);
    v.alpha_n = zeta->invert(adm.kappa_delta * v.beta_n, tol);
    if (v.alpha_n < adm.x_delta + 2.0 - 1e-9) {
        throw std::invalid_argument("build_v_n: alpha_n < x_delta + 2; admissibility data invalid");
    }
    v.k_n = static_cast<int>(std::floor(v.alpha_n - 1.0));
    if (v.alpha_n - v.k_n <= 1.0) --v.k_n;
    if (v.k_n < 1 || v.alpha_n - v.k_n > 2.0) {
        throw std::logic_error("build_v_n: k_n placement failed");
    }
    v.head_tau = v.alpha_n - v.k_n;
    v.head = MollifierEta(v.head_tau, zeta->eval(v.head_tau));

    const double sqrt_delta = std::sqrt(adm.delta);
    const double z_alpha = zeta->eval(v.alpha_n);
    // unit ladder [alpha+k, alpha+k+1), k = -k_n .. -2
    for (int k = -v.k_n; k <= -2; ++k) {
        const double lo = v.alpha_n + k;
        v.pieces.push_back(
            {lo, lo + 1.0, MollifierTheta(lo, lo + 1.0, zeta->eval(lo), zeta->eval(lo + 1.0))});
    }
    // the two half-interval pieces in front of alpha_n
    const double za1 = zeta->eval(v.alpha_n - 1.0);
    v.pieces.push_back({v.alpha_n - 1.0, v.alpha_n - 0.5,
                        MollifierTheta(v.alpha_n - 1.0, v.alpha_n - 0.5, za1,
                                       z_alpha - sqrt_delta / 4.0)});
    v.pieces.push_back({v.alpha_n - 0.5, v.alpha_n,
                        MollifierTheta(v.alpha_n - 0.5, v.alpha_n, z_alpha - sqrt_delta / 4.0,
                                       z_alpha)});
    v.zeta = std::move(zeta);
    return v;
}

// Piecewise-linear u for a prescribed decreasing sequence eps: identity up
// to b_{n0}, then slopes forcing u(b_{n+1}) >= 4 c3 (n+1)^4, extended with
// the final slope beyond the last knot.
inline GrowthFn build_u_from_eps(std::span<const double> eps, double c2, double c3,
                                 double domain_cap = 50.0) {
    if (eps.size() < 2) throw std::invalid_argument("build_u_from_eps: need at least two entries");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0)) throw std::invalid_argument("build_u_from_eps: eps must be positive");
        if (i > 0 && !(eps[i] < eps[i - 1]))
            throw std::invalid_argument("build_u_from_eps: eps must be strictly decreasing");
    }
    if (!(c2 > 0.0) || !(c3 >= 1.0))
        throw std::invalid_argument("build_u_from_eps: requires c2 > 0 and c3 >= 1");

    const double thresh = std::exp(-4.0 * c2);
    std::size_t n0 = 0;  // 0-based index of the first admissible entry
    while (n0 < eps.size() && eps[n0] > thresh) ++n0;
    if (n0 + 1 >= eps.size()) {
        throw std::invalid_argument(
            "build_u_from_eps: eps never drops to exp(-4 c2) with a successor index");
    }

    auto knots = std::make_shared<std::vector<double>>();
    auto values = std::make_shared<std::vector<double>>();
    auto slopes = std::make_shared<std::vector<double>>();  // slope on [knot_i, knot_{i+1})
    for (std::size_t i = n0; i < eps.size(); ++i) {
        knots->push_back(std::sqrt(std::log(1.0 / eps[i]) / c2));
    }
    values->push_back(knots->front());  // u(b_{n0}) = b_{n0} (identity head)
    for (std::size_t i = 0; i + 1 < knots->size(); ++i) {
        const double bn = (*knots)[i];
        const double bn1 = (*knots)[i + 1];
        const double next_index = static_cast<double>(n0 + i + 2);  // 1-based n + 1
        const double target = 4.0 * c3 * next_index * next_index * next_index * next_index;
        const double slope = std::max(1.0, (target - values->back()) / (bn1 - bn));
        slopes->push_back(slope);
        values->push_back(values->back() + (bn1 - bn) * slope);
    }
    slopes->push_back(std::max(1.0, slopes->back()));  // extension beyond the last knot

    auto eval = [knots, values, slopes](double x) {
        if (x <= knots->front()) return x;
        const auto it = std::upper_bound(knots->begin(), knots->end(), x);
        const std::size_t k = static_cast<std::size_t>(it - knots->begin()) - 1;
        const std::size_t s = std::min(k, slopes->size() - 1);
        return (*values)[k] + (x - (*knots)[k]) * (*slopes)[s];
    };
    return {eval, domain_cap, "u from eps schedule"};
}

// Two-piece linear u with u(2) = 2 c3 and u(3) = 4 c3^2 n^4.
inline GrowthFn build_u_lin_n(int n, double c3, double domain_cap = 50.0) {
    if (n < 1) throw std::invalid_argument("build_u_lin_n: n must be >= 1");
    if (!(c3 >= 1.0)) throw std::invalid_argument("build_u_lin_n: c3 must be >= 1");
    const double n4 = static_cast<double>(n) * n * n * n;
    const double second_slope = 4.0 * c3 * c3 * n4 - 2.0 * c3;
    return {[c3, second_slope](double x) {
                return x <= 2.0 ? c3 * x : 2.0 * c3 + second_slope * (x - 2.0);
            },
            domain_cap,
            "u_lin(n=" + std::to_string(n) + ")"};
}

// The 2n signed pairs h_{i,+-} with supports filling
// (u^{-1}(z_n) + (i-1)/n, u^{-1}(z_n) + i/n), z_n = max(n, u(0));
// 0 <= h_{i,+} <= 1/12 and |h_{i,+-}'| <= u on the support.
struct BumpFamily1d {
    int n = 0;
    double z_n = 0.0;
    double support_start = 0.0;  // u^{-1}(z_n)
    std::vector<SmoothScalarFn> plus;  // h_{i,+}, i = 1..2n

    std::pair<double, double> support(int i) const {
        return {support_start + static_cast<double>(i - 1) / n,
                support_start + static_cast<double>(i) / n};
    }
    SmoothScalarFn member(int i, int sign) const {
        return sign >= 0 ? plus[i - 1] : negate_fn(plus[i - 1]);
    }
};

inline BumpFamily1d build_bump_family_1d(int n, const GrowthFn& u, double inv_tol = 1e-12) {
    if (n < 1) throw std::invalid_argument("build_bump_family_1d: n must be >= 1");
    BumpFamily1d fam;
    fam.n = n;
    fam.z_n = std::max(static_cast<double>(n), u.eval(0.0));
    fam.support_start = invert_growth(u, fam.z_n, inv_tol);

    const double w = 1.0 / (3.0 * n);
    detail::PlateauBump bump(0.0, w, 1.0 / 12.0);
    fam.plus.reserve(2 * n);
    for (int i = 1; i <= 2 * n; ++i) {
        const double shift = fam.support_start + static_cast<double>(i - 1) / n;
        SmoothScalarFn f;
        f.value = [bump, shift](double x) { return bump.eval(x - shift); };
        f.deriv = [bump, shift](double x) { return bump.deriv(x - shift); };
        f.sup_bound = 1.0 / 12.0;
        f.deriv_sup_bound = static_cast<double>(n);  // 4 * (1/12)/(1/(3n))
        f.label = "h_" + std::to_string(i) + ",+(n=" + std::to_string(n) + ")";
        fam.plus.push_back(std::move(f));
    }
    return fam;
}

}  // namespace hardquad
