#pragma once

// C^infinity building blocks: the eta/theta mollifiers, the three rho
// functions with their certified integral constants, and the disjoint-support
// plateau-bump families used by the adversarial constructions.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hardquad/quadrature.hpp"

namespace hardquad {

// A scalar function with analytic value/first-derivative evaluators and
// certified sup-norm bounds (infinity when no certificate applies).
struct SmoothScalarFn {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    double sup_bound = std::numeric_limits<double>::infinity();
    double deriv_sup_bound = std::numeric_limits<double>::infinity();
    std::string label;

    double operator()(double x) const { return value(x); }
};

inline SmoothScalarFn zero_fn() {
    return {[](double) { return 0.0; }, [](double) { return 0.0; }, 0.0, 0.0, "zero"};
}

inline SmoothScalarFn constant_fn(double c, std::string label = "const") {
    return {[c](double) { return c; }, [](double) { return 0.0; }, std::abs(c), 0.0,
            std::move(label)};
}

inline SmoothScalarFn negate_fn(const SmoothScalarFn& f) {
    auto v = f.value;
    auto d = f.deriv;
    return {[v](double x) { return -v(x); }, [d](double x) { return -d(x); }, f.sup_bound,
            f.deriv_sup_bound, "-" + f.label};
}

// Exponent magnitude beyond which the interior branch of a mollifier is
// numerically indistinguishable from the adjacent flat branch.
inline constexpr double kMollifierExpCut = 700.0;

// Smooth ramp to a plateau: value v * (1 - exp(1/(x - tau))) below tau, v at
// and above tau.  Range (0, v], strictly increasing left of tau, and
// |derivative| <= 4 e^{-2} v.
struct MollifierEta {
    double tau;
    double v;

    MollifierEta(double tau_, double v_) : tau(tau_), v(v_) {
        if (!(v > 0.0)) throw std::invalid_argument("MollifierEta: v must be positive");
    }

    double eval(double x) const {
        if (x >= tau) return v;
        const double t = 1.0 / (x - tau);  // negative
        if (t <= -kMollifierExpCut) return v;
        return v * (1.0 - std::exp(t));
    }

    double deriv(double x) const {
        if (x >= tau) return 0.0;
        const double t = 1.0 / (x - tau);
        if (t <= -kMollifierExpCut) return 0.0;
        return v * t * t * std::exp(t);
    }

    SmoothScalarFn as_fn() const {
        MollifierEta self = *this;
        return {[self](double x) { return self.eval(x); },
                [self](double x) { return self.deriv(x); },
                v,
                4.0 * std::exp(-2.0) * v,
                "eta"};
    }
};

// Smooth transition from v1 (left of tau1) to v2 (right of tau2);
// strictly increasing on [tau1, tau2], |derivative| <= 4 (v2-v1)/(tau2-tau1).
struct MollifierTheta {
    double tau1, tau2;
    double v1, v2;

    MollifierTheta(double t1, double t2, double w1, double w2)
        : tau1(t1), tau2(t2), v1(w1), v2(w2) {
        if (!(tau1 < tau2)) throw std::invalid_argument("MollifierTheta: requires tau1 < tau2");
        if (!(v1 < v2)) throw std::invalid_argument("MollifierTheta: requires v1 < v2");
    }

    double eval(double x) const {
        if (x <= tau1) return v1;
        if (x >= tau2) return v2;
        const double len = tau2 - tau1;
        const double e = len / (x - tau1) - len / (tau2 - x);
        if (e >= kMollifierExpCut) return v1;
        if (e <= -kMollifierExpCut) return v2;
        return v1 + (v2 - v1) / (1.0 + std::exp(e));
    }

    double deriv(double x) const {
        if (x <= tau1 || x >= tau2) return 0.0;
        const double len = tau2 - tau1;
        const double y = (x - tau1) / len;
        const double e = 1.0 / y - 1.0 / (1.0 - y);
        if (std::abs(e) >= kMollifierExpCut) return 0.0;
        // exp(e)/(1+exp(e))^2 is symmetric in e; evaluate with exp(-|e|)
        const double s = std::exp(-std::abs(e));
        const double core = s / ((1.0 + s) * (1.0 + s));
        const double shape = (1.0 / (y * y) + 1.0 / ((1.0 - y) * (1.0 - y))) * core;
        return (v2 - v1) / len * shape;
    }

    SmoothScalarFn as_fn() const {
        MollifierTheta self = *this;
        return {[self](double x) { return self.eval(x); },
                [self](double x) { return self.deriv(x); },
                std::max(std::abs(v1), std::abs(v2)),
                4.0 * (v2 - v1) / (tau2 - tau1),
                "theta"};
    }
};

// rho_1 = 1/8 - theta_{0,1/2,0,1/8}   (vanishes on [1/2, inf))
// rho_2 = theta_{1/2,1,0,1/8}         (vanishes on (-inf, 1/2])
// rho_3(x) = x exp(-x^2)              (odd)
inline const MollifierTheta& rho1_theta() {
    static const MollifierTheta t(0.0, 0.5, 0.0, 0.125);
    return t;
}
inline const MollifierTheta& rho2_theta() {
    static const MollifierTheta t(0.5, 1.0, 0.0, 0.125);
    return t;
}

inline double rho1(double x) { return 0.125 - rho1_theta().eval(x); }
inline double rho1_deriv(double x) { return -rho1_theta().deriv(x); }
inline double rho2(double x) { return rho2_theta().eval(x); }
inline double rho2_deriv(double x) { return rho2_theta().deriv(x); }
inline double rho3(double x) { return x * std::exp(-x * x); }
inline double rho3_deriv(double x) { return (1.0 - 2.0 * x * x) * std::exp(-x * x); }

inline double rho_eval(int which, double x) {
    switch (which) {
        case 1: return rho1(x);
        case 2: return rho2(x);
        case 3: return rho3(x);
        default: throw std::invalid_argument("rho_eval: which must be 1, 2 or 3");
    }
}

inline double rho_deriv(int which, double x) {
    switch (which) {
        case 1: return rho1_deriv(x);
        case 2: return rho2_deriv(x);
        case 3: return rho3_deriv(x);
        default: throw std::invalid_argument("rho_deriv: which must be 1, 2 or 3");
    }
}

inline SmoothScalarFn rho_fn(int which) {
    return {[which](double x) { return rho_eval(which, x); },
            [which](double x) { return rho_deriv(which, x); },
            which == 3 ? std::exp(-0.5) / std::sqrt(2.0) : 0.125,
            1.0,
            "rho" + std::to_string(which)};
}

struct RhoConstant {
    double value = 0.0;
    double error_bound = 0.0;
};

// c_rho1 = ∫_0^{1/2} rho_1^2  (lies in [1/1024, 1/128])
// c_rho2 = ∫_{1/2}^1  rho_2   (at least 1/64)
inline RhoConstant compute_c_rho(int which, double tol, int max_panels = 50000) {
    if (which == 1) {
        auto r = integrate_adaptive([](double x) { const double r1 = rho1(x); return r1 * r1; },
                                    0.0, 0.5, tol, max_panels);
        return {r.value, r.error_bound};
    }
    if (which == 2) {
        auto r = integrate_adaptive([](double x) { return rho2(x); }, 0.5, 1.0, tol, max_panels);
        return {r.value, r.error_bound};
    }
    throw std::invalid_argument("compute_c_rho: which must be 1 or 2");
}

// The fixed rho functions plus their cached integral constants.
struct RhoTriple {
    double c_rho1 = 0.0;
    double c_rho1_err = 0.0;
    double c_rho2 = 0.0;
    double c_rho2_err = 0.0;

    static RhoTriple compute(double tol = 1e-10) {
        RhoTriple t;
        const auto c1 = compute_c_rho(1, tol);
        const auto c2 = compute_c_rho(2, tol);
        t.c_rho1 = c1.value;
        t.c_rho1_err = c1.error_bound;
        t.c_rho2 = c2.value;
        t.c_rho2_err = c2.error_bound;
        return t;
    }
};

namespace detail {

// Smooth bump supported on (start, start + 3w): theta-ramp up over
// [start, start+w], plateau at `height` on [start+w, start+2w], ramp down
// over [start+2w, start+3w].
struct PlateauBump {
    double start, w, height;
    MollifierTheta rise, fall;

    PlateauBump(double start_, double w_, double height_)
        : start(start_),
          w(w_),
          height(height_),
          rise(0.0, w_, 0.0, height_),
          fall(2.0 * w_, 3.0 * w_, 0.0, height_) {}

    double eval(double x) const {
        const double t = x - start;
        if (t <= 2.0 * w) return rise.eval(t);
        return height - fall.eval(t);
    }
    double deriv(double x) const {
        const double t = x - start;
        if (t <= 2.0 * w) return rise.deriv(t);
        return -fall.deriv(t);
    }
};

}  // namespace detail

// The m normalized bumps h_1..h_m with {h_i != 0} = ((i-1)/(2m), i/(2m)) and
// ∫ h_i = 1/(12m)^2; members belong to C^{inf,1}.
struct BumpFamilySde {
    int m = 0;
    double c0 = 0.0;       // integral of the unnormalized plateau bump
    double c0_err = 0.0;
    double integral_each = 0.0;  // 1/(12m)^2, exact by the normalization
    std::vector<SmoothScalarFn> members;

    // support of h_i, 1-based
    std::pair<double, double> support(int i) const {
        return {static_cast<double>(i - 1) / (2.0 * m), static_cast<double>(i) / (2.0 * m)};
    }
};

inline BumpFamilySde build_bump_family_sde(int m, double tol = 1e-10) {
    if (m < 1) throw std::invalid_argument("build_bump_family_sde: m must be >= 1");
    const double w = 1.0 / (6.0 * m);
    detail::PlateauBump bump(0.0, w, w);
    auto qc0 = integrate_adaptive([&bump](double x) { return bump.eval(x); }, 0.0, 3.0 * w, tol);

    BumpFamilySde fam;
    fam.m = m;
    fam.c0 = qc0.value;
    fam.c0_err = qc0.error_bound;
    fam.integral_each = 1.0 / ((12.0 * m) * (12.0 * m));
    const double scale = 1.0 / (fam.c0 * (12.0 * m) * (12.0 * m));
    fam.members.reserve(m);
    for (int i = 1; i <= m; ++i) {
        const double shift = static_cast<double>(i - 1) / (2.0 * m);
        SmoothScalarFn f;
        f.value = [bump, scale, shift](double x) { return scale * bump.eval(x - shift); };
        f.deriv = [bump, scale, shift](double x) { return scale * bump.deriv(x - shift); };
        f.sup_bound = scale * w;        // <= 1/(24m)
        f.deriv_sup_bound = 4.0 * scale;  // theta' certificate, <= 1
        f.label = "h_" + std::to_string(i) + "(m=" + std::to_string(m) + ")";
        fam.members.push_back(std::move(f));
    }
    return fam;
}

}  // namespace hardquad
