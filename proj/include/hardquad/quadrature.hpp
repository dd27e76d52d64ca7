#pragma once

// Adaptive one-dimensional quadrature with an error certificate.
//
// The integrator is globally adaptive Gauss(7)/Kronrod(15): the interval
// with the largest error estimate is bisected until the summed panel error
// drops below the requested tolerance.  The returned error_bound is the sum
// of |K15 - G7| over all accepted panels, which overestimates the true
// error for smooth integrands.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardquad {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureResult {
    double value = 0.0;
    double error_bound = 0.0;
    int panels = 0;
};

namespace detail {

// Kronrod-15 abscissae/weights and the embedded Gauss-7 weights on [-1,1].
inline constexpr double kGk15X[8] = {
    0.9914553711208126392068547, 0.9491079123427585245261897,
    0.8648644233597690727897128, 0.7415311855993944398638648,
    0.5860872354676911302941448, 0.4058451513773971669066064,
    0.2077849550078984676006894, 0.0};
inline constexpr double kGk15Wk[8] = {
    0.0229353220105292249637320, 0.0630920926299785532907007,
    0.1047900103222501838398763, 0.1406532597155259187451896,
    0.1690047266392679028265834, 0.1903505780647854099132564,
    0.2044329400752988924141620, 0.2094821410847278280129992};
inline constexpr double kGk15Wg[4] = {
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020};

struct Panel {
    double a, b;
    double value;
    double err;
};

template <class F>
Panel gk15_panel(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(mid);
    double k15 = kGk15Wk[7] * f0;
    double g7 = kGk15Wg[3] * f0;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kGk15X[i];
        const double fi = f(mid + dx) + f(mid - dx);
        k15 += kGk15Wk[i] * fi;
        if (i % 2 == 1) g7 += kGk15Wg[i / 2] * fi;
    }
    k15 *= half;
    g7 *= half;
    return Panel{a, b, k15, std::abs(k15 - g7)};
}

}  // namespace detail

// Integrates f over [a, b] until the accumulated error certificate drops
// below max(abs_tol, rel_floor * |integral|), bisecting the worst panel.
// rel_floor defaults to 0 (strict absolute tolerance); callers integrating
// quantities far above machine resolution (the cumulative growth integrals)
// pass a small relative floor instead.  initial_panels pre-splits the
// interval uniformly so that narrow spikes cannot evade the first sample.
// Throws QuadratureError when the subdivision budget or the interval
// resolution is exhausted first.
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b, double abs_tol,
                                    int max_panels = 50000, double rel_floor = 0.0,
                                    int initial_panels = 1) {
    if (!(abs_tol > 0.0)) throw QuadratureError("integrate_adaptive: tolerance must be positive");
    if (!(a <= b)) throw QuadratureError("integrate_adaptive: requires a <= b");
    if (a == b) return {0.0, 0.0, 0};

    std::vector<detail::Panel> heap;
    auto err_less = [](const detail::Panel& p, const detail::Panel& q) { return p.err < q.err; };
    initial_panels = std::clamp(initial_panels, 1, std::max(1, max_panels / 2));
    for (int i = 0; i < initial_panels; ++i) {
        const double lo = a + (b - a) * i / initial_panels;
        const double hi = (i + 1 == initial_panels) ? b : a + (b - a) * (i + 1) / initial_panels;
        heap.push_back(detail::gk15_panel(f, lo, hi));
    }
    std::make_heap(heap.begin(), heap.end(), err_less);

    auto exact_totals = [&heap] {
        double v = 0.0, e = 0.0;
        for (const auto& p : heap) {
            v += p.value;
            e += p.err;
        }
        return std::pair<double, double>(v, e);
    };

    auto [total_value, total_err] = exact_totals();
    while (true) {
        if (total_err <= std::max(abs_tol, rel_floor * std::abs(total_value))) {
            // incremental bookkeeping drifts; confirm against a fresh sum
            std::tie(total_value, total_err) = exact_totals();
            if (total_err <= std::max(abs_tol, rel_floor * std::abs(total_value))) break;
        }
        if (static_cast<int>(heap.size()) >= max_panels) {
            throw QuadratureError("integrate_adaptive: tolerance " + std::to_string(abs_tol) +
                                  " unattainable within " + std::to_string(max_panels) +
                                  " panels");
        }
        if (!std::isfinite(total_err) && !std::isfinite(heap.front().err) &&
            static_cast<int>(heap.size()) > 64) {
            throw QuadratureError("integrate_adaptive: non-finite integrand");
        }
        std::pop_heap(heap.begin(), heap.end(), err_less);
        const detail::Panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            throw QuadratureError(
                "integrate_adaptive: interval resolution exhausted before reaching tolerance " +
                std::to_string(abs_tol));
        }
        detail::Panel left = detail::gk15_panel(f, worst.a, mid);
        detail::Panel right = detail::gk15_panel(f, mid, worst.b);
        total_value += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), err_less);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), err_less);
    }
    return {total_value, total_err, static_cast<int>(heap.size())};
}

inline QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                           double b, double abs_tol, int max_panels = 50000,
                                           double rel_floor = 0.0, int initial_panels = 1) {
    return integrate_adaptive<std::function<double(double)>>(f, a, b, abs_tol, max_panels,
                                                             rel_floor, initial_panels);
}

// log(∫_a^b exp(log_f(x)) dx) by composite Simpson and a log-sum-exp
// reduction.  Used for reporting quantities whose linear-space value
// underflows double precision; no error certificate is attached.
template <class F>
double log_integrate(const F& log_f, double a, double b, int n_intervals = 20000) {
    if (!(a < b)) return -std::numeric_limits<double>::infinity();
    if (n_intervals % 2 != 0) ++n_intervals;
    const double h = (b - a) / n_intervals;
    std::vector<double> terms;
    terms.reserve(n_intervals + 1);
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n_intervals; ++i) {
        const double w = (i == 0 || i == n_intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double t = log_f(a + i * h) + std::log(w * h / 3.0);
        terms.push_back(t);
        peak = std::max(peak, t);
    }
    if (!std::isfinite(peak)) return peak;
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - peak);
    return peak + std::log(acc);
}

}  // namespace hardquad
