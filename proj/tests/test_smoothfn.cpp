#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hardquad/quadrature.hpp"
#include "hardquad/smoothfn.hpp"
#include "hardquad/verify.hpp"

using namespace hardquad;

namespace {

// composite Simpson oracle, independent of the adaptive integrator
double simpson_oracle(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / (2 * panels);
    double acc = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("eta evaluation") {
    MollifierEta e01(0.0, 1.0);
    CHECK(e01.eval(0.0) == 1.0);                                        // plateau branch
    CHECK(e01.eval(-1.0) == Catch::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    MollifierEta e2(2.0, 0.5);
    CHECK(e2.eval(3.0) == 0.5);                                         // x >= tau
    CHECK_THROWS_AS(MollifierEta(0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(MollifierEta(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("eta derivative") {
    MollifierEta e01(0.0, 1.0);
    CHECK(e01.deriv(1.0) == 0.0);
    CHECK(e01.deriv(-0.5) == Catch::Approx(4.0 * std::exp(-2.0)).epsilon(1e-12));

    // analytic formula cross-checked by central finite difference
    MollifierEta e3(0.0, 3.0);
    const double analytic = 3.0 * 0.01 * std::exp(-0.1);
    CHECK(e3.deriv(-10.0) == Catch::Approx(analytic).epsilon(1e-12));
    const double fd = central_diff([&](double x) { return e3.eval(x); }, -10.0);
    CHECK(e3.deriv(-10.0) == Catch::Approx(fd).margin(1e-8));
}

TEST_CASE("eta saturates instead of overflowing near tau") {
    MollifierEta e01(0.0, 1.0);
    CHECK(e01.eval(-1e-320) == 1.0);
    CHECK(std::isfinite(e01.deriv(-1e-12)));
    CHECK(e01.deriv(-1e-12) == 0.0);
}

TEST_CASE("theta evaluation") {
    MollifierTheta t(0.0, 1.0, 0.0, 1.0);
    CHECK(t.eval(0.5) == Catch::Approx(0.5).epsilon(1e-14));  // exponent symmetry
    CHECK(t.eval(-5.0) == 0.0);
    CHECK(t.eval(7.0) == 1.0);
    MollifierTheta rho2_piece(0.5, 1.0, 0.0, 0.125);
    CHECK(rho2_piece.eval(0.75) == Catch::Approx(1.0 / 16.0).epsilon(1e-13));
    CHECK_THROWS_AS(MollifierTheta(1.0, 0.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(MollifierTheta(0.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("theta derivative") {
    MollifierTheta t(0.0, 1.0, 0.0, 1.0);
    CHECK(t.deriv(2.0) == 0.0);
    CHECK(t.deriv(0.5) == Catch::Approx(2.0).epsilon(1e-12));
    const double fd_mid = central_diff([&](double x) { return t.eval(x); }, 0.5);
    CHECK(t.deriv(0.5) == Catch::Approx(fd_mid).margin(1e-9));

    // scaling relation: theta'_{0,2,0,1}(1) = (1/2) theta'(1/2)
    MollifierTheta wide(0.0, 2.0, 0.0, 1.0);
    CHECK(wide.deriv(1.0) == Catch::Approx(1.0).epsilon(1e-12));
    const double fd_wide = central_diff([&](double x) { return wide.eval(x); }, 1.0);
    CHECK(wide.deriv(1.0) == Catch::Approx(fd_wide).margin(1e-9));
}

TEST_CASE("rho values and derivatives") {
    CHECK(rho_eval(3, 0.0) == 0.0);
    CHECK(rho_eval(3, 1.0) == Catch::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(rho_eval(1, 0.6) == 0.0);  // {rho1 = 0} = [1/2, inf)
    CHECK(rho_eval(1, 0.0) == 0.125);
    CHECK(rho_eval(2, 0.25) == 0.0);  // {rho2 = 0} = (-inf, 1/2]
    CHECK(rho_eval(2, 1.0) == 0.125);
    CHECK(rho_deriv(3, 0.0) == 1.0);
    CHECK_THROWS_AS(rho_eval(4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(rho_deriv(0, 0.0), std::invalid_argument);
}

TEST_CASE("rho3 oddness is exact in floating point") {
    for (double x : linspace(0.0, 4.0, 1001)) {
        CHECK(rho3(-x) == -rho3(x));
        CHECK(rho3_deriv(-x) == rho3_deriv(x));
    }
}

TEST_CASE("rho integral constants") {
    const auto c1 = compute_c_rho(1, 1e-10);
    CHECK(c1.value >= 1.0 / 1024.0);
    CHECK(c1.value <= 1.0 / 128.0);
    CHECK(c1.error_bound <= 1e-10);

    const auto c2 = compute_c_rho(2, 1e-10);
    CHECK(c2.value >= 1.0 / 64.0);
    CHECK(c2.error_bound <= 1e-10);

    CHECK_THROWS_AS(compute_c_rho(3, 1e-10), std::invalid_argument);
}

TEST_CASE("c_rho1 against the composite-Simpson oracle") {
    // reference recorded from the 10^6-panel composite-Simpson oracle below
    constexpr double kCRho1Reference = 0.0031695722872918082;

    const double oracle =
        simpson_oracle([](double x) { const double r = rho1(x); return r * r; }, 0.0, 0.5,
                       1000000);
    const auto adaptive = compute_c_rho(1, 1e-12);
    CHECK(adaptive.value == Catch::Approx(oracle).margin(1e-10));
    CHECK(adaptive.value == Catch::Approx(kCRho1Reference).margin(1e-10));

    // by the point symmetry of theta, c_rho2 = (1/8) * (1/2) * (1/2) = 1/32
    const double oracle2 = simpson_oracle([](double x) { return rho2(x); }, 0.5, 1.0, 1000000);
    const auto adaptive2 = compute_c_rho(2, 1e-12);
    CHECK(adaptive2.value == Catch::Approx(oracle2).margin(1e-10));
    CHECK(adaptive2.value == Catch::Approx(1.0 / 32.0).margin(1e-10));
}

TEST_CASE("quadrature tolerance failure propagates") {
    CHECK_THROWS_AS(compute_c_rho(1, 1e-30, 32), QuadratureError);
}

TEST_CASE("SDE bump family") {
    SECTION("m = 1: integral identity") {
        const auto fam = build_bump_family_sde(1, 1e-10);
        const auto q = integrate_adaptive(fam.members[0].value, 0.0, 0.5, 1e-12, 50000, 0.0, 64);
        CHECK(q.value == Catch::Approx(1.0 / 144.0).margin(1e-10));
    }
    SECTION("m = 17: c0 lower bound") {
        const auto fam = build_bump_family_sde(17, 1e-10);
        CHECK(fam.c0 >= 1.0 / (6.0 * 17 * 6.0 * 17));
    }
    SECTION("m = 5: member sup norm") {
        const auto fam = build_bump_family_sde(5, 1e-10);
        double sup = 0.0;
        for (double x : linspace(0.0, 0.5, 20001))
            sup = std::max(sup, fam.members[2].value(x));
        CHECK(sup <= 1.0 / 120.0 + 1e-15);
    }
    SECTION("supports are disjoint and correctly placed") {
        const auto fam = build_bump_family_sde(5, 1e-10);
        for (int i = 1; i <= 5; ++i) {
            const auto [lo, hi] = fam.support(i);
            CHECK(lo == Catch::Approx((i - 1) / 10.0));
            CHECK(hi == Catch::Approx(i / 10.0));
            CHECK(fam.members[i - 1].value(lo) == 0.0);
            CHECK(fam.members[i - 1].value(hi) == 0.0);
            CHECK(fam.members[i - 1].value(0.5 * (lo + hi)) > 0.0);
        }
        for (double x : linspace(-0.2, 0.7, 5000)) {
            for (int i = 1; i <= 5; ++i)
                for (int j = i + 1; j <= 5; ++j)
                    CHECK(fam.members[i - 1].value(x) * fam.members[j - 1].value(x) == 0.0);
        }
    }
    SECTION("rejects nonpositive m") {
        CHECK_THROWS_AS(build_bump_family_sde(0, 1e-10), std::invalid_argument);
    }
}

TEST_CASE("finite-difference certificates for the constructed functions") {
    std::vector<std::pair<SmoothScalarFn, std::pair<double, double>>> cases;
    cases.push_back({MollifierEta(0.0, 1.0).as_fn(), {-10.0, 2.0}});
    cases.push_back({MollifierTheta(0.0, 1.0, 0.0, 1.0).as_fn(), {-2.0, 3.0}});
    cases.push_back({rho_fn(1), {-2.0, 2.5}});
    cases.push_back({rho_fn(2), {-1.5, 3.0}});
    cases.push_back({rho_fn(3), {-3.0, 3.0}});
    const auto fam = build_bump_family_sde(5, 1e-10);
    cases.push_back({fam.members[1], {fam.support(2).first - 2.0, fam.support(2).second + 2.0}});

    for (const auto& [fn, range] : cases) {
        INFO(fn.label);
        const auto grid = linspace(range.first, range.second, 10000);
        double worst = 0.0;
        for (double x : grid) {
            const double d = fn.deriv(x);
            const double fd = central_diff(fn.value, x);
            worst = std::max(worst, std::abs(d - fd) / (1.0 + std::abs(d)));
        }
        CHECK(worst <= 1e-5);
        // sup-norm certificates hold on the grid
        for (double x : grid) {
            CHECK(std::abs(fn.value(x)) <= fn.sup_bound * (1.0 + 1e-12) + 1e-300);
            CHECK(std::abs(fn.deriv(x)) <= fn.deriv_sup_bound * (1.0 + 1e-12) + 1e-300);
        }
    }
}

TEST_CASE("monotonicity of eta and theta on grids") {
    MollifierEta eta(0.0, 1.0);
    MollifierTheta theta(0.0, 1.0, 0.0, 1.0);
    // non-decreasing everywhere
    const auto full = linspace(-8.0, 3.0, 5000);
    for (std::size_t i = 1; i < full.size(); ++i) {
        CHECK(eta.eval(full[i]) >= eta.eval(full[i - 1]));
        CHECK(theta.eval(full[i]) >= theta.eval(full[i - 1]));
    }
    // strictly increasing inside the transitions (away from the endpoints,
    // where the tails drop below double resolution)
    const auto gl = linspace(-8.0, -0.05, 5000);
    for (std::size_t i = 1; i < gl.size(); ++i) CHECK(eta.eval(gl[i]) > eta.eval(gl[i - 1]));
    const auto gt = linspace(0.05, 0.95, 5000);
    for (std::size_t i = 1; i < gt.size(); ++i) CHECK(theta.eval(gt[i]) > theta.eval(gt[i - 1]));
}
