#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hardquad/quadrature.hpp"

using namespace hardquad;

TEST_CASE("adaptive quadrature reproduces closed forms within certificate") {
    auto cubic = integrate_adaptive([](double x) { return x * x * x; }, 0.0, 1.0, 1e-12);
    CHECK(std::abs(cubic.value - 0.25) <= cubic.error_bound + 1e-15);

    auto sine = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
    CHECK(std::abs(sine.value - 2.0) <= std::max(sine.error_bound, 1e-13));

    auto gauss = integrate_adaptive([](double x) { return std::exp(-0.5 * x * x); }, -10.0, 10.0,
                                    1e-12);
    CHECK(gauss.value == Catch::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("certificate bounds the actual error") {
    auto r = integrate_adaptive([](double x) { return std::exp(x) * std::cos(7.0 * x); }, 0.0,
                                3.0, 1e-9);
    const double truth = (std::exp(3.0) * (std::cos(21.0) + 7.0 * std::sin(21.0)) - 1.0) / 50.0;
    CHECK(std::abs(r.value - truth) <= r.error_bound + 1e-14);
    CHECK(r.error_bound <= 1e-9);
}

TEST_CASE("empty interval integrates to zero") {
    auto r = integrate_adaptive([](double x) { return x; }, 2.0, 2.0, 1e-10);
    CHECK(r.value == 0.0);
    CHECK(r.error_bound == 0.0);
}

TEST_CASE("subdivision budget exhaustion raises") {
    // |x|^{-1/2}-type spike needs many panels; a budget of 4 cannot reach 1e-12
    auto f = [](double x) { return 1.0 / std::sqrt(std::abs(x) + 1e-14); };
    CHECK_THROWS_AS(integrate_adaptive(f, 0.0, 1.0, 1e-13, 4), QuadratureError);
}

TEST_CASE("invalid arguments are rejected") {
    CHECK_THROWS_AS(integrate_adaptive([](double) { return 1.0; }, 1.0, 0.0, 1e-10),
                    QuadratureError);
    CHECK_THROWS_AS(integrate_adaptive([](double) { return 1.0; }, 0.0, 1.0, 0.0),
                    QuadratureError);
}

TEST_CASE("log-space integration matches the log of the linear integral") {
    const double log_gauss =
        log_integrate([](double x) { return -0.5 * x * x; }, -12.0, 12.0, 20000);
    CHECK(log_gauss == Catch::Approx(0.5 * std::log(2.0 * M_PI)).margin(1e-10));

    // a shifted integrand whose linear value would underflow: exp(-3000) * gaussian
    const double shifted = log_integrate([](double x) { return -3000.0 - 0.5 * x * x; }, -12.0,
                                         12.0, 20000);
    CHECK(shifted == Catch::Approx(-3000.0 + 0.5 * std::log(2.0 * M_PI)).margin(1e-8));
}
