#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hardquad/adversary.hpp"
#include "hardquad/experiments.hpp"

using namespace hardquad;

TEST_CASE("prop1 bound formula") {
    CHECK(prop1_bound(17, 1, 0.1) == 0.1 / 136.0);  // exact, same operation order
    CHECK(prop1_bound(16, 1, 1.0) == 0.0);
    CHECK(prop1_bound(32, 1, 1.0) == Catch::Approx(1.0 / 16.0).epsilon(1e-15));
    CHECK(prop1_bound(8, 1, 1.0) < 0.0);  // vacuous, signed value returned

    CHECK(prop1_bound_log(17, 1, std::log(0.1)) ==
          Catch::Approx(std::log(0.1 / 136.0)).epsilon(1e-12));
    CHECK(std::isinf(prop1_bound_log(16, 1, 0.0)));
}

TEST_CASE("prop2 bound formulas") {
    const auto b1 = prop2_bounds(10, 4, 1.0);
    CHECK(b1.det == Catch::Approx(3.0));
    CHECK_FALSE(b1.ran.has_value());  // 4 > 10/4

    const auto b2 = prop2_bounds(132, 1, 1.0);
    REQUIRE(b2.ran.has_value());
    CHECK(*b2.ran == Catch::Approx(1.0).epsilon(1e-14));

    const auto b3 = prop2_bounds(9, 9, 2.0);
    CHECK(b3.det == 0.0);
}

TEST_CASE("khintchine inequality brute force") {
    SECTION("equality at a = (1, 1)") {
        const double a[] = {1.0, 1.0};
        CHECK(khintchine_verify(a));
    }
    SECTION("singleton") {
        const double a[] = {1.0};
        CHECK(khintchine_verify(a));
    }
    SECTION("random 8-vector") {
        std::mt19937_64 gen(11);
        std::normal_distribution<double> dist;
        std::vector<double> a(8);
        for (auto& x : a) x = dist(gen);
        CHECK(khintchine_verify(a));
    }
    SECTION("200 random vectors, k in 1..12") {
        std::mt19937_64 gen(12);
        std::normal_distribution<double> dist;
        std::uniform_int_distribution<int> klaw(1, 12);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> a(static_cast<std::size_t>(klaw(gen)));
            for (auto& x : a) x = dist(gen);
            CHECK(khintchine_verify(a));
        }
    }
    SECTION("length cap") {
        std::vector<double> a(13, 1.0);
        CHECK_THROWS_AS(khintchine_verify(a), std::invalid_argument);
        CHECK_THROWS_AS(khintchine_verify(std::span<const double>{}), std::invalid_argument);
    }
}

TEST_CASE("theorem-bound constants") {
    // independent one-line evaluations
    const double c_sde = 1.0 / (17.0 * std::pow(2.0, 7) * std::exp(1.0) * std::sqrt(M_PI));
    CHECK(theorem_sde_prefactor() == Catch::Approx(c_sde).epsilon(1e-12));
    CHECK(theorem_sde_prefactor() == Catch::Approx(9.53831e-5).epsilon(1e-5));

    const double c_1d =
        std::sqrt(2.0) * std::sin(1.0 / 12.0) * std::exp(-4.0) / (6.0 * std::sqrt(M_PI));
    CHECK(theorem_1d_prefactor() == Catch::Approx(c_1d).margin(1e-12));
    CHECK(theorem_1d_prefactor() == Catch::Approx(2.02740e-4).epsilon(1e-4));
}

TEST_CASE("SDE theorem bound") {
    const GrowthFn u = make_exp_cubic_u();
    SECTION("monotone non-increasing in n") {
        double prev = std::numeric_limits<double>::infinity();
        for (int n : {1, 2, 3, 5, 8}) {
            const double log_b = theorem_bound_sde_log(u, 1.0, 1.0, n);
            CHECK(log_b <= prev);
            prev = log_b;
        }
    }
    SECTION("proof-derived constant variant is the weaker requirement") {
        // 51^4 < 56^4 shrinks the inversion argument, so the bound grows
        CHECK(theorem_bound_sde_log(u, 1.0, 1.0, 1, true) >=
              theorem_bound_sde_log(u, 1.0, 1.0, 1, false));
    }
    SECTION("identity-u stub underflows gracefully, stays finite in log space") {
        GrowthFn stub{[](double x) { return x; }, 1e15, "identity stub"};
        const double v = theorem_bound_sde(stub, 1.0, 1.0, 1);
        CHECK(v == 0.0);
        const double lg = theorem_bound_sde_log(stub, 1.0, 1.0, 1);
        CHECK(std::isfinite(lg));
        // kappa = 16, argument 17^2 56^4 256 n^4
        const double arg = 17.0 * 17.0 * std::pow(56.0, 4) * 256.0;
        CHECK(lg == Catch::Approx(std::log(theorem_sde_prefactor()) - 8192.0 * arg * arg)
                        .epsilon(1e-10));
    }
    SECTION("inversion failure propagates") {
        CHECK_THROWS_AS(theorem_bound_sde(make_identity_u(50.0), 1.0, 1.0, 1),
                        GrowthInversionError);
    }
}

TEST_CASE("1-d theorem bound") {
    SECTION("u = x, n = 2") {
        GrowthFn u = make_identity_u();
        const double expect = theorem_1d_prefactor() * std::exp(-4.0);
        CHECK(theorem_bound_1d(u, 2) == Catch::Approx(expect).epsilon(1e-8));
        CHECK(theorem_bound_1d(u, 2) == Catch::Approx(3.713e-6).epsilon(1e-3));
    }
    SECTION("non-increasing in n") {
        GrowthFn u = make_affine_u(1.0, 1.0);
        double prev = std::numeric_limits<double>::infinity();
        for (int n : {1, 2, 4, 8}) {
            const double b = theorem_bound_1d(u, n);
            CHECK(b <= prev);
            prev = b;
        }
    }
}

TEST_CASE("SDE fooling family construction") {
    const GrowthFn u = make_exp_cubic_u();
    SECTION("v == 0 is vacuous") {
        const auto rep = build_fooling_sde(1, zero_fn(), u, 1e-10);
        CHECK(rep.vacuous);
        CHECK(rep.epsilon == 0.0);
    }
    SECTION("gap identity and pair consistency for the easy v") {
        const auto v = make_v_easy();
        const auto rep = build_fooling_sde(1, v, u, 1e-10);
        CHECK(rep.m == 17);
        CHECK_FALSE(rep.vacuous);
        auto inst = make_instance(rep.family->members[0], v, u, 1e-10);
        const auto direct = exact_expectation(inst);
        CHECK(rep.epsilon == Catch::Approx(2.0 * direct.value).margin(1e-8));
        CHECK(rep.bound_value == Catch::Approx(rep.epsilon / 136.0).epsilon(1e-12));
        // log and linear representations agree here
        CHECK(rep.log_epsilon == Catch::Approx(std::log(rep.epsilon)).margin(1e-5));
    }
}

TEST_CASE("fooling a deterministic SDE rule") {
    const GrowthFn u = make_exp_cubic_u();
    const auto v = make_v_easy();

    SECTION("zero queries, m = 2: everything untouched") {
        Strategy<Vec4, SdeTowerAnswer> none;
        none.next_node = [](std::span<const SdeTowerAnswer>, std::uint64_t) {
            return Vec4{0.0, 0.0, 0.0, 0.0};
        };
        none.stop_rule = [](std::string_view, std::uint64_t) { return std::size_t{0}; };
        none.estimator = [](std::span<const SdeTowerAnswer>, std::uint64_t) { return 0.0; };
        const auto rep = fool_deterministic_sde_rule(none, 0, v, u, 1e-10, 2);
        CHECK(rep.untouched == std::vector<int>{1, 2});
        CHECK(rep.measured_gap == Catch::Approx(2.0 * rep.epsilon).margin(1e-8));
    }
    SECTION("rule covering every support fools nothing") {
        const int m = 17;
        auto nodes1d = make_rule_nodes("equidistant", m, 0.0, 0.5);
        std::vector<Vec4> nodes;
        for (double x : nodes1d) nodes.push_back({0.0, 0.0, 0.0, x});
        auto rule = fixed_node_strategy<Vec4, SdeTowerAnswer>(nodes);
        const auto rep = fool_deterministic_sde_rule(rule, m, v, u, 1e-10, m);
        CHECK(rep.untouched.empty());
        CHECK(rep.measured_gap == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("half coverage: gap at least (m/2) epsilon") {
        const int m = 4;
        auto nodes1d = make_rule_nodes("equidistant", 2, 0.0, 0.5);
        std::vector<Vec4> nodes;
        for (double x : nodes1d) nodes.push_back({0.0, 0.0, 0.0, x});
        auto rule = fixed_node_strategy<Vec4, SdeTowerAnswer>(nodes);
        const auto rep = fool_deterministic_sde_rule(rule, 2, v, u, 1e-10, m);
        CHECK(rep.untouched.size() >= 2);
        CHECK(rep.measured_gap >=
              static_cast<double>(rep.untouched.size()) * rep.epsilon - 1e-8);
    }
    SECTION("budget enforcement") {
        auto rule = fixed_node_strategy<Vec4, SdeTowerAnswer>(
            {Vec4{0.0, 0.0, 0.0, 0.1}, Vec4{0.0, 0.0, 0.0, 0.2}});
        CHECK_THROWS_AS(fool_deterministic_sde_rule(rule, 1, v, u, 1e-10, 2),
                        BudgetExceededError);
    }
}

TEST_CASE("fooling chain for the demo class in log space") {
    const GrowthFn u = make_exp_cubic_u();
    const auto adm = GrowthAdmissibility::make(u, 1.0, 1.0);
    for (int n : {1, 2}) {
        DYNAMIC_SECTION("n = " << n) {
            const auto vn = build_v_n(adm, u, n, 1e-10);
            const auto rep = build_fooling_sde(n, vn.as_fn(), u, 1e-10, 0, vn.alpha_n + 8.0);
            REQUIRE(std::isfinite(rep.log_epsilon));

            // the averaging-chain floor for epsilon, evaluated in log space
            const double c1 = compute_c_rho(1, 1e-10).value;
            const double c2 = compute_c_rho(2, 1e-10).value;
            const double log_floor = std::log(2.0 * c2 / std::sqrt(2.0 * M_PI * c1)) +
                                     std::log(rho3(1.0) / 4.0) -
                                     vn.alpha_n * vn.alpha_n / (2.0 * c1);
            CHECK(rep.log_epsilon >= log_floor);
            // linear space: both sides underflow, the inequality stays trivially true
            CHECK(rep.epsilon >= std::exp(log_floor));

            // bound chain: the family bound dominates the closed-form theorem bound
            const double theorem_log = theorem_bound_sde_log(u, 1.0, 1.0, n);
            CHECK(rep.log_bound_value >= theorem_log);
        }
    }
}

TEST_CASE("1-d fooling pipeline") {
    const GrowthFn u = make_affine_u(1.0, 1.0);

    SECTION("constant pi/2 integrand: S_int is the full Gaussian mass") {
        const double s = s_int_gaussian([](double) { return M_PI / 2.0; }, -14.0, 14.0, 1e-12);
        CHECK(s == Catch::Approx(1.0).margin(1e-9));
    }
    SECTION("no nodes, n = 1: both intervals flipped") {
        const auto rep = fool_deterministic_quadrature({}, 1, u, 1e-11);
        CHECK(rep.m == 2);
        CHECK(rep.untouched == std::vector<int>{1, 2});
        CHECK(rep.integrand_gap ==
              Catch::Approx(rep.gaps[0] + rep.gaps[1]).margin(1e-12));
        CHECK(rep.integrand_gap >= 2.0 * rep.epsilon - 1e-12);
        CHECK(rep.signs == std::vector<int>{-1, -1});
    }
    SECTION("pair gaps dominate the analytic floor") {
        for (int n : {1, 2, 3}) {
            const auto rep = build_fooling_1d(n, u, 1e-11);
            const auto fam = rep.family;
            const double floor = std::sqrt(2.0 / M_PI) * std::sin(1.0 / 12.0) *
                                 std::exp(-4.0) / 3.0 *
                                 std::exp(-fam.support_start * fam.support_start) / n;
            for (double g : rep.gaps) CHECK(g >= floor - 1e-15);
            CHECK(rep.epsilon >= floor - 1e-15);
        }
    }
    SECTION("equidistant nodes: untouched count and measured gap") {
        // even n: interior equidistant nodes never land on a support
        // boundary (which would count as touching both neighbors)
        for (int n : {2, 4}) {
            const auto fam = build_bump_family_1d(n, u);
            const auto nodes =
                make_rule_nodes("equidistant", n, fam.support_start, fam.support_start + 2.0);
            const auto rep = fool_deterministic_quadrature(nodes, n, u, 1e-11);
            CHECK(static_cast<int>(rep.untouched.size()) >= rep.m - n);
            CHECK(rep.integrand_gap >=
                  static_cast<double>(rep.untouched.size()) * rep.epsilon - 1e-8);
            CHECK(rep.bound_value ==
                  Catch::Approx((rep.m - static_cast<double>(nodes.size())) / 2.0 * rep.epsilon));
        }
    }
    SECTION("node budget enforced") {
        std::vector<double> nodes = {0.0, 1.0, 2.0};
        CHECK_THROWS_AS(fool_deterministic_quadrature(nodes, 2, u, 1e-11),
                        std::invalid_argument);
    }
}

TEST_CASE("tower answers expose the truncated derivative data") {
    const GrowthFn u = make_exp_cubic_u();
    auto fam = std::make_shared<const BumpFamilySde>(build_bump_family_sde(2, 1e-10));
    std::vector<int> signs = {+1, -1};
    auto input = make_sde_tower_input(fam, signs, make_v_easy(), "mixed");

    // inside support 2 the combined h is the negated member
    const auto [lo2, hi2] = fam->support(2);
    const double mid2 = 0.5 * (lo2 + hi2);
    const auto ans = input.query(Vec4{0.0, 0.0, 0.0, mid2});
    CHECK(ans.a[2] == Catch::Approx(-fam->members[1].value(mid2)).epsilon(1e-14));
    CHECK(ans.higher_only_on_support);
    CHECK(ans.f == 0.0);
    CHECK(ans.b[1] == Catch::Approx(rho1(mid2)).epsilon(1e-14));
    CHECK(ans.da[3][2] == Catch::Approx(-fam->members[1].deriv(mid2)).epsilon(1e-14));
    CHECK(ans.da[0] == Vec4{0.0, 0.0, 0.0, 0.0});
}
