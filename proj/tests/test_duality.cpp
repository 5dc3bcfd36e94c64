#include <catch2/catch_amalgamated.hpp>

#include <gammaspace/duality.hpp>
#include <gammaspace/random.hpp>

#include <cmath>

using namespace gammaspace;

namespace {
const PiecewisePowerWeight kConst = PiecewisePowerWeight::power(1.0, 0.0);
const PiecewisePowerWeight kSqrt = PiecewisePowerWeight::power(1.0, 0.5);

double power_dual_coeff(double c, double alpha, double p) {
    // For w = c t^alpha the dual weight is exactly C t^{-alpha (p'-1)}.
    double pp = p / (p - 1.0);
    double kappa = alpha + 1.0, delta = p - kappa;
    double K = 1.0 / kappa + 1.0 / delta;
    return std::pow(c, 1.0 - pp) / (kappa * delta * std::pow(K, pp + 1.0));
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }
}  // namespace

TEST_CASE("dual weight closed forms for power weights", "[duality]") {
    DualWeight psi(2.0, kConst);
    for (double t : {1e-6, 0.37, 1.0, 7.0, 1e6})
        CHECK(psi(t) == Catch::Approx(0.125).epsilon(1e-12));
    CHECK(psi.asym_zero() == 0.0);
    CHECK(psi.asym_inf() == 0.0);
    CHECK_FALSE(psi.log_at_zero());
    CHECK_FALSE(psi.log_at_inf());

    DualWeight psis(2.0, kSqrt);
    CHECK(psis(1.0) == Catch::Approx(9.0 / 128.0).epsilon(1e-12));
    CHECK(psis(4.0) == Catch::Approx(9.0 / 256.0).epsilon(1e-12));
    CHECK(psis.asym_zero() == Catch::Approx(-0.5));
    CHECK(psis.asym_inf() == Catch::Approx(-0.5));

    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        double p = rng.uniform(1.2, 3.5);
        double alpha = rng.uniform(-0.9, p - 1.1);
        double c = rng.uniform(0.2, 5.0);
        auto w = PiecewisePowerWeight::power(c, alpha);
        DualWeight dw(p, w);
        double C = power_dual_coeff(c, alpha, p);
        double slope = -alpha * (dw.conjugate() - 1.0);
        for (double t : {1e-5, 0.3, 1.0, 10.0, 1e5})
            REQUIRE(dw(t) == Catch::Approx(C * std::pow(t, slope)).epsilon(1e-10));
    }
}

TEST_CASE("dual weight matches the operator factorization", "[duality]") {
    // p * psi = (P phi)(Q_p phi) / [(P Q_p) phi]^{p'+1} pointwise.
    Rng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        double p = rng.uniform(1.2, 3.5);
        auto w = random_weight(rng, p, 4);
        DualWeight psi(p, w);
        double pp = psi.conjugate();
        for (double t : {1e-3, 0.2, 1.0, 5.0, 1e3}) {
            double A = moment(w, 0, t, 0);
            double lhs = p * psi(t);
            double rhs = (A / t) * q_sub_p(w, p, t) *
                         std::pow(t / phi_bracket(w, p, t), pp + 1.0);
            REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-10));
        }
    }
}

TEST_CASE("dual weight asymptotic branches", "[duality]") {
    SECTION("marginal head exponent gains a log") {
        PiecewisePowerWeight w;
        w.b = inf;
        w.pieces = {WeightPiece{0, 1, 1, 1.0}, WeightPiece{1, inf, 1, -0.5}};
        DualWeight psi(2.0, w);
        CHECK(psi.asym_zero() == -1.0);
        CHECK(psi.log_at_zero());
        CHECK(psi.asym_inf() == Catch::Approx(0.5));
        CHECK_FALSE(psi.log_at_inf());
        auto head = psi.head_integral(0.5, 0.0, 1e-9);
        CHECK(head.converged);
        CHECK(head.value > 0.0);
    }
    SECTION("marginal tail exponent gains a log") {
        PiecewisePowerWeight w;
        w.b = inf;
        w.pieces = {WeightPiece{0, 1, 1, 0}, WeightPiece{1, inf, 1, -1.0}};
        DualWeight psi(2.0, w);
        CHECK(psi.asym_zero() == 0.0);
        CHECK(psi.asym_inf() == Catch::Approx(1.0));
        CHECK(psi.log_at_inf());
    }
    SECTION("integrable tail saturates") {
        PiecewisePowerWeight w;
        w.b = inf;
        w.pieces = {WeightPiece{0, 1, 1, 0}, WeightPiece{1, inf, 1, -2.0}};
        DualWeight psi(2.0, w);
        CHECK(psi.asym_inf() == Catch::Approx(0.0));
        CHECK_FALSE(psi.log_at_inf());
        // A -> 2, B ~ t^{-3}/3, Phi -> 2, so psi -> 2/(3 * 8) = 1/12.
        CHECK(psi(1e8) == Catch::Approx(1.0 / 12.0).epsilon(1e-6));
    }
}

TEST_CASE("dual weight head and tail integrals", "[duality]") {
    DualWeight psi(2.0, kConst);
    CHECK(psi.head_integral(3.0, 0.0, 1e-9).value == Catch::Approx(3.0 / 8.0).epsilon(1e-9));
    CHECK(psi.tail_integral(3.0, -2.0, 1e-9).value ==
          Catch::Approx(1.0 / 24.0).epsilon(1e-9));

    DualWeight psis(2.0, kSqrt);
    CHECK(psis.head_integral(1.0, 0.0, 1e-9).value ==
          Catch::Approx(9.0 / 64.0).epsilon(1e-9));
    CHECK(psis.tail_integral(1.0, -2.0, 1e-9).value ==
          Catch::Approx(3.0 / 64.0).epsilon(1e-9));
}

TEST_CASE("two-term associate norm goldens", "[duality]") {
    CHECK(dual_norm(2.0, kConst, StepFunction::indicator(1.0)) ==
          Catch::Approx(0.5).epsilon(1e-9));
    // psi = (9/128) t^{-1/2}: integral of min(1,1/t)^2 psi is (9/128)(2 + 2/3).
    CHECK(dual_norm(2.0, kSqrt, StepFunction::indicator(1.0)) ==
          Catch::Approx(std::sqrt(3.0) / 4.0).epsilon(1e-9));
    CHECK(dual_norm(2.0, kConst, StepFunction{}) == 0.0);
}

TEST_CASE("associate norm is homogeneous and monotone", "[duality]") {
    Rng rng(414);
    for (int trial = 0; trial < 10; ++trial) {
        double p = rng.uniform(1.3, 3.0);
        auto w = random_weight(rng, p, 3);
        auto g = random_step(rng, 4);
        double base = dual_norm(p, w, g);
        REQUIRE(dual_norm(p, w, scale(g, 3.0)) == Catch::Approx(3.0 * base).epsilon(1e-9));
    }
}

TEST_CASE("integrable base weight adds the flat correction", "[duality]") {
    PiecewisePowerWeight w;
    w.b = 1.0;
    w.pieces = {WeightPiece{0, 1, 1, 0}};
    DualWeight psi(2.0, w);
    // A = t, B = 1/t - 1, Phi = 2t - t^2, so psi = (1-t)/(2-t)^3 on (0,1).
    CHECK(psi(0.5) == Catch::Approx(4.0 / 27.0).epsilon(1e-12));
    // Norm part: [int_0^1 psi]^{1/2} = sqrt(1/8); correction: 1/1^{1/2}.
    CHECK(dual_norm(2.0, w, StepFunction::indicator(1.0)) ==
          Catch::Approx(1.0 + std::sqrt(0.125)).epsilon(1e-9));
}

TEST_CASE("oracle golden case and battery bands", "[duality]") {
    auto g = StepFunction::indicator(1.0);
    auto best = associate_norm_oracle(2.0, kConst, g);
    CHECK(best.value == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
    CHECK_FALSE(best.family.empty());
    double dn = dual_norm(2.0, kConst, g);
    double ratio = best.value / dn;
    CHECK(ratio > 0.1);
    CHECK(ratio < 100.0);
    CHECK(ratio == Catch::Approx(std::sqrt(2.0)).epsilon(1e-5));

    auto zero = associate_norm_oracle(2.0, kConst, StepFunction{});
    CHECK(zero.value == 0.0);
    CHECK(zero.family == "zero");
}

TEST_CASE("oracle dominates the exact indicator ratios", "[duality]") {
    Rng rng(9090);
    for (int trial = 0; trial < 8; ++trial) {
        double p = rng.uniform(1.3, 3.0);
        auto w = random_weight(rng, p, 3);
        auto g = random_step(rng, 4);
        auto gs = rearrange(g);
        auto best = associate_norm_oracle(p, w, g, 8);
        double sup_ind = 0.0;
        for (double s = 1e-5; s < 1e4; s *= 2.5)
            sup_ind = std::max(sup_ind,
                               gs.integral_to(s) / std::pow(phi_bracket(w, p, s), 1.0 / p));
        REQUIRE(best.value >= sup_ind - 1e-12);
        // Indicator g-breaks sit on the grid, so those ratios are attained.
        double a = gs.support_end();
        double exact = gs.integral() / std::pow(phi_bracket(w, p, a), 1.0 / p);
        REQUIRE(best.value >= exact * (1.0 - 1e-12));
    }
}

TEST_CASE("oracle is deterministic and stable under grid doubling", "[duality]") {
    Rng rng(555);
    double p = rng.uniform(1.3, 3.0);
    auto w = random_weight(rng, p, 3);
    auto g = random_step(rng, 4);
    auto a = associate_norm_oracle(p, w, g, 20);
    auto b = associate_norm_oracle(p, w, g, 20);
    REQUIRE(a.value == b.value);
    REQUIRE(a.family == b.family);
    auto dense = associate_norm_oracle(p, w, g, 20, 32);
    REQUIRE(std::fabs(dense.value - a.value) <= 0.05 * a.value);
}

TEST_CASE("flat profile wins for an integrable weight", "[duality]") {
    PiecewisePowerWeight w;
    w.b = 1.0;
    w.pieces = {WeightPiece{0, 1, 1, 0}};
    auto best = associate_norm_oracle(2.0, w, StepFunction::indicator(1.0));
    CHECK(best.value == Catch::Approx(1.0).epsilon(1e-9));
    CHECK(best.family == "flat-limit");
}

TEST_CASE("conjugate bracket ratio is one half for the unit weight", "[duality]") {
    for (double t : {0.3, 1.0, 7.0})
        CHECK(phps_ratio(2.0, kConst, t) == Catch::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("conjugate bracket ratio is constant for pure powers", "[duality]") {
    double at1 = phps_ratio(2.0, kSqrt, 1.0);
    for (double t : {1e-5, 1e-2, 10.0, 1e5})
        CHECK(phps_ratio(2.0, kSqrt, t) == Catch::Approx(at1).epsilon(1e-6));

    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        double p = rng.uniform(1.3, 3.0);
        auto w = random_weight(rng, p, 3);
        for (double t : {1e-6, 1e-3, 1.0, 1e3, 1e6}) {
            double r = phps_ratio(p, w, t);
            REQUIRE(r > 1e-3);
            REQUIRE(r < 1e3);
        }
    }

    PiecewisePowerWeight finite;
    finite.b = 1.0;
    finite.pieces = {WeightPiece{0, 1, 1, 0}};
    CHECK_THROWS_AS(phps_ratio(2.0, finite, 0.5), std::domain_error);
}

TEST_CASE("bilinear kernel bound golden values", "[duality]") {
    auto chi = StepFunction::indicator(1.0);

    SECTION("decreasing side with constant kernel") {
        // A/Phi = 1/2 everywhere, so lhs = (1/2)^{3/2}; rhs = 90 * 1 * 0.5.
        auto [lhs, rhs] = monotone_kernel_bounds(2.0, kConst, chi, chi, 1);
        CHECK(lhs == Catch::Approx(std::pow(0.5, 1.5)).epsilon(1e-8));
        CHECK(rhs == Catch::Approx(45.0).epsilon(1e-8));
        CHECK(lhs <= rhs);
    }
    SECTION("increasing side with unit kernel") {
        // p t^p B / Phi = 1 for the unit weight, so lhs = |(1,2)| = 1;
        // rhs = 90 sqrt(1/2) sqrt(1/3).
        auto f = StepFunction::box(1.0, 2.0);
        auto g = StepFunction::indicator(2.0);
        auto [lhs, rhs] = monotone_kernel_bounds(2.0, kConst, f, g, 2);
        CHECK(lhs == Catch::Approx(1.0).epsilon(1e-8));
        CHECK(rhs == Catch::Approx(90.0 / std::sqrt(6.0)).epsilon(1e-7));
        CHECK(lhs <= rhs);
    }
    SECTION("zero f gives zero on both sides") {
        auto [l1, r1] = monotone_kernel_bounds(2.0, kConst, StepFunction{}, chi, 1);
        CHECK(l1 == 0.0);
        CHECK(r1 == 0.0);
        auto [l2, r2] = monotone_kernel_bounds(2.0, kConst, StepFunction{}, chi, 2);
        CHECK(l2 == 0.0);
        CHECK(r2 == 0.0);
    }
    SECTION("monotonicity preconditions") {
        auto rising = StepFunction::box(1.0, 2.0);
        CHECK_THROWS_AS(monotone_kernel_bounds(2.0, kConst, rising, chi, 1), std::invalid_argument);
        StepFunction falling;
        falling.breaks = {0.0, 1.0, 2.0};
        falling.values = {2.0, 1.0};
        CHECK_THROWS_AS(monotone_kernel_bounds(2.0, kConst, falling, chi, 2), std::invalid_argument);
        CHECK_THROWS_AS(monotone_kernel_bounds(2.0, kConst, chi, chi, 3), std::invalid_argument);
    }
}

TEST_CASE("bilinear kernel bound holds on random triples", "[duality]") {
    Rng rng(606);
    for (int trial = 0; trial < 60; ++trial) {
        double p = rng.uniform(1.2, 3.2);
        auto w = random_weight(rng, p, 3);
        auto f = random_decreasing_step(rng, 5);
        auto g = random_step(rng, 4);
        auto [lhs, rhs] = monotone_kernel_bounds(p, w, f, g, 1);
        REQUIRE(lhs <= rhs * (1.0 + 1e-9) + 1e-300);
    }
    for (int trial = 0; trial < 60; ++trial) {
        double p = rng.uniform(1.2, 3.2);
        auto w = random_weight(rng, p, 3);
        auto d = random_decreasing_step(rng, 5);
        StepFunction f;
        f.breaks = d.breaks;
        f.values.assign(d.values.rbegin(), d.values.rend());
        auto g = random_step(rng, 4);
        auto [lhs, rhs] = monotone_kernel_bounds(p, w, f, g, 2);
        REQUIRE(lhs <= rhs * (1.0 + 1e-9) + 1e-300);
    }
}

TEST_CASE("symmetrized-average duality golden case", "[duality]") {
    auto g = StepFunction::indicator(1.0);

    // Independent value for the right side: S chi = log(1 + 1/t) exactly, and
    // int_0^inf log(1+1/t)^2 dt = pi^2 / 3, so the norm is pi / (2 sqrt 6).
    auto logf = [&](double y) {
        double s = stieltjes(g, std::exp(y));
        return 2.0 * std::log(s) - std::log(8.0);
    };
    auto direct = integrate_log(logf, std::log(1e-12), std::log(1.0), 1e-10);
    direct += integrate_log(logf, std::log(1.0), std::log(1e12), 1e-10);
    CHECK(std::sqrt(direct.value) ==
          Catch::Approx(M_PI / (2.0 * std::sqrt(6.0))).epsilon(1e-6));

    double ratio = omega_duality_ratio(2.0, kConst, g);
    CHECK(ratio >= 1.0 / 8.0);
    CHECK(ratio <= 8.0);
    // The indicator candidate at s = 1/e already pairs to sqrt(2/e).
    double floor = std::sqrt(2.0 / std::exp(1.0)) / (M_PI / (2.0 * std::sqrt(6.0)));
    CHECK(ratio >= floor * (1.0 - 2e-3));

    double dense = omega_duality_ratio(2.0, kConst, g, 32);
    CHECK(std::fabs(dense - ratio) <= 0.05 * ratio);
}

TEST_CASE("symmetrized-average duality edge cases", "[duality]") {
    CHECK(omega_duality_ratio(2.0, kConst, StepFunction{}) == 1.0);

    PiecewisePowerWeight finite;
    finite.b = 1.0;
    finite.pieces = {WeightPiece{0, 1, 1, 0}};
    CHECK_THROWS_AS(omega_duality_ratio(2.0, finite, StepFunction::indicator(0.5)),
                    std::domain_error);

    Rng rng(88);
    for (int trial = 0; trial < 4; ++trial) {
        double p = rng.uniform(1.4, 2.8);
        auto w = random_weight(rng, p, 2);
        auto g = random_step(rng, 3);
        double r = omega_duality_ratio(p, w, g);
        REQUIRE(r > 0.01);
        REQUIRE(r < 100.0);
    }
}

TEST_CASE("dual-weight balance golden case", "[duality]") {
    auto out = dual_weight_balance(2.0, kConst, 1.0);
    CHECK(out.kernel_product == Catch::Approx(std::sqrt(2.0 / 27.0)).epsilon(1e-6));
    CHECK(out.residual == Catch::Approx(std::sqrt(2.0 / 27.0) - 1.0).epsilon(1e-6));
    CHECK(out.phihat_value == Catch::Approx(0.25).epsilon(1e-12));
    CHECK(out.domination_lhs == Catch::Approx(0.25).epsilon(1e-8));
    CHECK(out.domination_rhs == Catch::Approx(0.125).epsilon(1e-8));
    CHECK(out.domination_ok);

    PiecewisePowerWeight finite;
    finite.b = 1.0;
    finite.pieces = {WeightPiece{0, 1, 1, 0}};
    CHECK_THROWS_AS(dual_weight_balance(2.0, finite, 0.5), std::domain_error);
}

TEST_CASE("dual-weight balance battery matches the Beta closed form", "[duality]") {
    for (double p : {1.5, 2.0, 3.0}) {
        double pp = p / (p - 1.0);
        for (double alpha : {-0.5, 0.0, (p - 1.0) / 2.0}) {
            auto w = PiecewisePowerWeight::power(1.0, alpha);
            double kappa = alpha + 1.0, delta = p - kappa;
            double beta = alpha * (1.0 - pp);
            double M = (1.0 / kappa) * (p / delta) /
                       std::pow(1.0 / kappa + p / delta, pp + 1.0);
            double expect = std::exp(log_beta(kappa, delta) / p) *
                            std::pow(M * std::exp(log_beta(beta + 1.0, pp - beta - 1.0)),
                                     1.0 / pp);
            double first = 0.0;
            for (double t : {0.1, 1.0, 10.0}) {
                auto out = dual_weight_balance(p, w, t);
                REQUIRE(out.kernel_product == Catch::Approx(expect).epsilon(1e-6));
                REQUIRE(out.kernel_product > 0.1);
                REQUIRE(out.kernel_product < 10.0);
                REQUIRE(out.domination_ok);
                if (t == 0.1)
                    first = out.phihat_value * std::pow(t, alpha * (pp - 1.0));
                else
                    REQUIRE(out.phihat_value * std::pow(t, alpha * (pp - 1.0)) ==
                            Catch::Approx(first).epsilon(1e-3));
            }
        }
    }
}

TEST_CASE("dual-weight balance on a two-regime weight", "[duality]") {
    PiecewisePowerWeight w;
    w.b = inf;
    w.pieces = {WeightPiece{0, 1, 1, 0}, WeightPiece{1, inf, 1, 0.5}};
    for (double t : {0.5, 2.0}) {
        auto out = dual_weight_balance(2.0, w, t);
        REQUIRE(out.kernel_product > 0.1);
        REQUIRE(out.kernel_product < 10.0);
        REQUIRE(out.domination_ok);
    }
}
