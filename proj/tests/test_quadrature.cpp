#include <catch2/catch_amalgamated.hpp>

#include <gammaspace/quadrature.hpp>

#include <cmath>

using namespace gammaspace;

TEST_CASE("unit box integrates exactly", "[quadrature]") {
    auto logf = [](double) { return 0.0; };
    auto r = integrate_full(logf, {}, 1.0, 1e-10, EndHint{0.0, 0.0});
    CHECK(r.converged);
    CHECK(r.value == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("gamma function moment over the half line", "[quadrature]") {
    // ∫_0^inf t^{1/2} e^{-t} dt = sqrt(pi)/2; tail decay detected geometrically.
    auto logf = [](double y) { return 0.5 * y - std::exp(y); };
    auto r = integrate_full(logf, {}, inf, 1e-10, EndHint{0.5, 0.0}, EndHint{});
    CHECK(r.converged);
    CHECK(r.value == Catch::Approx(std::sqrt(M_PI) / 2.0).epsilon(1e-9));
}

TEST_CASE("rational tail with power hint", "[quadrature]") {
    auto logf = [](double y) { return -std::log1p(std::exp(2.0 * y)); };
    auto r = integrate_full(logf, {1.0}, inf, 1e-10, EndHint{0.0, 0.0}, EndHint{-2.0, 0.0});
    CHECK(r.converged);
    CHECK(r.value == Catch::Approx(M_PI / 2.0).epsilon(1e-9));
}

TEST_CASE("marginal log head needs the analytic remainder", "[quadrature]") {
    // ∫_0^{1/e} t^{-1} (log 1/t)^{-2} dt = 1 exactly.
    auto logf = [](double y) { return -y - 2.0 * std::log(-y); };
    auto r = integrate_head(logf, -1.0, 1e-9, EndHint{-1.0, 2.0});
    CHECK(r.converged);
    CHECK(r.value == Catch::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("marginal log tail needs the analytic remainder", "[quadrature]") {
    // ∫_e^inf t^{-1} (log t)^{-3} dt = 1/2 exactly.
    auto logf = [](double y) { return -y - 3.0 * std::log(y); };
    auto r = integrate_tail(logf, 1.0, 1e-9, EndHint{-1.0, 3.0});
    CHECK(r.converged);
    CHECK(r.value == Catch::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("unhinted slow decay is reported as non-converged", "[quadrature]") {
    auto logf = [](double y) { return -1.0001 * y; };
    auto r = integrate_tail(logf, 0.0, 1e-9, EndHint{});
    CHECK_FALSE(r.converged);
    // With the hint the same integral is immediate: ∫_1^inf t^{-1.0001} = 1/0.0001.
    auto r2 = integrate_tail(logf, 0.0, 1e-9, EndHint{-1.0001, 0.0});
    CHECK(r2.converged);
    CHECK(r2.value == Catch::Approx(10000.0).epsilon(1e-8));
}

TEST_CASE("grid sup with golden polish", "[quadrature]") {
    auto logf = [](double y) { return y - std::exp(y); };  // max of t e^{-t} at t = 1
    auto s = log_grid_sup(logf, std::log(1e-8), std::log(1e4), 16);
    CHECK(s.value == Catch::Approx(std::exp(-1.0)).epsilon(1e-10));
    CHECK(s.argmax == Catch::Approx(1.0).epsilon(1e-5));
    CHECK_FALSE(s.at_lower_edge);
    CHECK_FALSE(s.at_upper_edge);

    auto rising = [](double y) { return y; };  // sup sits at the upper edge
    auto e = log_grid_sup(rising, 0.0, std::log(100.0), 16);
    CHECK(e.at_upper_edge);
    CHECK(e.value == Catch::Approx(100.0).epsilon(1e-9));
}
