#include <doctest.h>

#include <cmath>

#include "regobs/errors.hpp"
#include "regobs/quadrature.hpp"

using namespace regobs;

TEST_CASE("single panel integrates polynomials up to degree 15 exactly") {
    auto f = [](double x) { return 5.0 * std::pow(x, 15) - 3.0 * std::pow(x, 7) + x; };
    // antiderivative: 5 x^16/16 - 3 x^8/8 + x^2/2 on [0, 1]
    const double exact = 5.0 / 16.0 - 3.0 / 8.0 + 0.5;
    CHECK(quad::composite_1d(f, 0.0, 1.0, 1) == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("panel doubling converges on oscillatory integrands") {
    auto f = [](double x) { return std::cos(12.0 * x); };
    const double exact = std::sin(12.0) / 12.0;
    CHECK(quad::adaptive_1d(f, 0.0, 1.0) == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("2d adaptive rule matches a separable product") {
    auto f = [](double x, double y) { return std::cos(3.0 * x) * std::sin(2.0 * y + 0.3); };
    const Rectangle r(0.0, 1.0, 0.0, 2.0);
    const double exact =
        (std::sin(3.0) / 3.0) * ((std::cos(0.3) - std::cos(4.3)) / 2.0);
    CHECK(quad::adaptive_2d(f, r) == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("a jump inside the panel never reaches the tolerance") {
    auto f = [](double x) { return x < 0.31830988618 ? 0.0 : 1.0; };
    CHECK_THROWS_AS((void)quad::adaptive_1d(f, 0.0, 1.0), QuadratureNonConvergence);
}

TEST_CASE("line rule weights sum to the interval length") {
    const auto rule = quad::line_rule(-0.5, 2.0, 7);
    double sum = 0.0;
    for (double w : rule.weights) sum += w;
    CHECK(sum == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(rule.nodes.size() == 56);
}
