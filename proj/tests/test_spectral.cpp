#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "regobs/spectral.hpp"
#include "oracles.hpp"

using namespace regobs;
using spectral::Mode;
constexpr double kPi = std::numbers::pi;

namespace {
const Rectangle kUnit(0.0, 1.0, 0.0, 1.0);
}

TEST_CASE("eigenvalues on rectangles") {
    CHECK(spectral::eigenvalue(kUnit, {0, 0}) == 0.0);
    CHECK(spectral::eigenvalue(kUnit, {1, 0}) == doctest::Approx(-kPi * kPi).epsilon(1e-15));
    const Rectangle tall(0.0, 1.0, 0.0, 2.0);
    CHECK(spectral::eigenvalue(tall, {1, 0}) ==
          doctest::Approx(spectral::eigenvalue(tall, {0, 2})).epsilon(1e-15));
}

TEST_CASE("eigenfunction point values") {
    CHECK(spectral::eigenfunction_value(kUnit, {0, 0}, {0.123, 0.877}) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(spectral::eigenfunction_value(kUnit, {1, 0}, {0.5, 0.3}) ==
          doctest::Approx(0.0).epsilon(1e-15));
    // The sqrt(2) amplitude is whatever makes the mode L2-normalized; pin both.
    const auto phi = [](double x, double y) {
        return spectral::eigenfunction_value(kUnit, {1, 0}, {x, y});
    };
    const double mass = oracles::simpson_2d(
        [&](double x, double y) { return phi(x, y) * phi(x, y); }, 0, 1, 0, 1, 200);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(spectral::eigenfunction_value(kUnit, {1, 0}, {0.0, 0.0}) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("gradient matches central differences and the constant mode is flat") {
    const auto g0 = spectral::eigenfunction_gradient(kUnit, {0, 0}, {0.3, 0.9});
    CHECK(g0[0] == 0.0);
    CHECK(g0[1] == 0.0);

    const auto g = spectral::eigenfunction_gradient(kUnit, {1, 0}, {0.5, 0.7});
    CHECK(g[0] == doctest::Approx(-std::sqrt(2.0) * kPi).epsilon(1e-12));
    CHECK(g[1] == 0.0);

    const Rectangle dom(0.2, 1.7, -0.4, 0.9);
    const Mode mode{3, 2};
    auto f = [&](double x, double y) {
        return spectral::eigenfunction_value(dom, mode, {x, y});
    };
    const auto grad = spectral::eigenfunction_gradient(dom, mode, {0.83, 0.11});
    CHECK(grad[0] ==
          doctest::Approx(oracles::fd_partial_x(f, 0.83, 0.11)).epsilon(1e-6));
    CHECK(grad[1] ==
          doctest::Approx(oracles::fd_partial_y(f, 0.83, 0.11)).epsilon(1e-6));
}

TEST_CASE("outward normal derivative vanishes on the boundary") {
    const Rectangle dom(0.0, 1.3, 0.0, 0.7);
    for (int i = 0; i <= 3; ++i) {
        for (int j = 0; j <= 3; ++j) {
            for (double t : {0.0, 0.31, 0.77, 1.0}) {
                const Point left{dom.x_min, dom.y_min + t * dom.height()};
                const Point right{dom.x_max, dom.y_min + t * dom.height()};
                const Point bottom{dom.x_min + t * dom.width(), dom.y_min};
                const Point top{dom.x_min + t * dom.width(), dom.y_max};
                CHECK(std::abs(spectral::eigenfunction_gradient(dom, {i, j}, left)[0]) <=
                      1e-12);
                CHECK(std::abs(spectral::eigenfunction_gradient(dom, {i, j}, right)[0]) <=
                      1e-12);
                CHECK(std::abs(spectral::eigenfunction_gradient(dom, {i, j}, bottom)[1]) <=
                      1e-12);
                CHECK(std::abs(spectral::eigenfunction_gradient(dom, {i, j}, top)[1]) <= 1e-12);
            }
        }
    }
}

TEST_CASE("mode set ordering and tie-breaks") {
    const auto single = spectral::build_mode_set(kUnit, 0, 0, 0.0);
    REQUIRE(single.size() == 1);
    CHECK(single.mode(0) == Mode{0, 0});
    CHECK(single.mode_eigenvalue(0) == 0.0);

    const auto small = spectral::build_mode_set(kUnit, 1, 1, 0.0);
    REQUIRE(small.size() == 4);
    CHECK(small.mode(0) == Mode{0, 0});
    CHECK(small.mode(1) == Mode{0, 1}); // degenerate with (1,0); lexicographic first
    CHECK(small.mode(2) == Mode{1, 0});
    CHECK(small.mode(3) == Mode{1, 1});

    const Rectangle tall(0.0, 1.0, 0.0, 2.0);
    const auto set = spectral::build_mode_set(tall, 2, 2, 0.0);
    // (0,2) and (1,0) share an eigenvalue and must come out adjacent.
    std::size_t at02 = 0, at10 = 0;
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (set.mode(k) == Mode{0, 2}) at02 = k;
        if (set.mode(k) == Mode{1, 0}) at10 = k;
    }
    CHECK(at10 == at02 + 1);
    CHECK(set.mode_eigenvalue(at02) == set.mode_eigenvalue(at10));

    const auto shifted = spectral::build_mode_set(kUnit, 2, 2, 3.5);
    for (std::size_t k = 0; k + 1 < shifted.size(); ++k)
        CHECK(shifted.growth_rate(k) >= shifted.growth_rate(k + 1));
    CHECK(shifted.growth_rate(0) == 3.5);
}

TEST_CASE("eigenvalue grouping") {
    const auto square = spectral::build_mode_set(kUnit, 2, 2, 0.0);
    const auto groups = spectral::group_by_eigenvalue(square);
    // multiplicities on the unit square up to order 2: 1, 2, 1, 2, 1, 2
    REQUIRE(groups.size() == 6);
    CHECK(groups[0].multiplicity() == 1);
    CHECK(groups[1].multiplicity() == 2);
    CHECK(groups[1].members[0] == Mode{0, 1});
    CHECK(groups[1].members[1] == Mode{1, 0});

    std::size_t covered = 0;
    std::set<std::size_t> seen;
    for (const auto& g : groups) {
        covered += g.member_indices.size();
        for (auto idx : g.member_indices) CHECK(seen.insert(idx).second);
        for (std::size_t m = 0; m < g.members.size(); ++m)
            CHECK(std::abs(square.mode_eigenvalue(g.member_indices[m]) - g.eigenvalue) <=
                  1e-9 * std::max(1.0, std::abs(g.eigenvalue)));
    }
    CHECK(covered == square.size());

    // Incommensurate side lengths: no coincidences at this truncation; verify
    // by brute-force pairwise comparison.
    const Rectangle irr(0.0, 1.0, 0.0, std::sqrt(2.0));
    const auto iset = spectral::build_mode_set(irr, 2, 2, 0.0);
    for (std::size_t a = 0; a < iset.size(); ++a)
        for (std::size_t b = a + 1; b < iset.size(); ++b)
            CHECK(std::abs(iset.mode_eigenvalue(a) - iset.mode_eigenvalue(b)) > 1e-6);
    for (const auto& g : spectral::group_by_eigenvalue(iset)) CHECK(g.multiplicity() == 1);

    const auto lone = spectral::group_by_eigenvalue(spectral::build_mode_set(kUnit, 0, 0, 0.0));
    REQUIRE(lone.size() == 1);
    CHECK(lone[0].multiplicity() == 1);
}

TEST_CASE("orthonormality against an independent quadrature") {
    const Rectangle dom(0.0, 1.4, 0.0, 0.9);
    const auto set = spectral::build_mode_set(dom, 3, 3, 0.0);
    for (std::size_t a = 0; a < set.size(); ++a) {
        for (std::size_t b = a; b < set.size(); ++b) {
            const double ip = oracles::simpson_2d(
                [&](double x, double y) {
                    return spectral::eigenfunction_value(dom, set.mode(a), {x, y}) *
                           spectral::eigenfunction_value(dom, set.mode(b), {x, y});
                },
                dom.x_min, dom.x_max, dom.y_min, dom.y_max, 160);
            CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) <= 1e-8);
        }
    }
}

TEST_CASE("laplacian equals eigenvalue times eigenfunction at interior points") {
    const Rectangle dom(0.0, 1.0, 0.0, std::sqrt(2.0));
    for (int i = 0; i <= 4; i += 2) {
        for (int j = 1; j <= 4; j += 3) {
            const Mode mode{i, j};
            const double lam = spectral::eigenvalue(dom, mode);
            for (double x : {0.07, 0.45, 0.91}) {
                for (double y : {0.1, 0.73, 1.36}) {
                    // Independent analytic second derivatives of the product.
                    const double kx = i * kPi / dom.width();
                    const double ky = j * kPi / dom.height();
                    const double sx = spectral::axis_normalization(i, dom.width());
                    const double sy = spectral::axis_normalization(j, dom.height());
                    const double lap =
                        -sx * sy * (kx * kx + ky * ky) * std::cos(kx * (x - dom.x_min)) *
                        std::cos(ky * (y - dom.y_min));
                    const double ref = lam * spectral::eigenfunction_value(dom, mode, {x, y});
                    CHECK(lap == doctest::Approx(ref).epsilon(1e-9));
                }
            }
        }
    }
}
