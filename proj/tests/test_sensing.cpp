#include <doctest.h>

#include <cmath>
#include <numbers>

#include "regobs/errors.hpp"
#include "regobs/sensing.hpp"
#include "oracles.hpp"

using namespace regobs;
using sensing::SensorSpec;
using spectral::Mode;
constexpr double kPi = std::numbers::pi;

namespace {
const Rectangle kUnit(0.0, 1.0, 0.0, 1.0);
}

TEST_CASE("point sensor coefficients are eigenfunction values") {
    const SensorSpec mid = sensing::InteriorPointSensor{{0.5, 0.5}};
    CHECK(sensing::sensor_coefficient(mid, {1, 0}, kUnit) ==
          doctest::Approx(0.0).epsilon(1e-15));
    const SensorSpec corner = sensing::BoundaryPointSensor{{0.0, 0.0}};
    CHECK(sensing::sensor_coefficient(corner, {1, 0}, kUnit) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("uniform zone coefficients") {
    const SensorSpec zone =
        sensing::InteriorZoneSensor{Rectangle(0.25, 0.75, 0.25, 0.75), sensing::UniformProfile{}};
    CHECK(sensing::sensor_coefficient(zone, {0, 0}, kUnit) ==
          doctest::Approx(0.25).epsilon(1e-12));

    // Full period of the order-2 cosine in x integrates to zero.
    const SensorSpec strip =
        sensing::InteriorZoneSensor{Rectangle(0.0, 1.0, 0.4, 0.6), sensing::UniformProfile{}};
    CHECK(std::abs(sensing::sensor_coefficient(strip, {2, 0}, kUnit)) <= 1e-12);

    // Generic zone against the independent quadrature oracle.
    const Rectangle support(0.12, 0.57, 0.3, 0.88);
    const SensorSpec generic = sensing::InteriorZoneSensor{support, sensing::UniformProfile{}};
    const double oracle = oracles::simpson_2d(
        [&](double x, double y) {
            return spectral::eigenfunction_value(kUnit, {3, 2}, {x, y});
        },
        support.x_min, support.x_max, support.y_min, support.y_max, 300);
    CHECK(sensing::sensor_coefficient(generic, {3, 2}, kUnit) ==
          doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("triangle profile zones integrate like the oracle") {
    const Rectangle support(0.2, 0.6, 0.1, 0.5);
    const sensing::TriangleProfile tri{{0.4, 0.3}};
    const SensorSpec zone = sensing::InteriorZoneSensor{support, tri};
    const double oracle = oracles::simpson_2d(
        [&](double x, double y) {
            return spectral::eigenfunction_value(kUnit, {2, 1}, {x, y}) *
                   sensing::profile_value(tri, support, {x, y});
        },
        support.x_min, support.x_max, support.y_min, support.y_max, 400);
    CHECK(sensing::sensor_coefficient(zone, {2, 1}, kUnit) ==
          doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("symmetric profiles null the center-vanishing cosines") {
    // Tent centered at x = 0.5: every odd x-order coefficient vanishes.
    const Rectangle support(0.3, 0.7, 0.2, 0.8);
    const SensorSpec zone =
        sensing::InteriorZoneSensor{support, sensing::TriangleProfile{{0.5, 0.5}}};
    for (int i : {1, 3}) {
        for (int j : {0, 1, 2})
            CHECK(std::abs(sensing::sensor_coefficient(zone, {i, j}, kUnit)) <= 1e-10);
    }
    CHECK(std::abs(sensing::sensor_coefficient(zone, {2, 0}, kUnit)) > 1e-3);
}

TEST_CASE("tabulated profiles are interpolated bilinearly") {
    sensing::TabulatedProfile tab;
    tab.rows = 3;
    tab.cols = 3;
    tab.values = {0.0, 0.5, 1.0, 0.5, 1.0, 0.5, 1.0, 0.5, 0.0};
    const Rectangle support(0.0, 1.0, 0.0, 1.0);
    CHECK(sensing::profile_value(tab, support, {0.0, 0.0}) == doctest::Approx(0.0));
    CHECK(sensing::profile_value(tab, support, {0.5, 0.5}) == doctest::Approx(1.0));
    CHECK(sensing::profile_value(tab, support, {0.25, 0.0}) == doctest::Approx(0.25));
    CHECK(sensing::profile_value(tab, support, {0.5, 0.25}) == doctest::Approx(0.75));

    sensing::TabulatedProfile bad;
    bad.rows = 2;
    bad.cols = 2;
    bad.values = {1.0, -0.2, 0.3, 0.4};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("boundary zone trace integrals and the point limit") {
    // Uniform trace integral along the bottom edge.
    const SensorSpec seg = sensing::BoundaryZoneSensor{
        {0.2, 0.0}, {0.8, 0.0}, sensing::UniformProfile{}};
    const double expect = oracles::simpson_1d(
        [&](double x) { return spectral::eigenfunction_value(kUnit, {3, 1}, {x, 0.0}); }, 0.2,
        0.8, 400);
    CHECK(sensing::sensor_coefficient(seg, {3, 1}, kUnit) ==
          doctest::Approx(expect).epsilon(1e-10));

    // A mass-one shrinking segment converges to the point evaluation.
    const Point b{0.37, 0.0};
    const double ref = sensing::sensor_coefficient(sensing::BoundaryPointSensor{b}, {2, 1}, kUnit);
    double prev_gap = 1e300;
    for (double len : {0.2, 0.05, 0.0125}) {
        sensing::TabulatedProfile unit_mass;
        unit_mass.rows = 1;
        unit_mass.cols = 2;
        unit_mass.values = {1.0 / len, 1.0 / len};
        const SensorSpec shrink = sensing::BoundaryZoneSensor{
            {b.x - len / 2, 0.0}, {b.x + len / 2, 0.0}, unit_mass};
        const double gap =
            std::abs(sensing::sensor_coefficient(shrink, {2, 1}, kUnit) - ref);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap <= 1e-3);
}

TEST_CASE("filament integrals reduce to segment sums") {
    // An L-shaped polyline equals the sum of its two straight pieces.
    const SensorSpec fil = sensing::FilamentSensor{
        {{0.2, 0.3}, {0.6, 0.3}, {0.6, 0.7}}, sensing::UniformProfile{}};
    const double leg1 = oracles::simpson_1d(
        [&](double x) { return spectral::eigenfunction_value(kUnit, {2, 2}, {x, 0.3}); }, 0.2,
        0.6, 300);
    const double leg2 = oracles::simpson_1d(
        [&](double y) { return spectral::eigenfunction_value(kUnit, {2, 2}, {0.6, y}); }, 0.3,
        0.7, 300);
    CHECK(sensing::sensor_coefficient(fil, {2, 2}, kUnit) ==
          doctest::Approx(leg1 + leg2).epsilon(1e-10));
}

TEST_CASE("output matrix assembly and evaluation") {
    const auto modes = spectral::build_mode_set(kUnit, 1, 0, 0.0); // (0,0) then (1,0)
    std::vector<SensorSpec> sensors{sensing::BoundaryPointSensor{{0.0, 0.0}},
                                    sensing::BoundaryPointSensor{{0.0, 0.0}}};
    const auto op = sensing::build_output_matrix(sensors, modes);
    REQUIRE(op.coefficients.rows() == 2);
    REQUIRE(op.coefficients.cols() == 2);
    CHECK(op.coefficients(0, 0) == doctest::Approx(1.0));
    CHECK(op.coefficients(0, 1) == doctest::Approx(std::sqrt(2.0)));
    CHECK((op.coefficients.row(0) - op.coefficients.row(1)).norm() == 0.0); // identical sensors

    Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
    CHECK(sensing::evaluate_output(op, zero).norm() == 0.0);
    Eigen::VectorXd pure = Eigen::VectorXd::Unit(2, 1);
    CHECK(sensing::evaluate_output(op, pure)(0) == doctest::Approx(op.coefficients(0, 1)));

    Eigen::VectorXd wrong = Eigen::VectorXd::Zero(5);
    CHECK_THROWS_AS((void)sensing::evaluate_output(op, wrong), DimensionMismatch);

    std::vector<SensorSpec> none;
    CHECK_THROWS_AS((void)sensing::build_output_matrix(none, modes), EmptySensorSet);
}

TEST_CASE("zone output matches direct field quadrature") {
    const auto modes = spectral::build_mode_set(kUnit, 2, 2, 0.0);
    const Rectangle support(0.15, 0.45, 0.5, 0.9);
    std::vector<SensorSpec> sensors{
        sensing::InteriorZoneSensor{support, sensing::UniformProfile{}}};
    const auto op = sensing::build_output_matrix(sensors, modes);

    Eigen::VectorXd coeffs(9);
    coeffs << 0.3, -1.2, 0.7, 0.05, 0.9, -0.4, 0.21, -0.11, 0.6;
    const double y = sensing::evaluate_output(op, coeffs)(0);

    const double direct = oracles::simpson_2d(
        [&](double px, double py) {
            double z = 0.0;
            for (std::size_t m = 0; m < modes.size(); ++m)
                z += coeffs(static_cast<Eigen::Index>(m)) *
                     spectral::eigenfunction_value(kUnit, modes.mode(m), {px, py});
            return z;
        },
        support.x_min, support.x_max, support.y_min, support.y_max, 300);
    CHECK(y == doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("output is linear in the state") {
    const auto modes = spectral::build_mode_set(kUnit, 2, 1, 0.0);
    std::vector<SensorSpec> sensors{sensing::InteriorPointSensor{{0.31, 0.77}},
                                    sensing::InteriorZoneSensor{Rectangle(0.5, 0.9, 0.1, 0.4),
                                                                sensing::UniformProfile{}}};
    const auto op = sensing::build_output_matrix(sensors, modes);
    Eigen::VectorXd u(6), v(6);
    u << 1.0, -0.5, 0.25, 0.8, -1.1, 0.33;
    v << -0.2, 0.4, 0.9, -0.6, 0.12, 1.5;
    const Eigen::VectorXd lhs = sensing::evaluate_output(op, Eigen::VectorXd(2.0 * u - 3.0 * v));
    const Eigen::VectorXd rhs =
        2.0 * sensing::evaluate_output(op, u) - 3.0 * sensing::evaluate_output(op, v);
    CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("sensor validation against the scenario domain") {
    CHECK_THROWS_AS(
        sensing::validate_sensor(sensing::InteriorPointSensor{{0.0, 0.5}}, kUnit),
        std::invalid_argument);
    CHECK_NOTHROW(
        sensing::validate_sensor(sensing::BoundaryPointSensor{{0.0, 0.5}}, kUnit));
    CHECK_THROWS_AS(
        sensing::validate_sensor(sensing::BoundaryPointSensor{{0.4, 0.5}}, kUnit),
        std::invalid_argument);
    CHECK_THROWS_AS(
        sensing::validate_sensor(
            sensing::InteriorZoneSensor{Rectangle(0.5, 1.2, 0.1, 0.3), {}}, kUnit),
        std::invalid_argument);
    CHECK_NOTHROW(sensing::validate_sensor(
        sensing::FilamentSensor{{{0.1, 0.1}, {0.9, 0.9}}, {}}, kUnit));
    CHECK_THROWS_AS(sensing::validate_sensor(
                        sensing::FilamentSensor{{{0.1, 0.1}, {1.2, 0.9}}, {}}, kUnit),
                    std::invalid_argument);
}

TEST_CASE("mass-normalized interior zone converges to the interior point value") {
    const Point b{0.43, 0.61};
    const double ref =
        sensing::sensor_coefficient(sensing::InteriorPointSensor{b}, {2, 1}, kUnit);
    double prev_gap = 1e300;
    for (double h : {0.1, 0.025, 0.00625}) {
        sensing::TabulatedProfile unit_mass;
        unit_mass.rows = 2;
        unit_mass.cols = 2;
        unit_mass.values.assign(4, 1.0 / (h * h));
        const SensorSpec small = sensing::InteriorZoneSensor{
            Rectangle(b.x - h / 2, b.x + h / 2, b.y - h / 2, b.y + h / 2), unit_mass};
        const double gap = std::abs(sensing::sensor_coefficient(small, {2, 1}, kUnit) - ref);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}
