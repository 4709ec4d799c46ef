#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "regobs/errors.hpp"
#include "regobs/strategic.hpp"
#include "oracles.hpp"

using namespace regobs;
using sensing::SensorSpec;
using spectral::Mode;
constexpr double kPi = std::numbers::pi;

namespace {
const Rectangle kUnit(0.0, 1.0, 0.0, 1.0);

std::vector<SensorSpec> points(std::initializer_list<Point> locations) {
    std::vector<SensorSpec> out;
    for (const Point& p : locations) out.push_back(sensing::InteriorPointSensor{p});
    return out;
}
} // namespace

TEST_CASE("group matrix entries are sensor coefficients") {
    const auto modes = spectral::build_mode_set(kUnit, 1, 1, 0.0);
    const auto groups = spectral::group_by_eigenvalue(modes);
    REQUIRE(groups[1].multiplicity() == 2); // {(0,1), (1,0)}

    const auto at_center = points({{0.5, 0.5}});
    const auto g_center = strategic::build_group_matrix(groups[1], at_center, kUnit);
    REQUIRE(g_center.rows() == 1);
    REQUIRE(g_center.cols() == 2);
    CHECK(std::abs(g_center(0, 0)) <= 1e-12);
    CHECK(std::abs(g_center(0, 1)) <= 1e-12);

    const auto generic = points({{0.2, 0.3}});
    const auto g = strategic::build_group_matrix(groups[1], generic, kUnit);
    CHECK(g(0, 0) == doctest::Approx(std::sqrt(2.0) * std::cos(0.3 * kPi)).epsilon(1e-12));
    CHECK(g(0, 1) == doctest::Approx(std::sqrt(2.0) * std::cos(0.2 * kPi)).epsilon(1e-12));
    CHECK(g(0, 0) == doctest::Approx(0.83125).epsilon(1e-4));
    CHECK(g(0, 1) == doctest::Approx(1.14412).epsilon(1e-4));
}

TEST_CASE("rank verdicts on the degenerate pair") {
    const auto modes = spectral::build_mode_set(kUnit, 1, 1, 0.0);
    const auto slow = strategic::SlowSpec::groups(2);

    // One sensor can never separate a multiplicity-2 eigenspace.
    const auto single = points({{0.33, 0.41}});
    const auto r1 = strategic::check_strategic(single, modes, slow);
    CHECK_FALSE(r1.strategic);
    CHECK(r1.max_multiplicity == 2);
    CHECK(r1.sensor_count == 1);

    const auto two = points({{0.2, 0.3}, {0.7, 0.6}});
    const auto r2 = strategic::check_strategic(two, modes, slow);
    CHECK(r2.strategic);
    CHECK(r2.margin > 1e-3);

    // Brute-force smallest singular value of the 2x2 group block.
    Eigen::MatrixXd g(2, 2);
    g << std::sqrt(2.0) * std::cos(0.3 * kPi), std::sqrt(2.0) * std::cos(0.2 * kPi),
        std::sqrt(2.0) * std::cos(0.6 * kPi), std::sqrt(2.0) * std::cos(0.7 * kPi);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
    CHECK(r2.groups[1].smallest_singular_value ==
          doctest::Approx(svd.singularValues()(1)).epsilon(1e-12));
}

TEST_CASE("vanishing members are reported") {
    const Rectangle irr(0.0, 1.0, 0.0, std::sqrt(2.0));
    const auto modes = spectral::build_mode_set(irr, 2, 2, 0.0);
    const auto report = strategic::check_strategic(points({{0.5, 0.5}}), modes,
                                                   strategic::SlowSpec::groups(3));
    CHECK_FALSE(report.strategic);
    REQUIRE(report.groups.size() == 3);
    // Third slow group on this domain is {(1,0)}, dead at x = 0.5.
    CHECK(report.groups[2].rank == 0);
    REQUIRE(report.groups[2].vanishing_members.size() == 1);
    CHECK(report.groups[2].vanishing_members[0] == Mode{1, 0});
}

TEST_CASE("verdict and rank are invariant under sensor permutation") {
    const auto modes = spectral::build_mode_set(kUnit, 2, 2, 0.0);
    const auto slow = strategic::SlowSpec::groups(3);
    const auto fwd = points({{0.2, 0.3}, {0.7, 0.6}, {0.41, 0.87}});
    auto rev = fwd;
    std::reverse(rev.begin(), rev.end());
    const auto a = strategic::check_strategic(fwd, modes, slow);
    const auto b = strategic::check_strategic(rev, modes, slow);
    CHECK(a.strategic == b.strategic);
    REQUIRE(a.groups.size() == b.groups.size());
    for (std::size_t k = 0; k < a.groups.size(); ++k) {
        CHECK(a.groups[k].rank == b.groups[k].rank);
        CHECK(a.groups[k].smallest_singular_value ==
              doctest::Approx(b.groups[k].smallest_singular_value).epsilon(1e-10));
    }
}

TEST_CASE("observability margin closed forms") {
    Eigen::MatrixXd c(1, 1);
    c << 1.0;
    Eigen::VectorXd rates(1);
    rates << 0.0;
    CHECK(strategic::observability_margin(c, rates, 1, 2.0) ==
          doctest::Approx(2.0).epsilon(1e-14));

    rates << -1.0;
    CHECK(strategic::observability_margin(c, rates, 1, 30.0) ==
          doctest::Approx(0.5).epsilon(1e-12));

    Eigen::MatrixXd c2(1, 2);
    c2 << 1.0, 0.0; // second slow mode invisible
    Eigen::VectorXd rates2(2);
    rates2 << 0.0, -1.0;
    CHECK(strategic::observability_margin(c2, rates2, 2, 3.0) ==
          doctest::Approx(0.0).epsilon(1e-14));

    CHECK(strategic::observability_margin(c, rates, 0, 1.0) ==
          strategic::kInfiniteMargin);
    CHECK_THROWS_AS((void)strategic::observability_margin(c, rates, 1, 0.0),
                    NonPositiveHorizon);
}

TEST_CASE("adding a sensor never lowers the margin") {
    const Rectangle irr(0.0, 1.0, 0.0, std::sqrt(2.0));
    const auto modes = spectral::build_mode_set(irr, 2, 2, 0.0);
    std::mt19937_64 rng(7);
    auto draw = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(rng() >> 11) / 9007199254740992.0;
    };
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<SensorSpec> sensors;
        sensors.push_back(sensing::InteriorPointSensor{{draw(0.05, 0.95), draw(0.05, 1.35)}});
        const double before = strategic::observability_margin(sensors, modes, 4, 1.0);
        sensors.push_back(sensing::InteriorPointSensor{{draw(0.05, 0.95), draw(0.05, 1.35)}});
        const double after = strategic::observability_margin(sensors, modes, 4, 1.0);
        CHECK(after >= before - 1e-13);
    }
}

TEST_CASE("point placement predicate flags half-lattice hits") {
    const auto flagged_xi = [](const strategic::PlacementVerdict& v, int i, int j) {
        for (const auto& f : v.vanishing_modes)
            if (f.mode == Mode{i, j}) return true;
        return false;
    };

    const auto mid = strategic::placement_predicate_point(kUnit, {0.5, 0.9}, 2, 2);
    CHECK(mid.is_bad());
    CHECK(flagged_xi(mid, 1, 0));
    CHECK_FALSE(flagged_xi(mid, 2, 0));

    const auto quarter = strategic::placement_predicate_point(kUnit, {0.25, 0.9}, 2, 2);
    CHECK(flagged_xi(quarter, 2, 0));
    CHECK_FALSE(flagged_xi(quarter, 1, 0));

    // Agreement with the coefficient itself at a non-flagged position.
    const SensorSpec probe = sensing::InteriorPointSensor{{0.25, 0.9}};
    CHECK(std::abs(sensing::sensor_coefficient(probe, {1, 0}, kUnit)) > 1e-10);
}

TEST_CASE("zone predicate mirrors the point predicate at the center") {
    const auto v = strategic::placement_predicate_zone(kUnit, {0.5, 0.31},
                                                       sensing::UniformProfile{}, 3, 3);
    bool flagged10 = false;
    for (const auto& f : v.vanishing_modes) flagged10 |= (f.mode == Mode{1, 0});
    CHECK(flagged10);

    const auto edge = strategic::placement_predicate_zone(kUnit, {0.0, 0.31},
                                                          sensing::UniformProfile{}, 3, 3);
    for (const auto& f : edge.vanishing_modes) CHECK(f.axis == 1); // x factor never dies at 0

    sensing::TabulatedProfile asym;
    asym.rows = 1;
    asym.cols = 3;
    asym.values = {0.0, 0.5, 1.0};
    CHECK_THROWS_AS((void)strategic::placement_predicate_zone(kUnit, {0.5, 0.5}, asym, 2, 2),
                    std::invalid_argument);
}

TEST_CASE("zone predicate agrees with computed coefficients for symmetric profiles") {
    const Rectangle dom(0.0, 1.0, 0.0, 1.0);
    std::mt19937_64 rng(11);
    auto draw = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(rng() >> 11) / 9007199254740992.0;
    };
    for (int rep = 0; rep < 5; ++rep) {
        const double cx = draw(0.2, 0.8);
        const double cy = draw(0.2, 0.8);
        const double hx = draw(0.05, std::min(cx, 1.0 - cx));
        const double hy = draw(0.05, std::min(cy, 1.0 - cy));
        const Rectangle support(cx - hx, cx + hx, cy - hy, cy + hy);
        const sensing::TriangleProfile tri{{cx, cy}};
        const auto verdict =
            strategic::placement_predicate_zone(dom, {cx, cy}, tri, 4, 4);
        const SensorSpec zone = sensing::InteriorZoneSensor{support, tri};
        for (int i = 0; i <= 4; ++i) {
            for (int j = 0; j <= 4; ++j) {
                bool flagged = false;
                for (const auto& f : verdict.vanishing_modes)
                    flagged |= (f.mode == Mode{i, j});
                const double coeff = sensing::sensor_coefficient(zone, {i, j}, dom);
                if (flagged) CHECK(std::abs(coeff) <= 1e-10);
            }
        }
    }
}

TEST_CASE("regional test with region equal to the domain matches the global one") {
    const auto global = spectral::build_mode_set(kUnit, 2, 2, 0.0);
    const auto regional = spectral::build_mode_set(kUnit, 2, 2, 0.0);
    const auto sensors = points({{0.2, 0.3}, {0.7, 0.6}});
    const auto slow = strategic::SlowSpec::threshold(25.0);
    const auto a = strategic::check_strategic(sensors, global, slow);
    const auto b = strategic::check_strategic(sensors, regional, slow);
    CHECK(a.strategic == b.strategic);
    CHECK(a.margin == doctest::Approx(b.margin).epsilon(1e-14));
    CHECK(a.slow_group_count == b.slow_group_count);
}

TEST_CASE("placement scan marks predicate cells with zero margin") {
    const Rectangle irr(0.0, 1.0, 0.0, std::sqrt(2.0));
    const auto global = spectral::build_mode_set(irr, 2, 2, 0.0);
    const Rectangle region(0.2, 0.9, 0.15, 1.25);
    const auto regional = spectral::build_mode_set(region, 2, 2, 0.0);
    const auto scan = strategic::placement_scan(
        global, regional, sensing::InteriorPointSensor{{0.5, 0.5}}, 11,
        strategic::SlowSpec::groups(3), 1.0, 2);
    REQUIRE(scan.cells.size() == 121);
    std::size_t flagged = 0;
    for (const auto& cell : scan.cells) {
        if (cell.predicate_flag) {
            ++flagged;
            CHECK(cell.margin_global <= 1e-8);
        }
        CHECK(cell.margin_regional >= 0.0);
    }
    CHECK(flagged > 0); // resolution 11 hits x = 0.5 exactly

    // Determinism across worker counts.
    const auto serial = strategic::placement_scan(
        global, regional, sensing::InteriorPointSensor{{0.5, 0.5}}, 11,
        strategic::SlowSpec::groups(3), 1.0, 1);
    for (std::size_t k = 0; k < scan.cells.size(); ++k) {
        CHECK(scan.cells[k].margin_global == serial.cells[k].margin_global);
        CHECK(scan.cells[k].margin_regional == serial.cells[k].margin_regional);
    }
}

TEST_CASE("scan with an empty slow set reports infinite margins") {
    const auto global = spectral::build_mode_set(kUnit, 1, 1, 0.0);
    const auto regional = spectral::build_mode_set(Rectangle(0.2, 0.8, 0.2, 0.8), 1, 1, 0.0);
    const auto scan = strategic::placement_scan(
        global, regional, sensing::InteriorPointSensor{{0.5, 0.5}}, 3,
        strategic::SlowSpec::groups(0), 1.0, 1);
    for (const auto& cell : scan.cells) {
        CHECK(cell.margin_global == strategic::kInfiniteMargin);
        CHECK_FALSE(cell.predicate_flag);
    }
}

TEST_CASE("empty sensor sets are rejected") {
    const auto modes = spectral::build_mode_set(kUnit, 1, 1, 0.0);
    std::vector<SensorSpec> none;
    CHECK_THROWS_AS(
        (void)strategic::check_strategic(none, modes, strategic::SlowSpec::groups(1)),
        EmptySensorSet);
}
