#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regobs/geometry.hpp"
#include "regobs/observer.hpp"
#include "regobs/sensing.hpp"
#include "regobs/strategic.hpp"

namespace regobs::cli {

// A full run description, parsed from the flat dotted-key text format
// (one `key = value` per line, `#` comments).
struct Scenario {
    Rectangle domain{0.0, 1.0, 0.0, 1.0};
    Rectangle region{0.25, 0.75, 0.25, 0.75};
    double shift = 0.0;
    int order_x = 4;
    int order_y = 4;
    strategic::SlowSpec slow = strategic::SlowSpec::threshold(0.01);
    double rank_tol = 1e-10;

    std::vector<sensing::SensorSpec> sensors;

    struct Gain {
        enum class Kind { Riccati, RateShift, Explicit } kind = Kind::Riccati;
        double rho = 1.0;
        double sigma_star = 1.0;
        std::vector<double> values; // explicit, row-major n x q
        bool observable_only = false;
    } gain;

    struct Estimator {
        enum class Kind { Identity, General, Regional } kind = Kind::Identity;
        std::vector<double> rates;     // general: diagonal dynamics
        std::vector<double> injection; // general: row-major k x q, default all ones
    } estimator;

    struct Initial {
        enum class Kind { Random, Explicit, SingleMode } kind = Kind::Random;
        double amplitude = 1.0;
        std::vector<double> values; // explicit, mode-set order, zero-padded
        int mode_x = 0;
        int mode_y = 0;
        double mode_value = 1.0;
    } initial;

    struct ObserverInit {
        enum class Kind { Zero, Match, Explicit } kind = Kind::Zero; // Match: w0 = T z0
        std::vector<double> values;
    } observer_init;

    struct Input {
        std::vector<double> times;  // empty = autonomous
        std::vector<double> values; // row-major, one p-row per breakpoint
        std::vector<double> actuator; // row-major n x p
        std::size_t channels = 0;
    } input;

    struct Time {
        double t_final = 8.0;
        double dt = 1e-3;
    } time;

    std::uint64_t seed = 42;
    int scan_resolution = 41;
    double scan_horizon = 1.0;
    std::size_t norm_stride = 0; // 0: choose so ~400 samples get norms
    double tail_fraction = 0.2;
    double sigma_ref = 0.0; // 0: derive from the gain design
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

// Normalized flat-text form; parse_scenario(serialize_scenario(s)) reproduces s.
std::string serialize_scenario(const Scenario& scenario);

// Cross-field checks (region inside domain, sensor geometry, step sizes...).
void validate_scenario(const Scenario& scenario);

// Initial modal coefficients per the scenario's initial spec and seed.
Eigen::VectorXd initial_coefficients(const Scenario& scenario,
                                     const spectral::ModeSet& modes);

std::string format_double(double value); // shortest round-trip decimal

} // namespace regobs::cli
