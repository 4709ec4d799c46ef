#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "regobs/geometry.hpp"
#include "regobs/spectral.hpp"

namespace regobs::sensing {

// --- spatial measurement profiles -------------------------------------------

struct UniformProfile {}; // f == 1 on the support

// Tent profile: 1 at the peak, 0 at the support boundary, symmetric about the
// peak along each axis. For 1D supports (boundary segments, filaments) only
// the arclength fraction `peak.x` in [0,1] is used.
struct TriangleProfile {
    Point peak;
};

// Samples on a regular grid spanning the support, bilinear interpolation.
// rows = 1 gives a 1D profile in the support's arclength coordinate.
struct TabulatedProfile {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values; // row-major, rows*cols entries

    void validate() const;
};

using Profile = std::variant<UniformProfile, TriangleProfile, TabulatedProfile>;

// f at a point of a rectangular support.
double profile_value(const Profile& profile, const Rectangle& support, Point p);
// f at normalized arclength u in [0,1] of a 1D support.
double profile_value_1d(const Profile& profile, double u);

// --- sensors -----------------------------------------------------------------

struct InteriorPointSensor {
    Point location;
};

struct InteriorZoneSensor {
    Rectangle support;
    Profile profile = UniformProfile{};
};

// Axis-aligned segment on the boundary of the scenario domain.
struct BoundaryZoneSensor {
    Point start;
    Point end;
    Profile profile = UniformProfile{};
};

struct BoundaryPointSensor {
    Point location;
};

struct FilamentSensor {
    std::vector<Point> polyline; // >= 2 vertices
    Profile weight = UniformProfile{};
};

using SensorSpec = std::variant<InteriorPointSensor, InteriorZoneSensor, BoundaryZoneSensor,
                                BoundaryPointSensor, FilamentSensor>;

std::string sensor_kind_name(const SensorSpec& sensor);

// Geometry checks against the scenario domain (interior supports strictly
// inside, boundary sensors on the boundary, filaments in the closure).
void validate_sensor(const SensorSpec& sensor, const Rectangle& domain);

// Modal coefficient of one sensor against one basis mode: point sensors
// evaluate the eigenfunction, zone/boundary/filament sensors integrate it
// against the profile. The basis domain need not contain the sensor.
double sensor_coefficient(const SensorSpec& sensor, spectral::Mode mode,
                          const Rectangle& basis_domain);

// The output map y = C a on modal coordinates: row per sensor, column per mode.
struct OutputOperator {
    Eigen::MatrixXd coefficients;
    std::vector<SensorSpec> sensors;
    Rectangle basis_domain;

    std::size_t sensor_count() const { return static_cast<std::size_t>(coefficients.rows()); }
    std::size_t mode_count() const { return static_cast<std::size_t>(coefficients.cols()); }
};

OutputOperator build_output_matrix(std::span<const SensorSpec> sensors,
                                   const spectral::ModeSet& modes);

Eigen::VectorXd evaluate_output(const OutputOperator& op, const Eigen::VectorXd& modal_coeffs);

} // namespace regobs::sensing
