#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "regobs/sensing.hpp"
#include "regobs/spectral.hpp"

namespace regobs::strategic {

// Which eigenbasis a test runs against: the full domain's, or the sub-region's
// (with the cosine formula extended to sensor geometry outside the region).
enum class AnalysisBasis { Global, Regional };

std::string basis_name(AnalysisBasis basis);

// How many leading eigenspace groups count as slow: an explicit count, or
// every group with lambda + shift > -sigma_min.
struct SlowSpec {
    enum class Kind { GroupCount, Threshold } kind = Kind::Threshold;
    std::size_t group_count = 0;
    double sigma_min = 0.01;

    static SlowSpec groups(std::size_t j) { return {Kind::GroupCount, j, 0.0}; }
    static SlowSpec threshold(double sigma_min) { return {Kind::Threshold, 0, sigma_min}; }
};

std::size_t resolve_slow_groups(const SlowSpec& spec,
                                const std::vector<spectral::EigenspaceGroup>& groups,
                                double shift);

// Sensor-vs-eigenspace coefficient matrix: entry (i, j) pairs sensor i with
// group member j. Full column rank means the sensors separate the eigenspace.
Eigen::MatrixXd build_group_matrix(const spectral::EigenspaceGroup& group,
                                   std::span<const sensing::SensorSpec> sensors,
                                   const Rectangle& basis_domain);

struct GroupDiagnostics {
    double eigenvalue = 0.0;
    std::size_t multiplicity = 0;
    std::size_t rank = 0;
    double smallest_singular_value = 0.0; // r_n-th singular value; 0 if q < r_n
    std::vector<spectral::Mode> vanishing_members; // members no sensor sees
};

struct StrategicReport {
    std::size_t sensor_count = 0;
    std::size_t slow_group_count = 0;
    std::size_t max_multiplicity = 0;
    std::vector<GroupDiagnostics> groups; // the slow groups, in order
    bool strategic = false;
    double margin = 0.0; // min over slow groups of the r_n-th singular value
};

// Rank test over the slow eigenspaces: strategic iff the sensor count reaches
// the largest slow multiplicity and every slow group matrix has full column
// rank (singular values above rank_tol * largest).
StrategicReport check_strategic(std::span<const sensing::SensorSpec> sensors,
                                const spectral::ModeSet& modes, const SlowSpec& slow,
                                double rank_tol = 1e-10);

// Smallest eigenvalue of the finite-horizon observability Gramian restricted
// to the first slow_mode_count modes; +infinity when that count is zero.
// Entries are integrated in closed form from the modal growth rates.
double observability_margin(std::span<const sensing::SensorSpec> sensors,
                            const spectral::ModeSet& modes, std::size_t slow_mode_count,
                            double horizon);
double observability_margin(const Eigen::MatrixXd& output_matrix,
                            const Eigen::VectorXd& growth_rates, std::size_t slow_mode_count,
                            double horizon);

// --- closed-form placement predicates ---------------------------------------

struct FlaggedMode {
    spectral::Mode mode;
    int axis = 0; // 0: x cosine factor vanishes, 1: y factor
};

struct PlacementVerdict {
    std::vector<FlaggedMode> vanishing_modes;
    bool is_bad() const { return !vanishing_modes.empty(); }
};

// Exact cosine zeros of a point sensor: mode (i, j) is flagged when
// i*(bx-x_min)/Lx or j*(by-y_min)/Ly sits on the half-odd-integer lattice
// (fractional-part tolerance 1e-12).
PlacementVerdict placement_predicate_point(const Rectangle& basis_domain, Point location,
                                           int max_x_order, int max_y_order);

// Same lattice test applied to the center of a symmetric zone profile: the
// coefficient factorizes through the center cosine, so it vanishes with it.
// The profile must be symmetric about `center` (uniform, tent at the center,
// or a palindromic table).
PlacementVerdict placement_predicate_zone(const Rectangle& basis_domain, Point center,
                                          const sensing::Profile& profile, int max_x_order,
                                          int max_y_order);

// --- placement scans ---------------------------------------------------------

struct ScanCell {
    double x = 0.0;
    double y = 0.0;
    double margin_global = 0.0;
    double margin_regional = 0.0;
    bool predicate_flag = false;
};

struct ScanResult {
    int resolution = 0;
    std::vector<ScanCell> cells; // row-major over the grid, y outer, x inner
};

// Sweeps a sensor template over a resolution x resolution grid of cell
// centers of the domain, reporting Gramian margins under both bases and the
// point-predicate flag against the global basis. Cells are independent and
// evaluated by `workers` threads.
ScanResult placement_scan(const spectral::ModeSet& global_modes,
                          const spectral::ModeSet& regional_modes,
                          const sensing::SensorSpec& sensor_template, int resolution,
                          const SlowSpec& slow, double horizon, unsigned workers = 0);

inline constexpr double kInfiniteMargin = std::numeric_limits<double>::infinity();

} // namespace regobs::strategic
