#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "regobs/geometry.hpp"
#include "regobs/observer.hpp"
#include "regobs/spectral.hpp"

namespace regobs::regional {

// Sub-rectangle of the active domain on which reconstruction is required.
struct Region {
    Rectangle rect;
};

enum class NormKind { L2, H1 };

// Tensor Gauss-Legendre nodes/weights over a rectangle.
struct QuadratureGrid {
    std::size_t panels_x = 0;
    std::size_t panels_y = 0;
    std::vector<double> nodes_x;
    std::vector<double> nodes_y;
    std::vector<double> weights_x;
    std::vector<double> weights_y;

    double area() const;
};

QuadratureGrid make_grid(const Rectangle& region, std::size_t panels_x, std::size_t panels_y);

// Sqrt of the integral over the region of z^2 (L2) or z^2 + |grad z|^2 (H1),
// with z the modal field sum coeffs[m] * phi_m on the given basis domain.
// Quadrature panels double until convergence as in the sensing module.
double field_norm(std::span<const spectral::Mode> modes, const Rectangle& basis_domain,
                  const Eigen::VectorXd& coeffs, const Rectangle& region, NormKind kind);

double field_norm(const spectral::ModeSet& modes, const Eigen::VectorXd& coeffs,
                  const Rectangle& region, NormKind kind);

// Per-column norms of a whole family of fields on one converged grid (the
// grid is adapted on the largest-coefficient column, then reused).
std::vector<double> norm_series(std::span<const spectral::Mode> modes,
                                const Rectangle& basis_domain, const Eigen::MatrixXd& fields,
                                const Rectangle& region, NormKind kind);

// ||restriction of (state - estimate)|| per recorded sample. The estimate must
// live on the same basis as the state.
std::vector<double> error_norm_series(const observer::TrajectoryRecord& trajectory,
                                      const spectral::ModeSet& modes, const Rectangle& region,
                                      NormKind kind);

// ||state_map z - w|| per sample as a field on the regional basis (the
// estimator error seen through the region's own modes).
std::vector<double> transform_error_series(const observer::TrajectoryRecord& trajectory,
                                           const observer::EstimatorOperators& ops,
                                           std::span<const spectral::Mode> regional_modes,
                                           const Rectangle& regional_domain, NormKind kind);

// Fitted exponential envelope amplitude * exp(-sigma t) over a tail window.
struct DecayFit {
    double sigma = 0.0;
    double amplitude = 0.0;
    double rms_residual = 0.0; // on the log scale
    std::size_t window_begin = 0;
    std::size_t window_size = 0;
};

// Least-squares line on (t, log norm) over the last window_fraction of the
// samples; samples at or below 1e-14 are excluded. Throws NonPositiveSamples
// when nothing in the window is positive, InsufficientSamples below 3 points.
DecayFit fit_decay(std::span<const double> times, std::span<const double> values,
                   double window_fraction = 0.2);

// Maximum norm over the trailing window.
double error_floor(std::span<const double> values, double tail_fraction = 0.2);

// L2(region) projection of global-basis fields onto regional-basis
// coefficients: entry (p, m) = <phi_m, psi_p> over the region, by closed-form
// cosine-product integrals. `region` is the regional basis domain itself.
Eigen::MatrixXd projection_matrix(const spectral::ModeSet& global_modes,
                                  std::span<const spectral::Mode> regional_modes,
                                  const Rectangle& region);

// Concrete stand-in for the regional-observability decision: the fitted decay
// reaches 90% of the reference rate and the tail floor is below 1e-3 of the
// initial error norm.
bool decide_observable(double sigma_fit, double sigma_ref, double floor, double initial_norm);

} // namespace regobs::regional
