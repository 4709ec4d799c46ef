#include "regobs/regional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "regobs/errors.hpp"
#include "regobs/quadrature.hpp"

namespace regobs::regional {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using spectral::Mode;

double QuadratureGrid::area() const {
    double wx = 0.0, wy = 0.0;
    for (double w : weights_x) wx += w;
    for (double w : weights_y) wy += w;
    return wx * wy;
}

QuadratureGrid make_grid(const Rectangle& region, std::size_t panels_x, std::size_t panels_y) {
    QuadratureGrid grid;
    grid.panels_x = panels_x;
    grid.panels_y = panels_y;
    auto rx = quad::line_rule(region.x_min, region.x_max, panels_x);
    auto ry = quad::line_rule(region.y_min, region.y_max, panels_y);
    grid.nodes_x = std::move(rx.nodes);
    grid.weights_x = std::move(rx.weights);
    grid.nodes_y = std::move(ry.nodes);
    grid.weights_y = std::move(ry.weights);
    return grid;
}

namespace {

// Per-axis cosine factor tables on a grid; the product basis makes every
// field evaluation a pair of small matrix products.
struct AxisTables {
    int order_x = 0;
    int order_y = 0;
    MatrixXd val_x, der_x; // (nodes_x, order_x + 1)
    MatrixXd val_y, der_y;
    Eigen::VectorXd wx, wy;
};

AxisTables build_tables(std::span<const Mode> modes, const Rectangle& basis_domain,
                        const QuadratureGrid& grid) {
    AxisTables t;
    for (const Mode& m : modes) {
        t.order_x = std::max(t.order_x, m.x_order);
        t.order_y = std::max(t.order_y, m.y_order);
    }
    constexpr double pi = std::numbers::pi;
    const auto nx = static_cast<Index>(grid.nodes_x.size());
    const auto ny = static_cast<Index>(grid.nodes_y.size());
    t.val_x.resize(nx, t.order_x + 1);
    t.der_x.resize(nx, t.order_x + 1);
    t.val_y.resize(ny, t.order_y + 1);
    t.der_y.resize(ny, t.order_y + 1);
    for (Index k = 0; k < nx; ++k) {
        for (int i = 0; i <= t.order_x; ++i) {
            const double scale = spectral::axis_normalization(i, basis_domain.width());
            const double freq = i * pi / basis_domain.width();
            const double arg = freq * (grid.nodes_x[static_cast<std::size_t>(k)] -
                                       basis_domain.x_min);
            t.val_x(k, i) = scale * std::cos(arg);
            t.der_x(k, i) = -scale * freq * std::sin(arg);
        }
    }
    for (Index k = 0; k < ny; ++k) {
        for (int j = 0; j <= t.order_y; ++j) {
            const double scale = spectral::axis_normalization(j, basis_domain.height());
            const double freq = j * pi / basis_domain.height();
            const double arg = freq * (grid.nodes_y[static_cast<std::size_t>(k)] -
                                       basis_domain.y_min);
            t.val_y(k, j) = scale * std::cos(arg);
            t.der_y(k, j) = -scale * freq * std::sin(arg);
        }
    }
    t.wx = Eigen::Map<const VectorXd>(grid.weights_x.data(),
                                      static_cast<Index>(grid.weights_x.size()));
    t.wy = Eigen::Map<const VectorXd>(grid.weights_y.data(),
                                      static_cast<Index>(grid.weights_y.size()));
    return t;
}

double squared_integral_tabulated(std::span<const Mode> modes, const VectorXd& coeffs,
                                  const AxisTables& t, NormKind kind) {
    MatrixXd cgrid = MatrixXd::Zero(t.order_x + 1, t.order_y + 1);
    for (std::size_t m = 0; m < modes.size(); ++m)
        cgrid(modes[m].x_order, modes[m].y_order) += coeffs(static_cast<Index>(m));

    const MatrixXd field = t.val_x * cgrid * t.val_y.transpose();
    double total = t.wx.dot(field.cwiseProduct(field) * t.wy);
    if (kind == NormKind::H1) {
        const MatrixXd dx = t.der_x * cgrid * t.val_y.transpose();
        const MatrixXd dy = t.val_x * cgrid * t.der_y.transpose();
        total += t.wx.dot(dx.cwiseProduct(dx) * t.wy);
        total += t.wx.dot(dy.cwiseProduct(dy) * t.wy);
    }
    return total;
}

// Squared L2/H1 integral of one coefficient field on a fixed grid.
double squared_integral(std::span<const Mode> modes, const Rectangle& basis_domain,
                        const VectorXd& coeffs, const QuadratureGrid& grid, NormKind kind) {
    return squared_integral_tabulated(modes, coeffs, build_tables(modes, basis_domain, grid),
                                      kind);
}

// Panel-doubling loop shared by field_norm and norm_series.
QuadratureGrid converge_grid(std::span<const Mode> modes, const Rectangle& basis_domain,
                             const VectorXd& probe, const Rectangle& region, NormKind kind,
                             double* converged_value) {
    std::size_t panels = 1;
    QuadratureGrid grid = make_grid(region, panels, panels);
    double prev = squared_integral(modes, basis_domain, probe, grid, kind);
    while (panels < quad::kMaxPanels) {
        panels *= 2;
        grid = make_grid(region, panels, panels);
        const double cur = squared_integral(modes, basis_domain, probe, grid, kind);
        if (std::abs(cur - prev) <= quad::kPanelTol * std::max(1.0, std::abs(cur))) {
            if (converged_value) *converged_value = cur;
            return grid;
        }
        prev = cur;
    }
    throw QuadratureNonConvergence("field norm: no convergence at " +
                                   std::to_string(quad::kMaxPanels) + " panels per axis");
}

} // namespace

double field_norm(std::span<const Mode> modes, const Rectangle& basis_domain,
                  const VectorXd& coeffs, const Rectangle& region, NormKind kind) {
    if (coeffs.size() != static_cast<Index>(modes.size()))
        throw DimensionMismatch("field_norm: coefficient count differs from mode count");
    if (coeffs.size() == 0) return 0.0;
    double value = 0.0;
    converge_grid(modes, basis_domain, coeffs, region, kind, &value);
    return std::sqrt(std::max(0.0, value));
}

double field_norm(const spectral::ModeSet& modes, const VectorXd& coeffs,
                  const Rectangle& region, NormKind kind) {
    return field_norm(std::span<const Mode>(modes.modes()), modes.domain(), coeffs, region,
                      kind);
}

std::vector<double> norm_series(std::span<const Mode> modes, const Rectangle& basis_domain,
                                const MatrixXd& fields, const Rectangle& region,
                                NormKind kind) {
    if (fields.rows() != static_cast<Index>(modes.size()))
        throw DimensionMismatch("norm_series: row count differs from mode count");
    std::vector<double> out(static_cast<std::size_t>(fields.cols()), 0.0);
    if (fields.size() == 0 || fields.cols() == 0) return out;

    // Adapt once on the largest column, reuse the converged grid everywhere.
    Index probe = 0;
    double best = -1.0;
    for (Index c = 0; c < fields.cols(); ++c) {
        const double n = fields.col(c).norm();
        if (n > best) {
            best = n;
            probe = c;
        }
    }
    if (best == 0.0) return out;
    const QuadratureGrid grid =
        converge_grid(modes, basis_domain, fields.col(probe), region, kind, nullptr);
    const AxisTables tables = build_tables(modes, basis_domain, grid);
    for (Index c = 0; c < fields.cols(); ++c) {
        if (fields.col(c).norm() == 0.0) continue;
        out[static_cast<std::size_t>(c)] = std::sqrt(
            std::max(0.0, squared_integral_tabulated(modes, fields.col(c), tables, kind)));
    }
    return out;
}

std::vector<double> error_norm_series(const observer::TrajectoryRecord& trajectory,
                                      const spectral::ModeSet& modes, const Rectangle& region,
                                      NormKind kind) {
    if (trajectory.estimates.rows() != trajectory.states.rows())
        throw DimensionMismatch("error_norm_series: estimate dimension differs from state");
    const MatrixXd diff = trajectory.states - trajectory.estimates;
    return norm_series(std::span<const Mode>(modes.modes()), modes.domain(), diff, region,
                       kind);
}

std::vector<double> transform_error_series(const observer::TrajectoryRecord& trajectory,
                                           const observer::EstimatorOperators& ops,
                                           std::span<const Mode> regional_modes,
                                           const Rectangle& regional_domain, NormKind kind) {
    const MatrixXd diff = ops.state_map * trajectory.states - trajectory.observers;
    if (diff.rows() != static_cast<Index>(regional_modes.size()))
        throw DimensionMismatch("transform_error_series: observer dimension differs from basis");
    return norm_series(regional_modes, regional_domain, diff, regional_domain, kind);
}

DecayFit fit_decay(std::span<const double> times, std::span<const double> values,
                   double window_fraction) {
    if (times.size() != values.size())
        throw DimensionMismatch("fit_decay: time/value size mismatch");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw std::invalid_argument("fit_decay: window fraction must lie in (0, 1]");
    const std::size_t n = values.size();
    const std::size_t window =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(window_fraction *
                                                                    static_cast<double>(n))));
    const std::size_t begin = n - window;

    std::vector<double> ts, logs;
    std::size_t positive = 0;
    for (std::size_t k = begin; k < n; ++k) {
        if (values[k] > 0.0) ++positive;
        if (values[k] > 1e-14) {
            ts.push_back(times[k]);
            logs.push_back(std::log(values[k]));
        }
    }
    if (positive == 0)
        throw NonPositiveSamples("fit_decay: no positive samples in the window");
    if (ts.size() < 3)
        throw InsufficientSamples("fit_decay: fewer than 3 usable samples in the window");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto count = static_cast<double>(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
        sx += ts[k];
        sy += logs[k];
        sxx += ts[k] * ts[k];
        sxy += ts[k] * logs[k];
    }
    const double denom = count * sxx - sx * sx;
    if (denom <= 0.0)
        throw InsufficientSamples("fit_decay: degenerate time window");
    const double slope = (count * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / count;

    DecayFit fit;
    fit.sigma = -slope;
    fit.amplitude = std::exp(intercept);
    fit.window_begin = begin;
    fit.window_size = window;
    double ss = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double r = logs[k] - (slope * ts[k] + intercept);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / count);
    return fit;
}

double error_floor(std::span<const double> values, double tail_fraction) {
    if (values.empty())
        throw std::invalid_argument("error_floor: empty series");
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw std::invalid_argument("error_floor: tail fraction must lie in (0, 1]");
    const std::size_t n = values.size();
    const std::size_t window =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_fraction *
                                                                    static_cast<double>(n))));
    double floor = 0.0;
    for (std::size_t k = n - window; k < n; ++k) floor = std::max(floor, values[k]);
    return floor;
}

namespace {

// int_{lo}^{hi} cos(u x + v) dx, stable for every u including 0.
double integral_cos(double u, double v, double lo, double hi) {
    const double half = 0.5 * u * (hi - lo);
    const double mid = 0.5 * u * (hi + lo) + v;
    const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
    return (hi - lo) * std::cos(mid) * sinc;
}

// int cos(alpha (x - a0)) cos(beta (x - b0)) over [lo, hi], by product-to-sum.
double cos_product_integral(double alpha, double a0, double beta, double b0, double lo,
                            double hi) {
    const double va = -alpha * a0;
    const double vb = -beta * b0;
    return 0.5 * (integral_cos(alpha - beta, va - vb, lo, hi) +
                  integral_cos(alpha + beta, va + vb, lo, hi));
}

} // namespace

MatrixXd projection_matrix(const spectral::ModeSet& global_modes,
                           std::span<const Mode> regional_modes, const Rectangle& region) {
    constexpr double pi = std::numbers::pi;
    const Rectangle& domain = global_modes.domain();
    MatrixXd proj(static_cast<Index>(regional_modes.size()),
                  static_cast<Index>(global_modes.size()));
    for (std::size_t p = 0; p < regional_modes.size(); ++p) {
        const Mode rp = regional_modes[p];
        const double beta_x = static_cast<double>(rp.x_order) * pi / region.width();
        const double beta_y = static_cast<double>(rp.y_order) * pi / region.height();
        const double sx2 = spectral::axis_normalization(rp.x_order, region.width());
        const double sy2 = spectral::axis_normalization(rp.y_order, region.height());
        for (std::size_t m = 0; m < global_modes.size(); ++m) {
            const Mode gm = global_modes.mode(m);
            const double alpha_x = static_cast<double>(gm.x_order) * pi / domain.width();
            const double alpha_y = static_cast<double>(gm.y_order) * pi / domain.height();
            const double sx1 = spectral::axis_normalization(gm.x_order, domain.width());
            const double sy1 = spectral::axis_normalization(gm.y_order, domain.height());
            const double ix = cos_product_integral(alpha_x, domain.x_min, beta_x, region.x_min,
                                                   region.x_min, region.x_max);
            const double iy = cos_product_integral(alpha_y, domain.y_min, beta_y, region.y_min,
                                                   region.y_min, region.y_max);
            proj(static_cast<Index>(p), static_cast<Index>(m)) =
                sx1 * sx2 * ix * sy1 * sy2 * iy;
        }
    }
    return proj;
}

bool decide_observable(double sigma_fit, double sigma_ref, double floor, double initial_norm) {
    return sigma_fit >= 0.9 * sigma_ref && floor <= 1e-3 * initial_norm;
}

} // namespace regobs::regional
