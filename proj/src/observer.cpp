#include "regobs/observer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "regobs/errors.hpp"

namespace regobs::observer {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}
} // namespace

ModalSystem make_modal_system(const spectral::ModeSet& modes,
                              std::span<const sensing::SensorSpec> sensors,
                              const strategic::SlowSpec& slow,
                              const MatrixXd& input_matrix) {
    ModalSystem sys;
    const auto n = static_cast<Index>(modes.size());
    sys.growth_rates.resize(n);
    for (Index m = 0; m < n; ++m)
        sys.growth_rates(m) = modes.growth_rate(static_cast<std::size_t>(m));
    sys.output_matrix = sensing::build_output_matrix(sensors, modes).coefficients;
    if (input_matrix.size() == 0) {
        sys.input_matrix = MatrixXd::Zero(n, 0);
    } else {
        if (input_matrix.rows() != n)
            throw DimensionMismatch("make_modal_system: input matrix must have one row per mode");
        sys.input_matrix = input_matrix;
    }
    const auto groups = spectral::group_by_eigenvalue(modes);
    const std::size_t j = strategic::resolve_slow_groups(slow, groups, modes.shift());
    sys.slow_count = 0;
    for (std::size_t g = 0; g < j; ++g) sys.slow_count += groups[g].multiplicity();
    return sys;
}

namespace {

constexpr double kRiccatiTol = 1e-10;
constexpr std::size_t kRiccatiMaxSteps = 1000000;
constexpr double kDetectabilityHorizon = 1.0;
constexpr double kDetectabilityTol = 1e-10;

MatrixXd riccati_rhs(const VectorXd& rates, const MatrixXd& ctc, double rho,
                     const MatrixXd& p) {
    MatrixXd ap = rates.asDiagonal() * p;
    return ap + ap.transpose() - p * ctc * p +
           rho * MatrixXd::Identity(p.rows(), p.cols());
}

// Steady state of the gain Riccati flow from P(0) = I, classical 4-stage steps.
MatrixXd riccati_steady_state(const VectorXd& rates, const MatrixXd& c, double rho) {
    const Index n = rates.size();
    const MatrixXd ctc = c.transpose() * c;
    MatrixXd p = MatrixXd::Identity(n, n);
    const double scale = std::max({1.0, rates.cwiseAbs().maxCoeff(), rho, ctc.norm()});
    const double dt = 0.02 / scale;
    for (std::size_t step = 0; step < kRiccatiMaxSteps; ++step) {
        const MatrixXd k1 = riccati_rhs(rates, ctc, rho, p);
        if (k1.norm() <= kRiccatiTol) return p;
        const MatrixXd k2 = riccati_rhs(rates, ctc, rho, p + 0.5 * dt * k1);
        const MatrixXd k3 = riccati_rhs(rates, ctc, rho, p + 0.5 * dt * k2);
        const MatrixXd k4 = riccati_rhs(rates, ctc, rho, p + dt * k3);
        p += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!p.allFinite() || p.norm() > 1e9)
            throw RiccatiNonConvergence("gain Riccati flow diverged");
    }
    throw RiccatiNonConvergence("gain Riccati flow: no steady state within step budget");
}

void require_slow_detectable(const ModalSystem& system) {
    if (system.slow_count == 0) return;
    const double margin =
        strategic::observability_margin(system.output_matrix, system.growth_rates,
                                        system.slow_count, kDetectabilityHorizon);
    if (!(margin > kDetectabilityTol))
        throw UndetectableSlowMode("slow block has an unobservable direction (margin " +
                                   short_num(margin) + ")");
}

} // namespace

MatrixXd design_gain(const ModalSystem& system, const GainSpec& spec) {
    const auto n = static_cast<Index>(system.state_dim());
    const auto q = static_cast<Index>(system.output_dim());
    const auto ns = static_cast<Index>(system.slow_count);

    if (const auto* expl = std::get_if<ExplicitGain>(&spec)) {
        if (expl->injection.rows() != n || expl->injection.cols() != q)
            throw DimensionMismatch("design_gain: explicit gain must be state_dim x output_dim");
        return expl->injection;
    }

    require_slow_detectable(system);
    MatrixXd gain = MatrixXd::Zero(n, q);
    if (ns == 0) return gain;

    const VectorXd slow_rates = system.growth_rates.head(ns);
    const MatrixXd slow_c = system.output_matrix.leftCols(ns);

    if (const auto* ric = std::get_if<RiccatiGain>(&spec)) {
        if (!(ric->rho > 0.0))
            throw std::invalid_argument("design_gain: Riccati weight must be > 0");
        const MatrixXd p = riccati_steady_state(slow_rates, slow_c, ric->rho);
        gain.topRows(ns) = p * slow_c.transpose();
        return gain;
    }

    const auto& shift = std::get<RateShiftGain>(spec);
    if (!(shift.sigma_star > 0.0))
        throw std::invalid_argument("design_gain: target rate must be > 0");
    // H_s C_s = diag(rate_m + sigma_star), exact only when C_s has full
    // column rank (enough independent sensors for the whole slow block).
    MatrixXd target = MatrixXd::Zero(ns, ns);
    for (Index m = 0; m < ns; ++m) target(m, m) = slow_rates(m) + shift.sigma_star;
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(slow_c.transpose());
    const MatrixXd hs_t = cod.solve(target.transpose());
    const double residual = (slow_c.transpose() * hs_t - target.transpose()).norm();
    if (residual > 1e-8 * std::max(1.0, target.norm()))
        throw UndetectableSlowMode(
            "rate-shift gain needs a slow output block of full column rank (residual " +
            short_num(residual) + ")");
    gain.topRows(ns) = hs_t.transpose();
    return gain;
}

PartialGainResult design_gain_partial(const ModalSystem& system, const GainSpec& spec,
                                      double rank_tol) {
    const auto n = static_cast<Index>(system.state_dim());
    const auto q = static_cast<Index>(system.output_dim());
    const auto ns = static_cast<Index>(system.slow_count);
    PartialGainResult result;
    result.injection = MatrixXd::Zero(n, q);
    if (ns == 0) return result;

    // Group the slow block by equal growth rates so the drift stays scalar on
    // each block and the SVD split is invariant under it.
    std::vector<std::pair<Index, Index>> blocks; // [begin, end)
    Index begin = 0;
    for (Index m = 1; m <= ns; ++m) {
        if (m == ns || std::abs(system.growth_rates(m) - system.growth_rates(begin)) >
                           1e-9 * std::max(1.0, std::abs(system.growth_rates(begin)))) {
            blocks.emplace_back(begin, m);
            begin = m;
        }
    }

    // Snap coefficients below the rank tolerance to zero so directions the
    // sensors cannot see stay exactly decoupled from the injection.
    MatrixXd slow_c = system.output_matrix.leftCols(ns);
    for (Index i = 0; i < slow_c.rows(); ++i)
        for (Index j = 0; j < slow_c.cols(); ++j)
            if (std::abs(slow_c(i, j)) <= rank_tol) slow_c(i, j) = 0.0;

    std::vector<MatrixXd> live_bases;
    Index live_total = 0;
    for (const auto& [b, e] : blocks) {
        const Index r = e - b;
        const MatrixXd g = slow_c.middleCols(b, r);
        Eigen::JacobiSVD<MatrixXd> svd(g, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double largest = sv.size() > 0 ? sv(0) : 0.0;
        Index live = 0;
        while (live < sv.size() && largest > 0.0 && sv(live) > rank_tol * largest) ++live;
        live_bases.push_back(svd.matrixV().leftCols(live));
        live_total += live;

        // Report coordinate directions no sensor sees.
        for (Index m = 0; m < r; ++m)
            if (g.col(m).lpNorm<Eigen::Infinity>() == 0.0)
                result.frozen_modes.push_back(static_cast<std::size_t>(b + m));
    }
    if (live_total == 0) return result;

    MatrixXd basis = MatrixXd::Zero(ns, live_total);
    VectorXd reduced_rates(live_total);
    Index col = 0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto& [b, e] = blocks[k];
        const Index live = live_bases[k].cols();
        basis.block(b, col, e - b, live) = live_bases[k];
        reduced_rates.segment(col, live).setConstant(system.growth_rates(b));
        col += live;
    }

    const MatrixXd reduced_c = slow_c * basis;
    double rho = 1.0;
    if (const auto* ric = std::get_if<RiccatiGain>(&spec)) {
        rho = ric->rho;
    } else if (const auto* shift = std::get_if<RateShiftGain>(&spec)) {
        // Heuristic weight giving closed-loop rates of roughly sigma_star on
        // already-neutral directions.
        rho = shift->sigma_star * shift->sigma_star;
    } else {
        throw std::invalid_argument("design_gain_partial: explicit gains need no design");
    }
    const MatrixXd p = riccati_steady_state(reduced_rates, reduced_c, rho);
    result.injection.topRows(ns) = basis * (p * reduced_c.transpose());
    return result;
}

EstimatorOperators build_identity_estimator(const ModalSystem& system,
                                            const MatrixXd& injection) {
    const auto n = static_cast<Index>(system.state_dim());
    const auto q = static_cast<Index>(system.output_dim());
    if (injection.rows() != n || injection.cols() != q)
        throw DimensionMismatch("build_identity_estimator: gain must be state_dim x output_dim");
    EstimatorOperators ops;
    ops.state_map = MatrixXd::Identity(n, n);
    ops.dynamics = system.drift_matrix() - injection * system.output_matrix;
    ops.injection = injection;
    ops.input_map = system.input_matrix;
    ops.from_output = MatrixXd::Zero(n, q);
    ops.from_state = MatrixXd::Identity(n, n);
    return ops;
}

namespace {

// Minimum-norm X with X * stacked(:, 0..cols) = target(:, 0..cols); throws
// when the requested columns are not reproducible.
MatrixXd solve_reconstruction(const MatrixXd& stacked, const MatrixXd& target, Index cols,
                              const char* who) {
    const MatrixXd s = stacked.leftCols(cols);
    const MatrixXd rhs = target.leftCols(cols);
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(s.transpose());
    const MatrixXd xt = cod.solve(rhs.transpose());
    const double residual = (s.transpose() * xt - rhs.transpose()).norm();
    if (residual > 1e-9 * std::max(1.0, rhs.norm()))
        throw ReconstructionRankDeficient(std::string(who) +
                                          ": stacked output/transform map cannot reproduce the "
                                          "reconstruction target (residual " +
                                          short_num(residual) + ")");
    return xt.transpose();
}

} // namespace

EstimatorOperators build_general_estimator(const ModalSystem& system, const VectorXd& rates,
                                           const MatrixXd& injection) {
    const auto n = static_cast<Index>(system.state_dim());
    const auto q = static_cast<Index>(system.output_dim());
    const Index k = rates.size();
    if (injection.rows() != k || injection.cols() != q)
        throw DimensionMismatch("build_general_estimator: gain must be rates_dim x output_dim");
    for (Index p = 0; p < k; ++p) {
        if (!(rates(p) < 0.0))
            throw std::invalid_argument("build_general_estimator: estimator rates must be < 0");
        for (Index m = 0; m < n; ++m)
            if (std::abs(system.growth_rates(m) - rates(p)) <= 1e-9)
                throw SylvesterResonance("estimator rate " + std::to_string(rates(p)) +
                                         " collides with plant eigenvalue " +
                                         std::to_string(system.growth_rates(m)));
    }

    EstimatorOperators ops;
    ops.dynamics = MatrixXd(rates.asDiagonal());
    ops.injection = injection;
    const MatrixXd hc = injection * system.output_matrix;
    ops.state_map.resize(k, n);
    for (Index p = 0; p < k; ++p)
        for (Index m = 0; m < n; ++m)
            ops.state_map(p, m) = hc(p, m) / (system.growth_rates(m) - rates(p));
    ops.input_map = ops.state_map * system.input_matrix;

    MatrixXd stacked(q + k, n);
    stacked.topRows(q) = system.output_matrix;
    stacked.bottomRows(k) = ops.state_map;
    const MatrixXd x = solve_reconstruction(stacked, MatrixXd::Identity(n, n), n,
                                            "build_general_estimator");
    ops.from_output = x.leftCols(q);
    ops.from_state = x.rightCols(k);
    return ops;
}

EstimatorOperators build_reduced_estimator(const ModalSystem& system, const MatrixXd& dynamics,
                                           const MatrixXd& injection, const MatrixXd& target,
                                           std::size_t exact_columns) {
    const auto n = static_cast<Index>(system.state_dim());
    const auto q = static_cast<Index>(system.output_dim());
    const Index k = dynamics.rows();
    if (dynamics.cols() != k)
        throw DimensionMismatch("build_reduced_estimator: dynamics must be square");
    if (injection.rows() != k || injection.cols() != q)
        throw DimensionMismatch("build_reduced_estimator: gain must be dynamics_dim x output_dim");
    if (target.cols() != n)
        throw DimensionMismatch("build_reduced_estimator: target must have one column per mode");
    if (exact_columns > static_cast<std::size_t>(n))
        throw std::invalid_argument("build_reduced_estimator: exact column count exceeds modes");

    EstimatorOperators ops;
    ops.dynamics = dynamics;
    ops.injection = injection;
    const MatrixXd hc = injection * system.output_matrix;
    ops.state_map.resize(k, n);
    const MatrixXd eye = MatrixXd::Identity(k, k);
    for (Index m = 0; m < n; ++m) {
        Eigen::FullPivLU<MatrixXd> lu(system.growth_rates(m) * eye - dynamics);
        if (!lu.isInvertible())
            throw SylvesterResonance("plant eigenvalue " + std::to_string(system.growth_rates(m)) +
                                     " lies in the estimator dynamics spectrum");
        ops.state_map.col(m) = lu.solve(hc.col(m));
    }
    ops.input_map = ops.state_map * system.input_matrix;

    MatrixXd stacked(q + k, n);
    stacked.topRows(q) = system.output_matrix;
    stacked.bottomRows(k) = ops.state_map;
    const MatrixXd x = solve_reconstruction(stacked, target,
                                            static_cast<Index>(exact_columns),
                                            "build_reduced_estimator");
    ops.from_output = x.leftCols(q);
    ops.from_state = x.rightCols(k);
    return ops;
}

EstimatorResiduals verify_estimator_conditions(const EstimatorOperators& ops,
                                               const ModalSystem& system) {
    const auto n = static_cast<Index>(system.state_dim());
    const auto q = static_cast<Index>(system.output_dim());
    const Index k = ops.dynamics.rows();
    if (ops.state_map.rows() != k || ops.state_map.cols() != n || ops.injection.rows() != k ||
        ops.injection.cols() != q || ops.from_state.cols() != k || ops.from_output.cols() != q ||
        ops.from_output.rows() != ops.from_state.rows())
        throw DimensionMismatch("verify_estimator_conditions: inconsistent operator shapes");

    EstimatorResiduals res;
    res.intertwining = (ops.state_map * system.drift_matrix() - ops.dynamics * ops.state_map -
                        ops.injection * system.output_matrix)
                           .norm();
    res.input = (ops.input_map - ops.state_map * system.input_matrix).norm();
    if (ops.from_output.rows() == n) {
        res.reconstruction = (ops.from_output * system.output_matrix +
                              ops.from_state * ops.state_map - MatrixXd::Identity(n, n))
                                 .norm();
    } else {
        res.reconstruction = std::numeric_limits<double>::quiet_NaN();
    }
    return res;
}

double reconstruction_residual(const EstimatorOperators& ops, const ModalSystem& system,
                               const MatrixXd& target, std::size_t columns) {
    const auto cols = static_cast<Index>(columns);
    const MatrixXd mix = ops.from_output * system.output_matrix + ops.from_state * ops.state_map;
    return (mix.leftCols(cols) - target.leftCols(cols)).norm();
}

DynamicsDecay estimate_dynamics_decay(const MatrixXd& dynamics) {
    const Index k = dynamics.rows();
    DynamicsDecay out;
    if (k == 0) {
        out.stable = true;
        return out;
    }
    const double scale = std::max(1.0, dynamics.cwiseAbs().rowwise().sum().maxCoeff());
    const double dt = 0.05 / scale;
    MatrixXd e = MatrixXd::Identity(k, k);
    std::vector<double> ts, lognorms;
    double t = 0.0;
    const std::size_t max_steps = 400000;
    const std::size_t sample_every = std::max<std::size_t>(1, max_steps / 4000);
    double norm = e.norm();
    ts.push_back(0.0);
    lognorms.push_back(std::log(norm));
    for (std::size_t step = 1; step <= max_steps; ++step) {
        const MatrixXd k1 = dynamics * e;
        const MatrixXd k2 = dynamics * (e + 0.5 * dt * k1);
        const MatrixXd k3 = dynamics * (e + 0.5 * dt * k2);
        const MatrixXd k4 = dynamics * (e + dt * k3);
        e += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;
        norm = e.norm();
        if (!std::isfinite(norm) || norm > 1e12) return out; // unstable
        if (step % sample_every == 0) {
            ts.push_back(t);
            lognorms.push_back(std::log(std::max(norm, 1e-300)));
        }
        if (norm < 1e-9) break;
    }
    if (lognorms.size() < 3) return out;
    // Slope over the last half of the samples.
    const std::size_t lo = lognorms.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto count = static_cast<double>(lognorms.size() - lo);
    for (std::size_t i = lo; i < lognorms.size(); ++i) {
        sx += ts[i];
        sy += lognorms[i];
        sxx += ts[i] * ts[i];
        sxy += ts[i] * lognorms[i];
    }
    const double denom = count * sxx - sx * sx;
    if (denom <= 0.0) return out;
    const double slope = (count * sxy - sx * sy) / denom;
    out.rate = -slope;
    // Monotone decay past the transient: norm must shrink over the tail.
    out.stable = out.rate > 0.0 && lognorms.back() < lognorms[lo] - 1e-9;
    if (lognorms.back() <= std::log(2e-9)) out.stable = out.rate > 0.0;
    return out;
}

Eigen::VectorXd input_value(const InputSignal& input, double t, std::size_t dim) {
    if (std::holds_alternative<ZeroInput>(input))
        return VectorXd::Zero(static_cast<Index>(dim));
    const auto& pw = std::get<PiecewiseConstantInput>(input);
    if (pw.times.empty() || t < pw.times.front())
        return VectorXd::Zero(static_cast<Index>(dim));
    auto it = std::upper_bound(pw.times.begin(), pw.times.end(), t);
    const std::size_t idx = static_cast<std::size_t>(it - pw.times.begin()) - 1;
    return pw.values[std::min(idx, pw.values.size() - 1)];
}

namespace {

struct SimState {
    VectorXd state;
    VectorXd observer;
};

// Advance the pair over [t, t+h] where the input is constant; the state moves
// by the exact modal propagator, the observer by one 4-stage step with outputs
// sampled from the exact state at the stage times.
void advance_constant_input(const ModalSystem& sys, const EstimatorOperators& ops,
                            const VectorXd& u, double t, double h, SimState& x) {
    const Index n = x.state.size();
    VectorXd e_half(n), e_full(n), conv_half(n), conv_full(n);
    const VectorXd bu = sys.input_dim() > 0 ? VectorXd(sys.input_matrix * u)
                                            : VectorXd::Zero(n);
    for (Index m = 0; m < n; ++m) {
        const double a = sys.growth_rates(m);
        e_half(m) = std::exp(a * 0.5 * h);
        e_full(m) = std::exp(a * h);
        const double phi_half = a == 0.0 ? 0.5 * h : std::expm1(a * 0.5 * h) / a;
        const double phi_full = a == 0.0 ? h : std::expm1(a * h) / a;
        conv_half(m) = bu(m) * phi_half;
        conv_full(m) = bu(m) * phi_full;
    }
    const VectorXd state0 = x.state;
    const VectorXd state_half = e_half.cwiseProduct(state0) + conv_half;
    const VectorXd state_full = e_full.cwiseProduct(state0) + conv_full;

    const VectorXd y0 = sys.output_matrix * state0;
    const VectorXd y_half = sys.output_matrix * state_half;
    const VectorXd y_full = sys.output_matrix * state_full;
    const VectorXd gu = ops.input_map.cols() > 0 ? VectorXd(ops.input_map * u)
                                                 : VectorXd::Zero(ops.dynamics.rows());

    auto rhs = [&](const VectorXd& w, const VectorXd& y) -> VectorXd {
        return ops.dynamics * w + gu + ops.injection * y;
    };
    const VectorXd k1 = rhs(x.observer, y0);
    const VectorXd k2 = rhs(x.observer + 0.5 * h * k1, y_half);
    const VectorXd k3 = rhs(x.observer + 0.5 * h * k2, y_half);
    const VectorXd k4 = rhs(x.observer + h * k3, y_full);
    x.observer += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x.state = state_full;
    (void)t;
}

void advance_step(const ModalSystem& sys, const EstimatorOperators& ops,
                  const InputSignal& input, double t, double h, SimState& x) {
    // Split at input breakpoints so each piece has constant input.
    std::vector<double> cuts;
    if (const auto* pw = std::get_if<PiecewiseConstantInput>(&input)) {
        for (double bp : pw->times)
            if (bp > t + 1e-15 * std::max(1.0, std::abs(t)) && bp < t + h - 1e-15)
                cuts.push_back(bp);
    }
    double cur = t;
    for (double cut : cuts) {
        const VectorXd u = input_value(input, cur, sys.input_dim());
        advance_constant_input(sys, ops, u, cur, cut - cur, x);
        cur = cut;
    }
    const VectorXd u = input_value(input, cur, sys.input_dim());
    advance_constant_input(sys, ops, u, cur, t + h - cur, x);
}

SimState run_once(const ModalSystem& sys, const EstimatorOperators& ops, const VectorXd& z0,
                  const VectorXd& w0, const InputSignal& input, double t_final, double dt,
                  TrajectoryRecord* record) {
    SimState x{z0, w0};
    const std::size_t full_steps = static_cast<std::size_t>(t_final / dt);
    const double remainder = t_final - static_cast<double>(full_steps) * dt;
    const bool has_tail = remainder > 1e-12 * std::max(1.0, t_final);
    const std::size_t samples = full_steps + 1 + (has_tail ? 1 : 0);

    if (record) {
        record->times.resize(samples);
        record->states.resize(z0.size(), static_cast<Index>(samples));
        record->observers.resize(w0.size(), static_cast<Index>(samples));
        record->estimates.resize(ops.from_output.rows(), static_cast<Index>(samples));
        record->outputs.resize(sys.output_matrix.rows(), static_cast<Index>(samples));
    }
    auto emit = [&](std::size_t k, double t) {
        if (!record) return;
        record->times[k] = t;
        record->states.col(static_cast<Index>(k)) = x.state;
        record->observers.col(static_cast<Index>(k)) = x.observer;
        const VectorXd y = sys.output_matrix * x.state;
        record->outputs.col(static_cast<Index>(k)) = y;
        record->estimates.col(static_cast<Index>(k)) =
            ops.from_output * y + ops.from_state * x.observer;
    };

    emit(0, 0.0);
    for (std::size_t s = 0; s < full_steps; ++s) {
        const double t = static_cast<double>(s) * dt;
        advance_step(sys, ops, input, t, dt, x);
        emit(s + 1, t + dt);
    }
    if (has_tail) {
        advance_step(sys, ops, input, static_cast<double>(full_steps) * dt, remainder, x);
        emit(samples - 1, t_final);
    }
    return x;
}

} // namespace

TrajectoryRecord simulate(const ModalSystem& system, const EstimatorOperators& ops,
                          const VectorXd& initial_state, const VectorXd& initial_observer,
                          const InputSignal& input, double t_final, double dt) {
    if (!(dt > 0.0))
        throw std::invalid_argument("simulate: dt must be > 0");
    if (!(t_final >= dt))
        throw std::invalid_argument("simulate: t_final must be >= dt");
    if (initial_state.size() != static_cast<Index>(system.state_dim()))
        throw DimensionMismatch("simulate: initial state has wrong length");
    if (initial_observer.size() != ops.dynamics.rows())
        throw DimensionMismatch("simulate: initial observer state has wrong length");
    if (const auto* pw = std::get_if<PiecewiseConstantInput>(&input)) {
        if (pw->times.size() != pw->values.size())
            throw std::invalid_argument("simulate: input table sizes differ");
        for (std::size_t k = 0; k + 1 < pw->times.size(); ++k)
            if (!(pw->times[k] < pw->times[k + 1]))
                throw std::invalid_argument("simulate: input breakpoints must increase");
        for (const auto& v : pw->values)
            if (v.size() != static_cast<Index>(system.input_dim()))
                throw DimensionMismatch("simulate: input table width mismatch");
    }

    TrajectoryRecord record;
    const SimState full = run_once(system, ops, initial_state, initial_observer, input,
                                   t_final, dt, &record);
    const SimState half = run_once(system, ops, initial_state, initial_observer, input,
                                   t_final, 0.5 * dt, nullptr);
    const double ref = std::max({1.0, half.state.lpNorm<Eigen::Infinity>(),
                                 half.observer.lpNorm<Eigen::Infinity>()});
    const double diff = std::max((full.state - half.state).lpNorm<Eigen::Infinity>(),
                                 (full.observer - half.observer).lpNorm<Eigen::Infinity>());
    if (diff > 1e-6 * ref)
        throw StepTooCoarse("simulate: dt vs dt/2 final states differ by " +
                            std::to_string(diff / ref) + " relative; reduce dt");
    return record;
}

} // namespace regobs::observer
