#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "regobs/sensing.hpp"
#include "regobs/spectral.hpp"
#include "regobs/strategic.hpp"

namespace regobs::observer {

// Truncated modal state-space model: diagonal drift (growth rates on the
// diagonal), optional actuator columns, stacked sensor output matrix. Modes
// are ordered slowest first; the first slow_count of them form the slow block.
struct ModalSystem {
    Eigen::VectorXd growth_rates; // diag of the drift matrix, length n
    Eigen::MatrixXd input_matrix; // n x p (p may be 0)
    Eigen::MatrixXd output_matrix; // q x n
    std::size_t slow_count = 0;

    std::size_t state_dim() const { return static_cast<std::size_t>(growth_rates.size()); }
    std::size_t output_dim() const { return static_cast<std::size_t>(output_matrix.rows()); }
    std::size_t input_dim() const { return static_cast<std::size_t>(input_matrix.cols()); }
    Eigen::MatrixXd drift_matrix() const {
        return Eigen::MatrixXd(growth_rates.asDiagonal());
    }
};

ModalSystem make_modal_system(const spectral::ModeSet& modes,
                              std::span<const sensing::SensorSpec> sensors,
                              const strategic::SlowSpec& slow,
                              const Eigen::MatrixXd& input_matrix = Eigen::MatrixXd());

// --- observer gain design ----------------------------------------------------

struct RiccatiGain {
    double rho = 1.0; // state weight in the gain Riccati flow
};

struct RateShiftGain {
    double sigma_star = 1.0; // target closed-loop decay rate for the slow block
};

struct ExplicitGain {
    Eigen::MatrixXd injection; // n x q
};

using GainSpec = std::variant<RiccatiGain, RateShiftGain, ExplicitGain>;

// Output-injection gain with nonzero rows only on the slow block. Riccati:
// steady state of dP/dt = A P + P A' - P C' C P + rho I from P(0) = I, gain
// P C'. RateShift: assigns the slow closed-loop block to -sigma_star exactly
// (needs a slow output block of full column rank). Throws UndetectableSlowMode
// when the slow block has a direction no sensor sees.
Eigen::MatrixXd design_gain(const ModalSystem& system, const GainSpec& spec);

// Like design_gain, but restricted to the observable directions of each slow
// eigenspace (found by SVD of the group coefficient block); unobservable
// directions are left open-loop and reported.
struct PartialGainResult {
    Eigen::MatrixXd injection; // n x q
    std::vector<std::size_t> frozen_modes; // slow mode indices left open-loop
};

PartialGainResult design_gain_partial(const ModalSystem& system, const GainSpec& spec,
                                      double rank_tol = 1e-10);

// --- estimator construction ---------------------------------------------------

// The operator tuple of a state estimator
//     dw/dt = dynamics w + input_map u + injection y,
//     estimate = from_output y + from_state w,
// intertwined with the plant by  state_map A - dynamics state_map = injection C
// and input_map = state_map B. When the reconstruction identity
// from_output C + from_state state_map = target holds, the estimate converges
// to target z along with w -> state_map z.
struct EstimatorOperators {
    Eigen::MatrixXd state_map;  // k x n
    Eigen::MatrixXd dynamics;   // k x k
    Eigen::MatrixXd injection;  // k x q
    Eigen::MatrixXd input_map;  // k x p
    Eigen::MatrixXd from_output; // t x q
    Eigen::MatrixXd from_state;  // t x k

    std::size_t observer_dim() const { return static_cast<std::size_t>(dynamics.rows()); }
    std::size_t estimate_dim() const { return static_cast<std::size_t>(from_output.rows()); }
};

// state_map = I, dynamics = A - H C, reconstruction (0, I).
EstimatorOperators build_identity_estimator(const ModalSystem& system,
                                            const Eigen::MatrixXd& injection);

// Diagonal estimator dynamics with the given stable rates; the transform is
// solved entrywise from the diagonal relation, and the reconstruction is the
// minimum-norm solution of [M N] [C; T] = I. Throws SylvesterResonance when a
// rate collides with a plant growth rate, ReconstructionRankDeficient when the
// stacked map has column rank < n.
EstimatorOperators build_general_estimator(const ModalSystem& system,
                                           const Eigen::VectorXd& rates,
                                           const Eigen::MatrixXd& injection);

// General (possibly non-diagonal) stable dynamics and an arbitrary
// reconstruction target enforced exactly on the leading exact_columns columns
// (minimum-norm elsewhere). Used for reduced estimators that reconstruct a
// projection of the state rather than the state itself.
EstimatorOperators build_reduced_estimator(const ModalSystem& system,
                                           const Eigen::MatrixXd& dynamics,
                                           const Eigen::MatrixXd& injection,
                                           const Eigen::MatrixXd& target,
                                           std::size_t exact_columns);

struct EstimatorResiduals {
    double reconstruction = 0.0; // |from_output C + from_state state_map - I|_F
    double intertwining = 0.0;   // |state_map A - dynamics state_map - injection C|_F
    double input = 0.0;          // |input_map - state_map B|_F
};

EstimatorResiduals verify_estimator_conditions(const EstimatorOperators& ops,
                                               const ModalSystem& system);

// Reconstruction residual against an arbitrary target on selected columns.
double reconstruction_residual(const EstimatorOperators& ops, const ModalSystem& system,
                               const Eigen::MatrixXd& target, std::size_t columns);

// Decay-rate estimate of dE/dt = dynamics E from the propagated matrix norm;
// also reports whether the norm decays monotonically past the transient.
struct DynamicsDecay {
    double rate = 0.0;
    bool stable = false;
};

DynamicsDecay estimate_dynamics_decay(const Eigen::MatrixXd& dynamics);

// --- simulation ----------------------------------------------------------------

struct ZeroInput {};

struct PiecewiseConstantInput {
    std::vector<double> times;           // breakpoints, strictly increasing
    std::vector<Eigen::VectorXd> values; // value on [times[k], times[k+1]); last holds
};

using InputSignal = std::variant<ZeroInput, PiecewiseConstantInput>;

Eigen::VectorXd input_value(const InputSignal& input, double t, std::size_t dim);

struct TrajectoryRecord {
    std::vector<double> times;
    Eigen::MatrixXd states;    // n x samples, exact modal propagation
    Eigen::MatrixXd observers; // k x samples
    Eigen::MatrixXd estimates; // estimate_dim x samples
    Eigen::MatrixXd outputs;   // q x samples

    std::size_t sample_count() const { return times.size(); }
};

// True state propagated exactly mode by mode; observer integrated by the
// classical 4-stage explicit scheme with outputs sampled from the exact state
// at stage times. A run is accepted only if repeating it at dt/2 moves the
// final (state, observer) pair by at most 1e-6 relative, else StepTooCoarse.
TrajectoryRecord simulate(const ModalSystem& system, const EstimatorOperators& ops,
                          const Eigen::VectorXd& initial_state,
                          const Eigen::VectorXd& initial_observer, const InputSignal& input,
                          double t_final, double dt);

} // namespace regobs::observer
