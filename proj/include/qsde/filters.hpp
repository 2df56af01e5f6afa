#pragma once

// Expectation-level filters: pi_t(X) = <psi_t|X psi_t> along a filtering
// trajectory and pi~_t(X) along a diffusion trajectory, their increment
// regressions, and the equality check between the two on coupled runs.

#include <vector>

#include "qsde/canonical.hpp"

namespace qsde {

struct FilterSeries {
  Operator observable;
  TimeGrid grid;
  std::vector<Complex> values;

  /// max |Im value|; meaningful for hermitian observables.
  double max_imaginary() const;
};

FilterSeries belavkin_filter_series(const BelavkinTrajectory& traj, const Operator& x);
FilterSeries gisin_filter_series(const GisinTrajectory& traj, const Operator& x);

/// Per-step discrepancy between the realized increment of the series and
/// the first-order filter equation evaluated at the step start.
struct IncrementRegression {
  std::vector<double> residual;  // |Delta pi - predicted|, per step
  double max_residual = 0.0;
  double rms_residual = 0.0;
};

/// Predicted: pi(G X) dt + sum_k (pi(X L_k + L_k^* X) - lambda_k pi(X)) dI_k,
/// with G the Heisenberg-picture Lindblad generator of (L, H).
IncrementRegression belavkin_filter_regression(const ModelSpec& model, const BelavkinTrajectory& traj,
                                               const Operator& x);

/// Predicted: pi~(G X) dt + sum_k (pi~(X R_k) - c_k pi~(X)) dxi_k^*
///          + sum_k (pi~(R_k^* X) - c_k^* pi~(X)) dxi_k.
IncrementRegression gisin_filter_regression(const ModelSpec& model, const GisinTrajectory& traj,
                                            const Operator& x);

struct Prop2Report {
  std::vector<double> deviation;  // |pi_t(X) - pi~_t(X)| per grid point
  double max_deviation = 0.0;
  /// max_t |<psi|X psi> - <e^{i Theta} psi|X e^{i Theta} psi>|.
  double phase_immunity_error = 0.0;
};

/// Filter equality on a coupled run of the n-channel canonical class (n from
/// the path, phi = 0, sign +).
Prop2Report proposition2_check(const Operator& r, const Operator& h, const Operator& x, const RealNoisePath& path,
                               const StateVector& psi0, const TimeGrid& grid);
Prop2Report proposition2_check(const CoupledRun& run, const Operator& x);

}  // namespace qsde
