#pragma once

// Measurement-based feedback on the two-channel canonical filter
// (L_1, L_2) = (R, iR) / sqrt(2): each channel is displaced by an imaginary
// amplitude alpha_k computed from the current filtered state, which turns
// the filtered dynamics into the diffusion equation for (R, H).

#include <array>
#include <vector>

#include "qsde/canonical.hpp"

namespace qsde {

using FeedbackAlphas = std::array<Complex, 2>;

/// alpha_1 = -<R - R^*> / (2 sqrt 2), alpha_2 = -i <R + R^*> / (2 sqrt 2).
/// Throws Error if either has a real part above 1e-12.
FeedbackAlphas feedback_alpha(const StateVector& psi, const Operator& r);

/// The displaced model L_k + alpha_k, H + sum_k Im{alpha_k^* L_k}.
Coefficients modulated_coefficients(const Operator& r, const Operator& h, const FeedbackAlphas& alphas);

/// Filter increment of the displaced model, with lambda_k taken from the
/// undisplaced couplings.
StateVector modulated_increment(const Operator& r, const Operator& h, const StateVector& psi,
                                const FeedbackAlphas& alphas, std::span<const double> dI, double dt);

/// Residuals of the algebraic relations between alpha, lambda and c on one state.
struct FeedbackIdentities {
  Complex c;
  RealVector lambdas;
  FeedbackAlphas alphas;
  /// ||sum_k (alpha_k^* - lambda_k/2) L_k + c^* R||, zero by direct substitution.
  double combination_vs_minus_cbar_r = 0.0;
  /// Same combination compared with +c^* R.
  double combination_vs_plus_cbar_r = 0.0;
  double half_sum_abs_alpha_sq = 0.0;
  double sum_abs_alpha_sq = 0.0;
  double quarter_sum_lambda_sq = 0.0;
  double half_abs_c_sq = 0.0;
  double abs_sum_lambda_alpha = 0.0;
};

FeedbackIdentities feedback_identities(const StateVector& psi, const Operator& r);

struct ClosedLoopRun {
  TimeGrid grid;
  std::vector<StateVector> states;
  std::vector<FeedbackAlphas> alphas;  // per step, applied on that step
  std::vector<RealVector> lambdas;     // per grid point
  std::vector<RealVector> records;     // accumulated Y_k per grid point
  GisinTrajectory reference;
  std::vector<double> residual;  // ||psi_t - psi~_t||, no phase alignment
  double max_real_alpha = 0.0;

  double max_residual() const;
};

/// Synchronous loop: alpha for step m uses the filtered state at t_m. The
/// reference diffusion is driven by dxi^* = (dI_1 + i dI_2) / sqrt(2).
ClosedLoopRun closed_loop_run(const Operator& r, const Operator& h, const RealNoisePath& path,
                              const StateVector& psi0, const TimeGrid& grid);

}  // namespace qsde
