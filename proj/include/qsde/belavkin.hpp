#pragma once

// Filtering (homodyne) stochastic Schrodinger equation driven by real
// innovations dI_k, plus its linear form driven by the measured record dY_k.
// Scheme: explicit Euler-Maruyama on the Ito equation followed by
// renormalization, with lambda_k taken on the pre-step state.

#include <span>
#include <vector>

#include "qsde/grid.hpp"
#include "qsde/model.hpp"
#include "qsde/noise.hpp"

namespace qsde {

struct BelavkinState {
  StateVector psi;
  RealVector lambdas;      // lambda_k = <psi|(L_k + L_k^*) psi>
  RealVector records;      // accumulated measurement Y_k
  RealVector innovations;  // accumulated I_k
  double t = 0.0;

  static BelavkinState initial(const ModelSpec& model, const StateVector& psi0, double t0 = 0.0);
};

RealVector belavkin_lambdas(const Coefficients& coeffs, const StateVector& psi);

/// dF psi for the filtering equation, lambda_k evaluated on psi:
/// sum_k (L_k - lambda_k/2) psi dI_k
///   + (-iH - 1/2 sum_k (L_k^* L_k - lambda_k L_k + lambda_k^2/4)) psi dt.
StateVector belavkin_increment(const Coefficients& coeffs, const StateVector& psi, std::span<const double> dI,
                               double dt);
StateVector belavkin_increment(const ModelSpec& model, const StateVector& psi, std::span<const double> dI,
                               double dt, double t);

/// Same increment with externally supplied lambdas. The feedback loop uses
/// this to keep lambda at its unmodulated value.
StateVector belavkin_increment_with_lambdas(const Coefficients& coeffs, const StateVector& psi,
                                            const RealVector& lambdas, std::span<const double> dI, double dt);

/// psi' = normalize(psi + dF psi); Y += dI + lambda dt; I += dI.
/// Throws IntegrationError when the pre-normalization norm falls below 1e-12.
BelavkinState belavkin_step(const ModelSpec& model, const BelavkinState& state, std::span<const double> dI,
                            double dt);

/// chi' = chi - (1/2 sum_k L_k^* L_k + iH) chi dt + sum_k L_k chi dY_k. No normalization.
StateVector zakai_step(const ModelSpec& model, const StateVector& chi, std::span<const double> dY, double dt,
                       double t);

/// Single channel L(t) = sqrt(gamma) e^{-i phi} e^{i omega t} a with Hamiltonian h.
ModelSpec detuned_coupling(double gamma, double phi, double omega, const Operator& a, const Operator& h);
ModelSpec detuned_coupling(double gamma, double phi, double omega, const Operator& a);

/// A completed filtering trajectory. states/lambdas/records are indexed by
/// grid point, innovations by step.
struct BelavkinTrajectory {
  TimeGrid grid;
  std::vector<StateVector> states;
  std::vector<RealVector> lambdas;
  std::vector<RealVector> records;
  std::vector<RealVector> innovations;
};

/// Reusable integrator that advances in place; the trajectory and ensemble
/// drivers are built on it.
class BelavkinIntegrator {
 public:
  BelavkinIntegrator(const ModelSpec& model, const StateVector& psi0, double t0 = 0.0);

  void step(std::span<const double> dI, double dt);
  const BelavkinState& state() const noexcept { return state_; }

  /// |(||psi + dF psi||^2 - 1)| from the most recent step.
  double last_norm_defect() const noexcept { return last_norm_defect_; }

 private:
  ModelSpec model_;
  Coefficients coeffs_;
  BelavkinState state_;
  StateVector delta_;
  std::vector<StateVector> lpsi_;
  std::size_t steps_taken_ = 0;
  double last_norm_defect_ = 0.0;
};

BelavkinTrajectory belavkin_run(const ModelSpec& model, const StateVector& psi0, const RealNoisePath& path,
                                const TimeGrid& grid);

}  // namespace qsde
