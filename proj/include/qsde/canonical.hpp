#pragma once

// The canonical filtering model L_k = z_k R built from a diffusion model
// (R, H), the real-to-complex noise identification dxi^* = sum_k z_k dI_k,
// and the stochastic phase Theta relating the two unravellings pathwise:
// psi_t = e^{i Theta(t)} psi~_t.

#include <vector>

#include "qsde/belavkin.hpp"
#include "qsde/gisin.hpp"

namespace qsde {

struct CanonicalCoefficients {
  int n = 2;
  double phi = 0.0;
  ComplexVector z;

  /// |sum |z_k|^2 - 1| and |sum z_k^2|.
  double norm_defect() const;
  double square_sum_defect() const;
};

/// n = 2: (e^{i phi}, +-i e^{i phi}) / sqrt(2), sign picks +-.
/// n >= 3: z_k = e^{i phi} e^{i pi (k-1)/n} / sqrt(n).
/// Throws DomainError for n < 2.
CanonicalCoefficients canonical_coefficients(int n, double phi = 0.0, int sign = +1);

/// Validates an arbitrary coefficient vector against both sum conditions (1e-12).
CanonicalCoefficients canonical_coefficients_from(ComplexVector z, double phi = 0.0);

/// n-channel filtering model L_k = z_k R with the same Hamiltonian.
ModelSpec build_canonical_model(const Operator& r, const Operator& h, const CanonicalCoefficients& z);
/// Same for a single-channel (R, H) model, possibly time dependent.
ModelSpec build_canonical_model(const ModelSpec& rh, const CanonicalCoefficients& z);

/// Theta increment evaluated both as (1/2i)(c dxi^* - c^* dxi) and as
/// sum_k Im{z_k c} dI_k. Throws Error when they differ by more than 1e-12,
/// which means dxi^* was not built from dI with these z.
double phase_increment(Complex c, Complex dxi_star, const CanonicalCoefficients& z, std::span<const double> dI);

struct PhaseProcess {
  double theta = 0.0;
  double quadratic_variation = 0.0;

  void advance(double d_theta) {
    theta += d_theta;
    quadratic_variation += d_theta * d_theta;
  }
};

struct CoupledRun {
  CanonicalCoefficients z;
  BelavkinTrajectory belavkin;
  GisinTrajectory gisin;
  ComplexNoisePath dxi_star;
  std::vector<double> theta;                // per grid point
  std::vector<double> quadratic_variation;  // per grid point
  std::vector<double> d_theta;              // per step
  std::vector<double> residual;             // ||psi_t - e^{i Theta} psi~_t||
  std::vector<double> infidelity;           // 1 - |<psi_t|psi~_t>|

  double max_residual() const;
  PhaseProcess phase() const;
};

/// Runs the canonical filter on dI and the diffusion on dxi^* = sum z_k dI_k,
/// integrating Theta alongside with c taken on the diffusion state at the
/// start of each step.
CoupledRun coupled_pair_run(const Operator& r, const Operator& h, const CanonicalCoefficients& z,
                            const RealNoisePath& path, const StateVector& psi0, const TimeGrid& grid);
CoupledRun coupled_pair_run(const ModelSpec& rh, const CanonicalCoefficients& z, const RealNoisePath& path,
                            const StateVector& psi0, const TimeGrid& grid);

/// Realized discrete Ito products of Theta against the complex noise and the
/// values the multiplication table predicts.
struct PhaseItoReport {
  Complex sum_dtheta_dxi_star;
  Complex expected_dtheta_dxi_star;  // (i/2) int c^* dt
  Complex sum_dtheta_dxi;
  Complex expected_dtheta_dxi;  // -(i/2) int c dt
  double realized_qv = 0.0;
  double expected_qv = 0.0;  // 1/2 int |c|^2 dt
  double integral_abs_c = 0.0;

  double qv_relative_error() const;
};

PhaseItoReport phase_ito_cross_check(const CoupledRun& run);

}  // namespace qsde
