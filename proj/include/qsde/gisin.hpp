#pragma once

// Quantum state diffusion driven by complex Wiener increments. The equation
// consumes the conjugate stream dxi_k^*, and the drivers only accept paths
// flagged ComplexConvention::XiConjugate.

#include <span>
#include <vector>

#include "qsde/grid.hpp"
#include "qsde/model.hpp"
#include "qsde/noise.hpp"

namespace qsde {

struct GisinState {
  StateVector psi;
  ComplexVector c;  // c_k = <psi|R_k psi>
  double t = 0.0;

  static GisinState initial(const ModelSpec& model, const StateVector& psi0, double t0 = 0.0);
};

ComplexVector gisin_expectations(const Coefficients& coeffs, const StateVector& psi);

/// dM psi = sum_k (R_k - c_k) psi dxi_k^*
///        + (-iH - 1/2 sum_k (R_k^* R_k - 2 c_k^* R_k + |c_k|^2)) psi dt.
StateVector gisin_increment(const Coefficients& coeffs, const StateVector& psi,
                            std::span<const Complex> dxi_star, double dt);
StateVector gisin_increment(const ModelSpec& model, const StateVector& psi, std::span<const Complex> dxi_star,
                            double dt, double t);

GisinState gisin_step(const ModelSpec& model, const GisinState& state, std::span<const Complex> dxi_star,
                      double dt);

class GisinIntegrator {
 public:
  GisinIntegrator(const ModelSpec& model, const StateVector& psi0, double t0 = 0.0);

  void step(std::span<const Complex> dxi_star, double dt);
  const GisinState& state() const noexcept { return state_; }

 private:
  ModelSpec model_;
  Coefficients coeffs_;
  GisinState state_;
  StateVector delta_;
  std::vector<StateVector> rpsi_;
  std::size_t steps_taken_ = 0;
};

struct GisinTrajectory {
  TimeGrid grid;
  std::vector<StateVector> states;
  std::vector<ComplexVector> c_values;
  std::vector<ComplexVector> dxi_star;  // per step
};

GisinTrajectory gisin_run(const ModelSpec& model, const StateVector& psi0, const ComplexNoisePath& dxi_star,
                          const TimeGrid& grid);

/// How the conjugate noise stream must be transformed alongside a coupling
/// rotation R' = U R: dxi'^* = conj(U) dxi^*.
struct NoiseRotation {
  Operator conj_stream_map;

  ComplexNoisePath apply(const ComplexNoisePath& dxi_star) const;
};

/// The scalar phase rate picked up under a translation R'_k = R_k + beta_k,
/// H' = H + sum_k Im{beta_k^* R_k} + epsilon: the transformed state obeys the
/// original equation plus -i rate(c) psi dt, rate(c) = sum_k Im{conj(beta_k) c_k} + epsilon.
struct TranslationPhase {
  ComplexVector beta;
  double epsilon = 0.0;

  double rate(const ComplexVector& c) const;
};

struct RotatedModel {
  ModelSpec model;
  NoiseRotation noise;
};

struct TranslatedModel {
  ModelSpec model;
  TranslationPhase phase;
};

/// Rotation R'_k = sum_j u_kj R_j; throws DomainError unless U is unitary within 1e-12.
RotatedModel euclidean_transform_gp(const ModelSpec& model, const Operator& u);

/// Translation by scalar beta with energy offset epsilon.
TranslatedModel euclidean_transform_gp(const ModelSpec& model, const ComplexVector& beta, double epsilon);

}  // namespace qsde
