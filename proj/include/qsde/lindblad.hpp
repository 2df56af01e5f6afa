#pragma once

// Deterministic master-equation propagation. This is the ensemble-average
// oracle for both stochastic unravellings.

#include <vector>

#include "qsde/grid.hpp"
#include "qsde/model.hpp"

namespace qsde {

inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityTol = 1e-8;

struct DensityInvariants {
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;

  bool ok() const noexcept {
    return hermiticity_error <= kHermitianTol && trace_error <= kTraceTol && min_eigenvalue >= -kPositivityTol;
  }
};

class DensityMatrix {
 public:
  /// Validates hermiticity, unit trace and positivity; throws DomainError.
  explicit DensityMatrix(Operator rho);

  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(Index dim);

  const Operator& matrix() const noexcept { return rho_; }
  Index dim() const noexcept { return rho_.rows(); }
  Complex expectation(const Operator& x) const;

  static DensityInvariants inspect(const Operator& rho);

 private:
  struct Unchecked {};
  DensityMatrix(Operator rho, Unchecked) : rho_(std::move(rho)) {}
  friend std::vector<DensityMatrix> lindblad_propagate(const ModelSpec&, const DensityMatrix&, const TimeGrid&);

  Operator rho_;
};

/// -i[H, rho] + sum_k (L_k rho L_k^* - 1/2 {L_k^* L_k, rho}).
Operator lindblad_rhs(const Coefficients& coeffs, const Operator& rho);
Operator lindblad_rhs(const ModelSpec& model, const DensityMatrix& rho, double t);

/// Number of RK4 substeps per grid interval so that substep * ||generator|| <= 0.05.
std::size_t lindblad_substeps(const ModelSpec& model, const TimeGrid& grid);

/// Classical RK4 over the grid, returning rho at every grid point. Invariants
/// are checked at each point; a violation throws IntegrationError with the
/// grid index.
std::vector<DensityMatrix> lindblad_propagate(const ModelSpec& model, const DensityMatrix& rho0,
                                              const TimeGrid& grid);

}  // namespace qsde
