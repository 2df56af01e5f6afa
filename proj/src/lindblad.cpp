#include "qsde/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace qsde {

DensityMatrix::DensityMatrix(Operator rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) throw DimensionError("DensityMatrix: not a square matrix");
  const auto inv = inspect(rho_);
  if (!inv.ok()) {
    throw DomainError("DensityMatrix: invariants violated (hermiticity " + std::to_string(inv.hermiticity_error) +
                      ", trace " + std::to_string(inv.trace_error) + ", min eigenvalue " +
                      std::to_string(inv.min_eigenvalue) + ")");
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const StateVector n = normalized(psi);
  return DensityMatrix(n * n.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(Operator::Identity(dim, dim) / static_cast<double>(dim));
}

Complex DensityMatrix::expectation(const Operator& x) const {
  require_same_dim(dim(), x.rows(), "DensityMatrix::expectation");
  return (x * rho_).trace();
}

DensityInvariants DensityMatrix::inspect(const Operator& rho) {
  DensityInvariants inv;
  inv.hermiticity_error = max_abs(rho - rho.adjoint());
  inv.trace_error = std::abs(rho.trace() - 1.0);
  const Operator herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> solver(herm, Eigen::EigenvaluesOnly);
  inv.min_eigenvalue = solver.eigenvalues().minCoeff();
  return inv;
}

Operator lindblad_rhs(const Coefficients& coeffs, const Operator& rho) {
  require_same_dim(coeffs.dim(), rho.rows(), "lindblad_rhs");
  // drift = -iH - 1/2 sum L^*L, so drift rho + rho drift^* covers the
  // commutator and anticommutator terms together.
  Operator out = coeffs.drift * rho + rho * coeffs.drift.adjoint();
  for (const auto& l : coeffs.couplings) out.noalias() += l * rho * l.adjoint();
  return out;
}

Operator lindblad_rhs(const ModelSpec& model, const DensityMatrix& rho, double t) {
  return lindblad_rhs(model.at(t), rho.matrix());
}

namespace {

double generator_norm_bound(const Coefficients& c) {
  double bound = 2.0 * c.hamiltonian.norm();
  for (const auto& l : c.couplings) bound += 2.0 * l.squaredNorm();
  return bound;
}

}  // namespace

std::size_t lindblad_substeps(const ModelSpec& model, const TimeGrid& grid) {
  double bound = generator_norm_bound(model.at(grid.t0));
  if (model.is_time_dependent()) {
    bound = std::max(bound, generator_norm_bound(model.at(0.5 * (grid.t0 + grid.t_end()))));
    bound = std::max(bound, generator_norm_bound(model.at(grid.t_end())));
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(grid.dt * bound / 0.05)));
}

std::vector<DensityMatrix> lindblad_propagate(const ModelSpec& model, const DensityMatrix& rho0,
                                              const TimeGrid& grid) {
  require_same_dim(model.dim(), rho0.dim(), "lindblad_propagate");
  const std::size_t sub = lindblad_substeps(model, grid);
  const double h = grid.dt / static_cast<double>(sub);

  std::vector<DensityMatrix> out;
  out.reserve(grid.n_points());
  out.push_back(rho0);

  const bool td = model.is_time_dependent();
  const Coefficients fixed = model.at(grid.t0);

  Operator rho = rho0.matrix();
  for (std::size_t m = 0; m < grid.n_steps; ++m) {
    for (std::size_t s = 0; s < sub; ++s) {
      const double t = grid.time(m) + static_cast<double>(s) * h;
      Operator k1, k2, k3, k4;
      if (td) {
        const Coefficients c0 = model.at(t);
        const Coefficients c_half = model.at(t + 0.5 * h);
        const Coefficients c1 = model.at(t + h);
        k1 = lindblad_rhs(c0, rho);
        k2 = lindblad_rhs(c_half, rho + 0.5 * h * k1);
        k3 = lindblad_rhs(c_half, rho + 0.5 * h * k2);
        k4 = lindblad_rhs(c1, rho + h * k3);
      } else {
        k1 = lindblad_rhs(fixed, rho);
        k2 = lindblad_rhs(fixed, rho + 0.5 * h * k1);
        k3 = lindblad_rhs(fixed, rho + 0.5 * h * k2);
        k4 = lindblad_rhs(fixed, rho + h * k3);
      }
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const auto inv = DensityMatrix::inspect(rho);
    if (!inv.ok()) {
      throw IntegrationError("lindblad_propagate: density-matrix invariants violated (min eigenvalue " +
                                 std::to_string(inv.min_eigenvalue) + ", trace error " +
                                 std::to_string(inv.trace_error) + ")",
                             m + 1);
    }
    out.push_back(DensityMatrix(rho, DensityMatrix::Unchecked{}));
  }
  return out;
}

}  // namespace qsde
