#include "qsde/linalg.hpp"

#include <cmath>
#include <string>

namespace qsde {

void require_same_dim(Index expected, Index actual, const char* what) {
  if (expected != actual) {
    throw DimensionError(std::string(what) + ": dimension " + std::to_string(actual) +
                         " does not match " + std::to_string(expected));
  }
}

StateVector apply(const Operator& op, const StateVector& psi) {
  if (op.rows() != op.cols()) throw DimensionError("apply: operator is not square");
  require_same_dim(op.cols(), psi.size(), "apply");
  return op * psi;
}

Complex expectation(const StateVector& psi, const Operator& op) {
  if (op.rows() != op.cols()) throw DimensionError("expectation: operator is not square");
  require_same_dim(op.cols(), psi.size(), "expectation");
  return psi.dot(op * psi);
}

double max_abs(const Operator& op) {
  return op.size() == 0 ? 0.0 : op.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Operator& op, double tol) {
  if (op.rows() != op.cols()) return false;
  return max_abs(op - op.adjoint()) <= tol;
}

bool is_unitary(const Operator& op, double tol) {
  if (op.rows() != op.cols()) return false;
  const Operator id = Operator::Identity(op.rows(), op.cols());
  return max_abs(op.adjoint() * op - id) <= tol && max_abs(op * op.adjoint() - id) <= tol;
}

Operator commutator(const Operator& a, const Operator& b) {
  require_same_dim(a.rows(), b.rows(), "commutator");
  return a * b - b * a;
}

Operator im_part(const Operator& a) { return (a - a.adjoint()) / (2.0 * kI); }

StateVector normalized(const StateVector& psi, double guard) {
  const double n = psi.norm();
  if (!(n >= guard)) {
    throw DomainError("normalized: state norm " + std::to_string(n) + " below guard");
  }
  return psi / n;
}

double phase_insensitive_distance(const StateVector& a, const StateVector& b) {
  require_same_dim(a.size(), b.size(), "phase_insensitive_distance");
  // ||a - e^{i t} b||^2 = |a|^2 + |b|^2 - 2 Re(e^{i t} <a|b>), minimized at |<a|b>|.
  const double d2 = a.squaredNorm() + b.squaredNorm() - 2.0 * std::abs(a.dot(b));
  return std::sqrt(std::max(d2, 0.0));
}

namespace qubit {

StateVector ground() { return StateVector::Unit(2, 0); }
StateVector excited() { return StateVector::Unit(2, 1); }
StateVector plus() { return (ground() + excited()) / std::sqrt(2.0); }

Operator sigma_minus() {
  Operator m = Operator::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

Operator sigma_plus() { return sigma_minus().adjoint(); }

Operator sigma_x() { return sigma_minus() + sigma_plus(); }

Operator sigma_y() { return kI * (sigma_minus() - sigma_plus()); }

Operator sigma_z() {
  Operator m = Operator::Zero(2, 2);
  m(0, 0) = -1.0;
  m(1, 1) = 1.0;
  return m;
}

}  // namespace qubit

namespace fock {

Operator annihilation(Index levels) {
  if (levels < 1) throw DomainError("fock::annihilation: levels must be positive");
  Operator a = Operator::Zero(levels, levels);
  for (Index n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Operator number(Index levels) {
  const Operator a = annihilation(levels);
  return a.adjoint() * a;
}

StateVector basis(Index levels, Index n) {
  if (n < 0 || n >= levels) throw DomainError("fock::basis: level out of range");
  return StateVector::Unit(levels, n);
}

}  // namespace fock

}  // namespace qsde
