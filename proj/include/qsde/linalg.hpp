#pragma once

// Dense complex linear algebra shared by every module. Operators and states
// are plain Eigen objects; the functions below add the dimension checks and
// the few quantum-specific helpers the integrators need.

#include <complex>
#include <span>

#include <Eigen/Dense>

#include "qsde/errors.hpp"

namespace qsde {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Absolute max-entry tolerance for self-adjointness checks.
inline constexpr double kHermitianTol = 1e-10;
/// Smallest admissible norm before renormalizing a state.
inline constexpr double kZeroNormGuard = 1e-12;

StateVector apply(const Operator& op, const StateVector& psi);

/// <psi|X psi>. Real up to rounding when X is hermitian and psi normalized.
Complex expectation(const StateVector& psi, const Operator& op);

double max_abs(const Operator& op);
bool is_hermitian(const Operator& op, double tol = kHermitianTol);
bool is_unitary(const Operator& op, double tol);

Operator commutator(const Operator& a, const Operator& b);

/// Im{A} = (A - A^dagger) / 2i, the hermitian "imaginary part" of an operator.
Operator im_part(const Operator& a);

/// Throws DomainError when the norm is below the guard.
StateVector normalized(const StateVector& psi, double guard = kZeroNormGuard);

/// min over real phases theta of ||a - e^{i theta} b|| for unit vectors.
double phase_insensitive_distance(const StateVector& a, const StateVector& b);

void require_same_dim(Index expected, Index actual, const char* what);

namespace qubit {

// Basis ordering {|g>, |e>}: index 0 is the ground state.
StateVector ground();
StateVector excited();
StateVector plus();
Operator sigma_minus();  // |g><e|
Operator sigma_plus();
Operator sigma_x();
Operator sigma_y();
Operator sigma_z();  // diag(-1, +1)

}  // namespace qubit

namespace fock {

Operator annihilation(Index levels);
Operator number(Index levels);
StateVector basis(Index levels, Index n);

}  // namespace fock

}  // namespace qsde
