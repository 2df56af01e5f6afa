#pragma once

// Test-only oracles and random inputs. The randomness here is independent of
// the library's noise recipe so that property tests do not share its bugs.

#include <cstdint>
#include <random>

#include "qsde/model.hpp"

namespace qsde::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  Complex complex_normal() { return {normal(), normal()}; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

Operator random_operator(Index dim, Rng& rng, double scale = 1.0);
Operator random_hermitian(Index dim, Rng& rng, double scale = 1.0);
Operator random_unitary(Index dim, Rng& rng);
StateVector random_state(Index dim, Rng& rng);
Operator random_density(Index dim, Rng& rng);
ComplexVector random_vector(Index n, Rng& rng, double scale = 1.0);

/// Column-stacked Lindblad superoperator: vec(drho/dt) = S vec(rho).
Eigen::MatrixXcd lindblad_superoperator(const Coefficients& coeffs);

/// rho(t) = unvec(exp(S t) vec(rho0)) for a time-independent model.
Operator lindblad_exact(const Coefficients& coeffs, const Operator& rho0, double t);

/// ||a - b|| in the max-entry norm.
double max_diff(const Operator& a, const Operator& b);

}  // namespace qsde::testing
