#pragma once

#include <functional>
#include <vector>

#include "qsde/linalg.hpp"

namespace qsde {

/// An operator-valued function of time. Constant operators are stored
/// directly so integrators can evaluate them once per run.
class TimeOperator {
 public:
  using Function = std::function<Operator(double)>;

  TimeOperator() = default;
  TimeOperator(Operator constant);  // NOLINT(google-explicit-constructor)
  TimeOperator(Index dim, Function fn);

  Operator operator()(double t) const;

  bool is_constant() const noexcept { return !fn_; }
  Index dim() const noexcept { return dim_; }

  /// Only valid when is_constant().
  const Operator& constant() const;

 private:
  Index dim_ = 0;
  Operator constant_;
  Function fn_;
};

/// A model frozen at one instant: couplings, Hamiltonian and the
/// deterministic part -iH - 1/2 sum_k L_k^* L_k that every scheme shares.
struct Coefficients {
  std::vector<Operator> couplings;
  Operator hamiltonian;
  Operator drift;
  double time = 0.0;

  Index dim() const noexcept { return hamiltonian.rows(); }
  std::size_t n_channels() const noexcept { return couplings.size(); }
};

Coefficients make_coefficients(std::vector<Operator> couplings, Operator hamiltonian,
                               double time = 0.0);

/// Coupling operators plus Hamiltonian, either of which may depend on time.
/// Used both as (L, H) for the filtering equation and as (R, H) for state
/// diffusion.
class ModelSpec {
 public:
  ModelSpec(std::vector<TimeOperator> couplings, TimeOperator hamiltonian);

  Index dim() const noexcept { return hamiltonian_.dim(); }
  std::size_t n_channels() const noexcept { return couplings_.size(); }
  bool is_time_dependent() const noexcept { return time_dependent_; }

  const std::vector<TimeOperator>& couplings() const noexcept { return couplings_; }
  const TimeOperator& hamiltonian() const noexcept { return hamiltonian_; }

  /// Evaluates the model at t. Throws DomainError if H(t) is not hermitian.
  Coefficients at(double t) const;

 private:
  std::vector<TimeOperator> couplings_;
  TimeOperator hamiltonian_;
  bool time_dependent_ = false;
};

/// Convenience for the common time-independent case.
ModelSpec constant_model(std::vector<Operator> couplings, Operator hamiltonian);

/// Heisenberg-picture GKS-Lindblad generator applied to X:
/// 1/2 sum_k ([L_k^*, X] L_k + L_k^* [X, L_k]) - i [X, H].
Operator gks_lindblad_apply(const Coefficients& coeffs, const Operator& x);
Operator gks_lindblad_apply(const ModelSpec& model, const Operator& x, double t);

}  // namespace qsde
