#include "qsde/model.hpp"

#include <string>
#include <utility>

namespace qsde {

TimeOperator::TimeOperator(Operator constant) : dim_(constant.rows()), constant_(std::move(constant)) {
  if (constant_.rows() != constant_.cols()) throw DimensionError("TimeOperator: operator is not square");
}

TimeOperator::TimeOperator(Index dim, Function fn) : dim_(dim), fn_(std::move(fn)) {
  if (dim <= 0) throw DomainError("TimeOperator: dimension must be positive");
  if (!fn_) throw DomainError("TimeOperator: empty function");
}

Operator TimeOperator::operator()(double t) const {
  if (!fn_) return constant_;
  Operator value = fn_(t);
  if (value.rows() != dim_ || value.cols() != dim_) {
    throw DimensionError("TimeOperator: callback returned a " + std::to_string(value.rows()) + "x" +
                         std::to_string(value.cols()) + " operator, expected dimension " +
                         std::to_string(dim_));
  }
  return value;
}

const Operator& TimeOperator::constant() const {
  if (fn_) throw DomainError("TimeOperator::constant called on a time-dependent operator");
  return constant_;
}

Coefficients make_coefficients(std::vector<Operator> couplings, Operator hamiltonian, double time) {
  Coefficients c;
  c.time = time;
  c.drift = -kI * hamiltonian;
  for (const auto& l : couplings) {
    require_same_dim(hamiltonian.rows(), l.rows(), "make_coefficients");
    c.drift.noalias() -= 0.5 * l.adjoint() * l;
  }
  c.couplings = std::move(couplings);
  c.hamiltonian = std::move(hamiltonian);
  return c;
}

ModelSpec::ModelSpec(std::vector<TimeOperator> couplings, TimeOperator hamiltonian)
    : couplings_(std::move(couplings)), hamiltonian_(std::move(hamiltonian)) {
  if (hamiltonian_.dim() <= 0) throw DomainError("ModelSpec: hamiltonian has no dimension");
  if (couplings_.empty()) throw DomainError("ModelSpec: at least one coupling channel is required");
  time_dependent_ = !hamiltonian_.is_constant();
  for (const auto& l : couplings_) {
    require_same_dim(hamiltonian_.dim(), l.dim(), "ModelSpec coupling");
    time_dependent_ = time_dependent_ || !l.is_constant();
  }
  if (hamiltonian_.is_constant() && !is_hermitian(hamiltonian_.constant())) {
    throw DomainError("ModelSpec: hamiltonian is not hermitian");
  }
}

Coefficients ModelSpec::at(double t) const {
  std::vector<Operator> ls;
  ls.reserve(couplings_.size());
  for (const auto& l : couplings_) ls.push_back(l(t));
  Operator h = hamiltonian_(t);
  if (!hamiltonian_.is_constant() && !is_hermitian(h)) {
    throw DomainError("ModelSpec: hamiltonian is not hermitian at t = " + std::to_string(t));
  }
  return make_coefficients(std::move(ls), std::move(h), t);
}

ModelSpec constant_model(std::vector<Operator> couplings, Operator hamiltonian) {
  std::vector<TimeOperator> ls(couplings.begin(), couplings.end());
  return ModelSpec(std::move(ls), TimeOperator(std::move(hamiltonian)));
}

Operator gks_lindblad_apply(const Coefficients& coeffs, const Operator& x) {
  require_same_dim(coeffs.dim(), x.rows(), "gks_lindblad_apply");
  if (x.rows() != x.cols()) throw DimensionError("gks_lindblad_apply: X is not square");
  Operator out = -kI * commutator(x, coeffs.hamiltonian);
  for (const auto& l : coeffs.couplings) {
    const Operator ld = l.adjoint();
    out += 0.5 * (commutator(ld, x) * l + ld * commutator(x, l));
  }
  return out;
}

Operator gks_lindblad_apply(const ModelSpec& model, const Operator& x, double t) {
  return gks_lindblad_apply(model.at(t), x);
}

}  // namespace qsde
