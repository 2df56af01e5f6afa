#include "qsde/slh.hpp"

#include <string>

namespace qsde {

namespace {

bool all_constant(const std::vector<TimeOperator>& ops) {
  for (const auto& op : ops) {
    if (!op.is_constant()) return false;
  }
  return true;
}

std::vector<Operator> eval(const std::vector<TimeOperator>& ops, double t) {
  std::vector<Operator> out;
  out.reserve(ops.size());
  for (const auto& op : ops) out.push_back(op(t));
  return out;
}

SLHSnapshot series_snapshot(const SLHSnapshot& a, const SLHSnapshot& b, std::size_t n) {
  // a = G2, b = G1
  const Index dim = a.h.rows();
  SLHSnapshot out;
  out.s.assign(n * n, Operator::Zero(dim, dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) out.s[i * n + j] += a.s[i * n + k] * b.s[k * n + j];
    }
  }
  std::vector<Operator> s2l1(n, Operator::Zero(dim, dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) s2l1[i] += a.s[i * n + k] * b.l[k];
  }
  out.l.reserve(n);
  Operator cross = Operator::Zero(dim, dim);
  for (std::size_t i = 0; i < n; ++i) {
    out.l.push_back(a.l[i] + s2l1[i]);
    cross += a.l[i].adjoint() * s2l1[i];
  }
  out.h = a.h + b.h + im_part(cross);
  return out;
}

SLHTriple from_snapshot_fn(std::size_t n, Index dim, const std::vector<Operator>& s,
                           std::function<SLHSnapshot(double)> fn) {
  std::vector<TimeOperator> l;
  l.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    l.emplace_back(dim, [fn, k](double t) { return fn(t).l[k]; });
  }
  TimeOperator h(dim, [fn](double t) { return fn(t).h; });
  return SLHTriple(s, std::move(l), std::move(h));
}

SLHTriple from_snapshot(SLHSnapshot snap) {
  std::vector<TimeOperator> l(snap.l.begin(), snap.l.end());
  return SLHTriple(std::move(snap.s), std::move(l), TimeOperator(std::move(snap.h)));
}

std::vector<Operator> identity_scattering(std::size_t n, Index dim) {
  std::vector<Operator> s(n * n, Operator::Zero(dim, dim));
  for (std::size_t k = 0; k < n; ++k) s[k * n + k] = Operator::Identity(dim, dim);
  return s;
}

}  // namespace

SLHTriple::SLHTriple(std::vector<Operator> s, std::vector<TimeOperator> l, TimeOperator h)
    : s_(std::move(s)), l_(std::move(l)), h_(std::move(h)) {
  const std::size_t n = l_.size();
  if (n == 0) throw DimensionError("SLHTriple: need at least one channel");
  if (s_.size() != n * n) throw DimensionError("SLHTriple: S must be n x n for n = " + std::to_string(n));
  const Index d = h_.dim();
  for (const auto& e : s_) {
    if (e.rows() != d || e.cols() != d) throw DimensionError("SLHTriple: scattering entry has the wrong dimension");
  }
  for (const auto& op : l_) require_same_dim(d, op.dim(), "SLHTriple coupling");
  if (h_.is_constant() && !is_hermitian(h_.constant())) throw DomainError("SLHTriple: H is not hermitian");
  if (unitarity_error() > 1e-10) throw DomainError("SLHTriple: S is not unitary");
}

SLHTriple SLHTriple::unscattered(std::vector<TimeOperator> l, TimeOperator h) {
  const std::size_t n = l.size();
  const Index d = h.dim();
  return SLHTriple(identity_scattering(n, d), std::move(l), std::move(h));
}

SLHTriple SLHTriple::identity(std::size_t n, Index dim) {
  std::vector<TimeOperator> l(n, TimeOperator(Operator::Zero(dim, dim)));
  return unscattered(std::move(l), TimeOperator(Operator::Zero(dim, dim)));
}

bool SLHTriple::is_time_dependent() const { return !all_constant(l_) || !h_.is_constant(); }

SLHSnapshot SLHTriple::at(double t) const {
  SLHSnapshot snap{s_, eval(l_, t), h_(t)};
  if (!is_hermitian(snap.h)) throw DomainError("SLHTriple: H(t) is not hermitian at t = " + std::to_string(t));
  return snap;
}

double SLHTriple::unitarity_error() const {
  const std::size_t n = n_channels();
  const Index d = dim();
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Operator acc = Operator::Zero(d, d);
      for (std::size_t k = 0; k < n; ++k) acc += s(k, i).adjoint() * s(k, j);
      if (i == j) acc -= Operator::Identity(d, d);
      err = std::max(err, max_abs(acc));
    }
  }
  return err;
}

SLHTriple series_product(const SLHTriple& g2, const SLHTriple& g1) {
  const std::size_t n = g1.n_channels();
  if (g2.n_channels() != n) throw DimensionError("series_product: channel counts differ");
  require_same_dim(g1.dim(), g2.dim(), "series_product");
  if (!g1.is_time_dependent() && !g2.is_time_dependent()) {
    return from_snapshot(series_snapshot(g2.at(0.0), g1.at(0.0), n));
  }
  auto fn = [g2, g1, n](double t) { return series_snapshot(g2.at(t), g1.at(t), n); };
  const SLHSnapshot s0 = fn(0.0);
  return from_snapshot_fn(n, g1.dim(), s0.s, std::move(fn));
}

SLHTriple weyl_box(ScalarVectorFunction beta, std::size_t n, Index dim) {
  std::vector<TimeOperator> l;
  l.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    l.emplace_back(dim, [beta, k, dim](double t) -> Operator {
      const ComplexVector b = beta(t);
      if (static_cast<std::size_t>(b.size()) <= k) throw DimensionError("weyl_box: beta(t) has too few entries");
      return b[static_cast<Index>(k)] * Operator::Identity(dim, dim);
    });
  }
  return SLHTriple::unscattered(std::move(l), TimeOperator(Operator::Zero(dim, dim)));
}

SLHTriple weyl_box(const ComplexVector& beta, Index dim) {
  std::vector<TimeOperator> l;
  l.reserve(static_cast<std::size_t>(beta.size()));
  for (Index k = 0; k < beta.size(); ++k) l.emplace_back(Operator(beta[k] * Operator::Identity(dim, dim)));
  return SLHTriple::unscattered(std::move(l), TimeOperator(Operator::Zero(dim, dim)));
}

EuclideanElement::EuclideanElement(Operator u_, ScalarVectorFunction beta_, double epsilon_)
    : u(std::move(u_)), beta(std::move(beta_)), epsilon(epsilon_) {
  if (u.rows() != u.cols() || u.rows() == 0) throw DimensionError("EuclideanElement: U must be square");
  if (!is_unitary(u, 1e-12)) throw DomainError("EuclideanElement: U is not unitary within 1e-12");
  if (!beta) throw DomainError("EuclideanElement: beta is empty");
}

EuclideanElement::EuclideanElement(Operator u_, const ComplexVector& beta_, double epsilon_)
    : EuclideanElement(std::move(u_), [beta_](double) { return beta_; }, epsilon_) {
  if (beta_.size() != u.rows()) throw DimensionError("EuclideanElement: beta must have one entry per channel");
}

EuclideanElement EuclideanElement::rotation(Operator u) {
  const Index n = u.rows();
  return EuclideanElement(std::move(u), ComplexVector(ComplexVector::Zero(n)), 0.0);
}

EuclideanElement EuclideanElement::translation(const ComplexVector& beta, double epsilon) {
  const Index n = beta.size();
  return EuclideanElement(Operator::Identity(n, n), beta, epsilon);
}

SLHTriple EuclideanElement::as_triple(Index dim) const {
  const std::size_t n = n_channels();
  std::vector<Operator> s(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      s[i * n + j] = u(static_cast<Index>(i), static_cast<Index>(j)) * Operator::Identity(dim, dim);
    }
  }
  SLHTriple w = weyl_box(beta, n, dim);
  std::vector<TimeOperator> l = w.couplings();
  return SLHTriple(std::move(s), std::move(l), TimeOperator(Operator(epsilon * Operator::Identity(dim, dim))));
}

SLHTriple euclidean_apply(const EuclideanElement& e, const SLHTriple& g) {
  if (e.n_channels() != g.n_channels()) throw DimensionError("euclidean_apply: channel counts differ");
  return series_product(e.as_triple(g.dim()), g);
}

ModelSpec to_model(const SLHTriple& g) { return ModelSpec(g.couplings(), g.hamiltonian()); }

}  // namespace qsde
