#pragma once

// (S, L, H) triples for cascaded open systems, the series product, Weyl
// displacement boxes and the centrally extended Euclidean group acting on
// triples. S is stored as an n x n grid of constant operators; couplings and
// Hamiltonian may depend on time and are composed lazily.

#include <functional>
#include <vector>

#include "qsde/model.hpp"

namespace qsde {

/// A triple evaluated at one instant.
struct SLHSnapshot {
  std::vector<Operator> s;  // row-major, n * n
  std::vector<Operator> l;
  Operator h;
};

class SLHTriple {
 public:
  /// Validates shapes, unitarity of S (1e-10) and hermiticity of constant H.
  SLHTriple(std::vector<Operator> s, std::vector<TimeOperator> l, TimeOperator h);

  /// (I, L, H).
  static SLHTriple unscattered(std::vector<TimeOperator> l, TimeOperator h);
  /// (I, 0, 0) on n channels.
  static SLHTriple identity(std::size_t n, Index dim);

  std::size_t n_channels() const noexcept { return l_.size(); }
  Index dim() const noexcept { return h_.dim(); }
  bool is_time_dependent() const;

  const Operator& s(std::size_t i, std::size_t j) const { return s_[i * n_channels() + j]; }
  const std::vector<Operator>& scattering() const noexcept { return s_; }
  const std::vector<TimeOperator>& couplings() const noexcept { return l_; }
  const TimeOperator& hamiltonian() const noexcept { return h_; }

  SLHSnapshot at(double t) const;

  /// Max over entries of ||S^dagger S - I|| at time t (S is constant).
  double unitarity_error() const;

 private:
  std::vector<Operator> s_;
  std::vector<TimeOperator> l_;
  TimeOperator h_;
};

/// G2 <| G1 = (S2 S1, L2 + S2 L1, H1 + H2 + Im{L2^dagger S2 L1}).
SLHTriple series_product(const SLHTriple& g2, const SLHTriple& g1);

using ScalarVectorFunction = std::function<ComplexVector(double)>;

/// (I_n, beta(t), 0) on a dim-dimensional system.
SLHTriple weyl_box(ScalarVectorFunction beta, std::size_t n, Index dim);
SLHTriple weyl_box(const ComplexVector& beta, Index dim);

/// (U, beta(t), epsilon): rotation, displacement and energy offset.
struct EuclideanElement {
  Operator u;
  ScalarVectorFunction beta;
  double epsilon = 0.0;

  /// Throws DomainError unless U is unitary within 1e-12.
  EuclideanElement(Operator u, ScalarVectorFunction beta, double epsilon);
  EuclideanElement(Operator u, const ComplexVector& beta, double epsilon);

  static EuclideanElement rotation(Operator u);
  static EuclideanElement translation(const ComplexVector& beta, double epsilon = 0.0);

  std::size_t n_channels() const noexcept { return static_cast<std::size_t>(u.rows()); }
  /// The element as the triple (U, beta, epsilon I).
  SLHTriple as_triple(Index dim) const;
};

/// E <| G = (U S, beta + U L, H + epsilon + Im{beta^dagger U L}).
SLHTriple euclidean_apply(const EuclideanElement& e, const SLHTriple& g);

/// Drops S and returns (L, H) for the integrators and the generator.
ModelSpec to_model(const SLHTriple& g);

}  // namespace qsde
