#include "oracles.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace qsde::testing {

Operator random_operator(Index dim, Rng& rng, double scale) {
  Operator a(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) a(i, j) = scale * rng.complex_normal();
  return a;
}

Operator random_hermitian(Index dim, Rng& rng, double scale) {
  const Operator a = random_operator(dim, rng, scale);
  return (a + a.adjoint()) / 2.0;
}

Operator random_unitary(Index dim, Rng& rng) {
  Eigen::HouseholderQR<Operator> qr(random_operator(dim, rng));
  Operator q = qr.householderQ();
  const Operator r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < dim; ++k) q.col(k) *= std::polar(1.0, std::arg(r(k, k)));
  return q;
}

StateVector random_state(Index dim, Rng& rng) {
  StateVector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = rng.complex_normal();
  return v / v.norm();
}

Operator random_density(Index dim, Rng& rng) {
  const Operator a = random_operator(dim, rng);
  const Operator rho = a * a.adjoint();
  return rho / rho.trace();
}

ComplexVector random_vector(Index n, Rng& rng, double scale) {
  ComplexVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = scale * rng.complex_normal();
  return v;
}

Eigen::MatrixXcd lindblad_superoperator(const Coefficients& coeffs) {
  const Index d = coeffs.dim();
  const Operator id = Operator::Identity(d, d);
  // vec(A X B) = (B^T kron A) vec(X)
  Eigen::MatrixXcd s = -kI * (Eigen::kroneckerProduct(id, coeffs.hamiltonian).eval() -
                              Eigen::kroneckerProduct(coeffs.hamiltonian.transpose(), id).eval());
  for (const auto& l : coeffs.couplings) {
    const Operator ldl = l.adjoint() * l;
    s += Eigen::kroneckerProduct(l.conjugate(), l).eval();
    s -= 0.5 * Eigen::kroneckerProduct(id, ldl).eval();
    s -= 0.5 * Eigen::kroneckerProduct(ldl.transpose(), id).eval();
  }
  return s;
}

Operator lindblad_exact(const Coefficients& coeffs, const Operator& rho0, double t) {
  const Index d = coeffs.dim();
  const Eigen::MatrixXcd prop = (lindblad_superoperator(coeffs) * t).exp();
  const Eigen::VectorXcd v = prop * Eigen::Map<const Eigen::VectorXcd>(rho0.data(), d * d);
  return Eigen::Map<const Operator>(v.data(), d, d);
}

double max_diff(const Operator& a, const Operator& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace qsde::testing
