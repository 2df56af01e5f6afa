#include "kernels.hpp"

#include <string>

namespace qsde::detail {

void require_channels(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    throw DimensionError(std::string(what) + ": got " + std::to_string(actual) + " noise channels, model has " +
                         std::to_string(expected));
  }
}

void apply_couplings(const Coefficients& coeffs, const StateVector& psi, std::vector<StateVector>& lpsi) {
  require_same_dim(coeffs.dim(), psi.size(), "apply_couplings");
  lpsi.resize(coeffs.n_channels());
  for (std::size_t k = 0; k < coeffs.n_channels(); ++k) lpsi[k].noalias() = coeffs.couplings[k] * psi;
}

void lambdas_from(const StateVector& psi, const std::vector<StateVector>& lpsi, RealVector& lambdas) {
  lambdas.resize(static_cast<Index>(lpsi.size()));
  for (std::size_t k = 0; k < lpsi.size(); ++k) lambdas[static_cast<Index>(k)] = 2.0 * psi.dot(lpsi[k]).real();
}

void expectations_from(const StateVector& psi, const std::vector<StateVector>& lpsi, ComplexVector& c) {
  c.resize(static_cast<Index>(lpsi.size()));
  for (std::size_t k = 0; k < lpsi.size(); ++k) c[static_cast<Index>(k)] = psi.dot(lpsi[k]);
}

void belavkin_delta(const Coefficients& coeffs, const StateVector& psi, const std::vector<StateVector>& lpsi,
                    const RealVector& lambdas, std::span<const double> dI, double dt, StateVector& out) {
  require_channels(coeffs.n_channels(), dI.size(), "belavkin increment");
  out.noalias() = coeffs.drift * psi;
  out *= dt;
  double scalar = 0.0;
  for (std::size_t k = 0; k < lpsi.size(); ++k) {
    const double lam = lambdas[static_cast<Index>(k)];
    out += (0.5 * lam * dt + dI[k]) * lpsi[k];
    scalar += 0.125 * lam * lam * dt + 0.5 * lam * dI[k];
  }
  out -= scalar * psi;
}

void gisin_delta(const Coefficients& coeffs, const StateVector& psi, const std::vector<StateVector>& rpsi,
                 const ComplexVector& c, std::span<const Complex> dxi_star, double dt, StateVector& out) {
  require_channels(coeffs.n_channels(), dxi_star.size(), "gisin increment");
  out.noalias() = coeffs.drift * psi;
  out *= dt;
  Complex scalar = 0.0;
  for (std::size_t k = 0; k < rpsi.size(); ++k) {
    const Complex ck = c[static_cast<Index>(k)];
    out += (std::conj(ck) * dt + dxi_star[k]) * rpsi[k];
    scalar += 0.5 * std::norm(ck) * dt + ck * dxi_star[k];
  }
  out -= scalar * psi;
}

}  // namespace qsde::detail
