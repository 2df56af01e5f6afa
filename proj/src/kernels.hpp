#pragma once

// In-place step kernels shared by the value-returning API and the trajectory
// drivers. Callers own the scratch vectors so the hot loop does not allocate.

#include <span>
#include <vector>

#include "qsde/model.hpp"

namespace qsde::detail {

/// lpsi[k] = L_k psi, resizing lpsi to the channel count.
void apply_couplings(const Coefficients& coeffs, const StateVector& psi, std::vector<StateVector>& lpsi);

/// lambda_k = 2 Re <psi|L_k psi> from precomputed L_k psi.
void lambdas_from(const StateVector& psi, const std::vector<StateVector>& lpsi, RealVector& lambdas);

/// c_k = <psi|R_k psi> from precomputed R_k psi.
void expectations_from(const StateVector& psi, const std::vector<StateVector>& lpsi, ComplexVector& c);

void belavkin_delta(const Coefficients& coeffs, const StateVector& psi, const std::vector<StateVector>& lpsi,
                    const RealVector& lambdas, std::span<const double> dI, double dt, StateVector& out);

void gisin_delta(const Coefficients& coeffs, const StateVector& psi, const std::vector<StateVector>& rpsi,
                 const ComplexVector& c, std::span<const Complex> dxi_star, double dt, StateVector& out);

void require_channels(std::size_t expected, std::size_t actual, const char* what);

}  // namespace qsde::detail
