#include "qsde/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kernels.hpp"

namespace qsde {

namespace {

constexpr double kZTol = 1e-12;

void check_sums(const CanonicalCoefficients& c) {
  if (c.norm_defect() > kZTol || c.square_sum_defect() > kZTol) {
    throw DomainError("canonical coefficients violate sum |z|^2 = 1 or sum z^2 = 0 (defects " +
                      std::to_string(c.norm_defect()) + ", " + std::to_string(c.square_sum_defect()) + ")");
  }
}

}  // namespace

double CanonicalCoefficients::norm_defect() const { return std::abs(z.squaredNorm() - 1.0); }

double CanonicalCoefficients::square_sum_defect() const {
  Complex s = 0.0;
  for (Index k = 0; k < z.size(); ++k) s += z[k] * z[k];
  return std::abs(s);
}

CanonicalCoefficients canonical_coefficients(int n, double phi, int sign) {
  if (n < 2) throw DomainError("canonical_coefficients: n must be at least 2, got " + std::to_string(n));
  if (sign != 1 && sign != -1) throw DomainError("canonical_coefficients: sign must be +1 or -1");
  CanonicalCoefficients c;
  c.n = n;
  c.phi = phi;
  c.z.resize(n);
  const Complex g = std::exp(kI * phi);
  if (n == 2) {
    c.z[0] = g / std::numbers::sqrt2;
    c.z[1] = static_cast<double>(sign) * kI * g / std::numbers::sqrt2;
  } else {
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k) c.z[k] = g * std::exp(kI * (std::numbers::pi * k / n)) * scale;
  }
  check_sums(c);
  return c;
}

CanonicalCoefficients canonical_coefficients_from(ComplexVector z, double phi) {
  if (z.size() < 2) throw DomainError("canonical_coefficients_from: need at least two coefficients");
  CanonicalCoefficients c;
  c.n = static_cast<int>(z.size());
  c.phi = phi;
  c.z = std::move(z);
  check_sums(c);
  return c;
}

ModelSpec build_canonical_model(const Operator& r, const Operator& h, const CanonicalCoefficients& z) {
  return build_canonical_model(constant_model({r}, h), z);
}

ModelSpec build_canonical_model(const ModelSpec& rh, const CanonicalCoefficients& z) {
  if (rh.n_channels() != 1) throw DimensionError("build_canonical_model: expected a single coupling R");
  check_sums(z);
  const TimeOperator& r = rh.couplings().front();
  std::vector<TimeOperator> ls;
  ls.reserve(static_cast<std::size_t>(z.n));
  for (Index k = 0; k < z.z.size(); ++k) {
    const Complex zk = z.z[k];
    if (r.is_constant()) {
      ls.emplace_back(Operator(zk * r.constant()));
    } else {
      ls.emplace_back(r.dim(), [r, zk](double t) { return Operator(zk * r(t)); });
    }
  }
  return ModelSpec(std::move(ls), rh.hamiltonian());
}

double phase_increment(Complex c, Complex dxi_star, const CanonicalCoefficients& z, std::span<const double> dI) {
  detail::require_channels(static_cast<std::size_t>(z.n), dI.size(), "phase_increment");
  const Complex w = c * dxi_star;
  // (1/2i)(w - conj(w)) = Im w
  const double via_xi = ((w - std::conj(w)) / (2.0 * kI)).real();
  double via_real = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < dI.size(); ++k) {
    via_real += (z.z[static_cast<Index>(k)] * c).imag() * dI[k];
    scale = std::max(scale, std::abs(dI[k]));
  }
  if (std::abs(via_xi - via_real) > 1e-12 * std::max(1.0, std::abs(c) * scale)) {
    throw Error("phase_increment: the two Theta formulas disagree (" + std::to_string(via_xi) + " vs " +
                std::to_string(via_real) + "); dxi^* is not sum z_k dI_k");
  }
  return via_real;
}

double CoupledRun::max_residual() const {
  return residual.empty() ? 0.0 : *std::max_element(residual.begin(), residual.end());
}

PhaseProcess CoupledRun::phase() const {
  PhaseProcess p;
  if (!theta.empty()) {
    p.theta = theta.back();
    p.quadratic_variation = quadratic_variation.back();
  }
  return p;
}

CoupledRun coupled_pair_run(const Operator& r, const Operator& h, const CanonicalCoefficients& z,
                            const RealNoisePath& path, const StateVector& psi0, const TimeGrid& grid) {
  return coupled_pair_run(constant_model({r}, h), z, path, psi0, grid);
}

CoupledRun coupled_pair_run(const ModelSpec& rh, const CanonicalCoefficients& z, const RealNoisePath& path,
                            const StateVector& psi0, const TimeGrid& grid) {
  detail::require_channels(static_cast<std::size_t>(z.n), path.n_channels(), "coupled_pair_run");
  if (path.n_steps() != grid.n_steps || std::abs(path.dt() - grid.dt) > 1e-12 * grid.dt) {
    throw DimensionError("coupled_pair_run: noise path does not match the time grid");
  }
  const ModelSpec canonical = build_canonical_model(rh, z);
  ComplexNoisePath dxi_star = canonical_noise_map(std::span<const Complex>(z.z.data(), z.z.size()), path);

  CoupledRun run{z,  belavkin_run(canonical, psi0, path, grid), gisin_run(rh, psi0, dxi_star, grid),
                 dxi_star, {}, {}, {}, {}, {}};

  PhaseProcess phase;
  run.theta.reserve(grid.n_points());
  run.quadratic_variation.reserve(grid.n_points());
  run.d_theta.reserve(grid.n_steps);
  run.residual.reserve(grid.n_points());
  run.infidelity.reserve(grid.n_points());

  auto compare = [&](std::size_t i) {
    const StateVector& psi = run.belavkin.states[i];
    const StateVector& psi_t = run.gisin.states[i];
    run.residual.push_back((psi - std::exp(kI * phase.theta) * psi_t).norm());
    run.infidelity.push_back(1.0 - std::abs(psi.dot(psi_t)));
    run.theta.push_back(phase.theta);
    run.quadratic_variation.push_back(phase.quadratic_variation);
  };
  compare(0);
  for (std::size_t m = 0; m < grid.n_steps; ++m) {
    const Complex c = run.gisin.c_values[m][0];
    const double dth = phase_increment(c, run.dxi_star(m, 0), z, path.step(m));
    run.d_theta.push_back(dth);
    phase.advance(dth);
    compare(m + 1);
  }
  return run;
}

double PhaseItoReport::qv_relative_error() const {
  if (expected_qv == 0.0) return realized_qv == 0.0 ? 0.0 : INFINITY;
  return std::abs(realized_qv - expected_qv) / expected_qv;
}

PhaseItoReport phase_ito_cross_check(const CoupledRun& run) {
  PhaseItoReport rep;
  const double dt = run.belavkin.grid.dt;
  Complex int_c = 0.0;
  double int_abs2 = 0.0;
  for (std::size_t m = 0; m < run.d_theta.size(); ++m) {
    const Complex dxs = run.dxi_star(m, 0);
    const double dth = run.d_theta[m];
    rep.sum_dtheta_dxi_star += dth * dxs;
    rep.sum_dtheta_dxi += dth * std::conj(dxs);
    rep.realized_qv += dth * dth;
    const Complex c = run.gisin.c_values[m][0];
    int_c += c * dt;
    int_abs2 += std::norm(c) * dt;
    rep.integral_abs_c += std::abs(c) * dt;
  }
  // dTheta dxi^* = -(1/2i) c^* dt and dTheta dxi = (1/2i) c dt.
  rep.expected_dtheta_dxi_star = -std::conj(int_c) / (2.0 * kI);
  rep.expected_dtheta_dxi = int_c / (2.0 * kI);
  rep.expected_qv = 0.5 * int_abs2;
  return rep;
}

}  // namespace qsde
