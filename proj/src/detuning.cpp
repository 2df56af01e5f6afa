#include "qsde/detuning.hpp"

#include <algorithm>
#include <cmath>

#include "kernels.hpp"

namespace qsde {

ComplexNoisePath rotating_frame_noise(double phi, double omega, const RealNoisePath& path, const TimeGrid& grid) {
  detail::require_channels(1, path.n_channels(), "rotating_frame_noise");
  if (path.n_steps() != grid.n_steps) throw DimensionError("rotating_frame_noise: path does not match grid");
  std::vector<Complex> xs(grid.n_steps);
  for (std::size_t m = 0; m < grid.n_steps; ++m) xs[m] = std::exp(kI * (omega * grid.time(m) - phi)) * path(m, 0);
  return ComplexNoisePath(1, path.dt(), std::move(xs), ComplexConvention::XiConjugate, path.seed());
}

StateVector rotating_wave_step(const Operator& r, const Operator& h, const StateVector& chi, Complex dxi_star,
                               double dt) {
  require_same_dim(r.rows(), chi.size(), "rotating_wave_step");
  require_same_dim(r.rows(), h.rows(), "rotating_wave_step");
  const Complex c = expectation(chi, r) / chi.squaredNorm();
  const StateVector rchi = r * chi;
  return chi + dt * (-kI * (h * chi) - 0.5 * (r.adjoint() * rchi)) + (dxi_star + std::conj(c) * dt) * rchi;
}

DetuningComparison detuning_comparison(double gamma, double phi, double omega, const Operator& a,
                                       const Operator& h, const RealNoisePath& path, const StateVector& psi0,
                                       const TimeGrid& grid) {
  const ModelSpec model = detuned_coupling(gamma, phi, omega, a, h);
  if (path.n_steps() != grid.n_steps || std::abs(path.dt() - grid.dt) > 1e-12 * grid.dt) {
    throw DimensionError("detuning_comparison: noise path does not match the time grid");
  }
  const ComplexNoisePath xs = rotating_frame_noise(phi, omega, path, grid);
  const Operator r = std::sqrt(gamma) * a;

  DetuningComparison out;
  out.omega = omega;
  StateVector x = normalized(psi0);
  StateVector y = x;
  auto record = [&] {
    out.filter.push_back(x);
    out.limit.push_back(y);
    out.distance.push_back(phase_insensitive_distance(x, y));
    out.max_distance = std::max(out.max_distance, out.distance.back());
  };
  record();
  for (std::size_t m = 0; m < grid.n_steps; ++m) {
    const double t = grid.time(m);
    const Coefficients c = model.at(t);
    const double dY = path(m, 0) + 2.0 * expectation(x, c.couplings[0]).real() * grid.dt;
    StateVector xn = zakai_step(model, x, std::span<const double>(&dY, 1), grid.dt, t);
    StateVector yn = rotating_wave_step(r, h, y, xs(m, 0), grid.dt);
    const double nx = xn.norm(), ny = yn.norm();
    if (!(nx >= kZeroNormGuard) || !(ny >= kZeroNormGuard)) {
      throw IntegrationError("detuning_comparison: state norm collapsed below 1e-12", m);
    }
    x = xn / nx;
    y = yn / ny;
    record();
  }
  return out;
}

}  // namespace qsde
