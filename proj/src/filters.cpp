#include "qsde/filters.hpp"

#include <algorithm>
#include <cmath>

#include "kernels.hpp"

namespace qsde {

namespace {

FilterSeries series_of(const std::vector<StateVector>& states, const TimeGrid& grid, const Operator& x) {
  FilterSeries s{x, grid, {}};
  s.values.reserve(states.size());
  for (const auto& psi : states) {
    require_same_dim(x.rows(), psi.size(), "filter series");
    s.values.push_back(expectation(psi, x));
  }
  return s;
}

void finish(IncrementRegression& reg) {
  double sq = 0.0;
  for (double r : reg.residual) {
    reg.max_residual = std::max(reg.max_residual, r);
    sq += r * r;
  }
  if (!reg.residual.empty()) reg.rms_residual = std::sqrt(sq / static_cast<double>(reg.residual.size()));
}

}  // namespace

double FilterSeries::max_imaginary() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v.imag()));
  return m;
}

FilterSeries belavkin_filter_series(const BelavkinTrajectory& traj, const Operator& x) {
  return series_of(traj.states, traj.grid, x);
}

FilterSeries gisin_filter_series(const GisinTrajectory& traj, const Operator& x) {
  return series_of(traj.states, traj.grid, x);
}

IncrementRegression belavkin_filter_regression(const ModelSpec& model, const BelavkinTrajectory& traj,
                                               const Operator& x) {
  require_same_dim(model.dim(), x.rows(), "belavkin_filter_regression");
  const TimeGrid& g = traj.grid;
  IncrementRegression reg;
  reg.residual.reserve(g.n_steps);
  for (std::size_t m = 0; m < g.n_steps; ++m) {
    const Coefficients c = model.at(g.time(m));
    const StateVector& psi = traj.states[m];
    const Complex pi_x = expectation(psi, x);
    Complex predicted = expectation(psi, gks_lindblad_apply(c, x)) * g.dt;
    for (std::size_t k = 0; k < c.n_channels(); ++k) {
      const Operator& l = c.couplings[k];
      const double lam = traj.lambdas[m][static_cast<Index>(k)];
      predicted += (expectation(psi, x * l + l.adjoint() * x) - lam * pi_x) * traj.innovations[m][static_cast<Index>(k)];
    }
    const Complex realized = expectation(traj.states[m + 1], x) - pi_x;
    reg.residual.push_back(std::abs(realized - predicted));
  }
  finish(reg);
  return reg;
}

IncrementRegression gisin_filter_regression(const ModelSpec& model, const GisinTrajectory& traj,
                                            const Operator& x) {
  require_same_dim(model.dim(), x.rows(), "gisin_filter_regression");
  const TimeGrid& g = traj.grid;
  IncrementRegression reg;
  reg.residual.reserve(g.n_steps);
  for (std::size_t m = 0; m < g.n_steps; ++m) {
    const Coefficients c = model.at(g.time(m));
    const StateVector& psi = traj.states[m];
    const Complex pi_x = expectation(psi, x);
    Complex predicted = expectation(psi, gks_lindblad_apply(c, x)) * g.dt;
    for (std::size_t k = 0; k < c.n_channels(); ++k) {
      const Operator& r = c.couplings[k];
      const Complex ck = traj.c_values[m][static_cast<Index>(k)];
      const Complex dxs = traj.dxi_star[m][static_cast<Index>(k)];
      predicted += (expectation(psi, x * r) - ck * pi_x) * dxs;
      predicted += (expectation(psi, r.adjoint() * x) - std::conj(ck) * pi_x) * std::conj(dxs);
    }
    const Complex realized = expectation(traj.states[m + 1], x) - pi_x;
    reg.residual.push_back(std::abs(realized - predicted));
  }
  finish(reg);
  return reg;
}

Prop2Report proposition2_check(const Operator& r, const Operator& h, const Operator& x, const RealNoisePath& path,
                               const StateVector& psi0, const TimeGrid& grid) {
  const auto z = canonical_coefficients(static_cast<int>(path.n_channels()));
  return proposition2_check(coupled_pair_run(r, h, z, path, psi0, grid), x);
}

Prop2Report proposition2_check(const CoupledRun& run, const Operator& x) {
  Prop2Report rep;
  const auto& a = run.belavkin.states;
  const auto& b = run.gisin.states;
  rep.deviation.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Complex pi = expectation(a[i], x);
    rep.deviation.push_back(std::abs(pi - expectation(b[i], x)));
    rep.max_deviation = std::max(rep.max_deviation, rep.deviation.back());
    const StateVector rotated = std::exp(kI * run.theta[i]) * a[i];
    rep.phase_immunity_error = std::max(rep.phase_immunity_error, std::abs(pi - expectation(rotated, x)));
  }
  return rep;
}

}  // namespace qsde
