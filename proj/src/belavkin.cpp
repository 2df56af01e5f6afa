#include "qsde/belavkin.hpp"

#include <cmath>
#include <string>

#include "kernels.hpp"

namespace qsde {

BelavkinState BelavkinState::initial(const ModelSpec& model, const StateVector& psi0, double t0) {
  require_same_dim(model.dim(), psi0.size(), "BelavkinState::initial");
  BelavkinState s;
  s.psi = normalized(psi0);
  s.lambdas = belavkin_lambdas(model.at(t0), s.psi);
  s.records = RealVector::Zero(static_cast<Index>(model.n_channels()));
  s.innovations = RealVector::Zero(static_cast<Index>(model.n_channels()));
  s.t = t0;
  return s;
}

RealVector belavkin_lambdas(const Coefficients& coeffs, const StateVector& psi) {
  std::vector<StateVector> lpsi;
  detail::apply_couplings(coeffs, psi, lpsi);
  RealVector lambdas;
  detail::lambdas_from(psi, lpsi, lambdas);
  return lambdas;
}

StateVector belavkin_increment(const Coefficients& coeffs, const StateVector& psi, std::span<const double> dI,
                               double dt) {
  std::vector<StateVector> lpsi;
  detail::apply_couplings(coeffs, psi, lpsi);
  RealVector lambdas;
  detail::lambdas_from(psi, lpsi, lambdas);
  StateVector out;
  detail::belavkin_delta(coeffs, psi, lpsi, lambdas, dI, dt, out);
  return out;
}

StateVector belavkin_increment(const ModelSpec& model, const StateVector& psi, std::span<const double> dI,
                               double dt, double t) {
  return belavkin_increment(model.at(t), psi, dI, dt);
}

StateVector belavkin_increment_with_lambdas(const Coefficients& coeffs, const StateVector& psi,
                                            const RealVector& lambdas, std::span<const double> dI, double dt) {
  detail::require_channels(coeffs.n_channels(), static_cast<std::size_t>(lambdas.size()), "lambdas");
  std::vector<StateVector> lpsi;
  detail::apply_couplings(coeffs, psi, lpsi);
  StateVector out;
  detail::belavkin_delta(coeffs, psi, lpsi, lambdas, dI, dt, out);
  return out;
}

BelavkinState belavkin_step(const ModelSpec& model, const BelavkinState& state, std::span<const double> dI,
                            double dt) {
  BelavkinIntegrator integrator(model, state.psi, state.t);
  // Carry accumulators across; the integrator starts them at zero.
  integrator.step(dI, dt);
  BelavkinState out = integrator.state();
  out.records += state.records;
  out.innovations += state.innovations;
  return out;
}

StateVector zakai_step(const ModelSpec& model, const StateVector& chi, std::span<const double> dY, double dt,
                       double t) {
  const Coefficients coeffs = model.at(t);
  require_same_dim(coeffs.dim(), chi.size(), "zakai_step");
  detail::require_channels(coeffs.n_channels(), dY.size(), "zakai_step");
  StateVector out = chi + dt * (coeffs.drift * chi);
  for (std::size_t k = 0; k < coeffs.n_channels(); ++k) out.noalias() += dY[k] * (coeffs.couplings[k] * chi);
  return out;
}

ModelSpec detuned_coupling(double gamma, double phi, double omega, const Operator& a, const Operator& h) {
  if (!(gamma > 0.0)) throw DomainError("detuned_coupling: gamma must be positive");
  if (a.rows() != a.cols()) throw DimensionError("detuned_coupling: a is not square");
  require_same_dim(a.rows(), h.rows(), "detuned_coupling");
  const Operator base = std::sqrt(gamma) * std::exp(-kI * phi) * a;
  TimeOperator l = omega == 0.0 ? TimeOperator(base)
                                : TimeOperator(base.rows(), [base, omega](double t) -> Operator {
                                    return std::exp(kI * (omega * t)) * base;
                                  });
  return ModelSpec({std::move(l)}, TimeOperator(h));
}

ModelSpec detuned_coupling(double gamma, double phi, double omega, const Operator& a) {
  return detuned_coupling(gamma, phi, omega, a, Operator::Zero(a.rows(), a.cols()));
}

BelavkinIntegrator::BelavkinIntegrator(const ModelSpec& model, const StateVector& psi0, double t0)
    : model_(model), coeffs_(model.at(t0)), state_(BelavkinState::initial(model, psi0, t0)) {
  delta_.resize(psi0.size());
}

void BelavkinIntegrator::step(std::span<const double> dI, double dt) {
  if (model_.is_time_dependent()) {
    coeffs_ = model_.at(state_.t);
    detail::apply_couplings(coeffs_, state_.psi, lpsi_);
    detail::lambdas_from(state_.psi, lpsi_, state_.lambdas);
  } else if (lpsi_.size() != coeffs_.n_channels()) {
    detail::apply_couplings(coeffs_, state_.psi, lpsi_);
  }
  detail::belavkin_delta(coeffs_, state_.psi, lpsi_, state_.lambdas, dI, dt, delta_);

  for (std::size_t k = 0; k < dI.size(); ++k) {
    const auto i = static_cast<Index>(k);
    state_.records[i] += dI[k] + state_.lambdas[i] * dt;
    state_.innovations[i] += dI[k];
  }

  delta_ += state_.psi;
  const double n2 = delta_.squaredNorm();
  if (!(std::sqrt(n2) >= kZeroNormGuard)) {
    throw IntegrationError("belavkin step: state norm collapsed below 1e-12; reduce dt", steps_taken_);
  }
  last_norm_defect_ = std::abs(n2 - 1.0);
  state_.psi = delta_ / std::sqrt(n2);
  state_.t += dt;
  ++steps_taken_;

  // Keep the stored lambdas consistent with the stored state. For constant
  // models lpsi_ now holds L_k psi for the next step as well.
  if (model_.is_time_dependent()) coeffs_ = model_.at(state_.t);
  detail::apply_couplings(coeffs_, state_.psi, lpsi_);
  detail::lambdas_from(state_.psi, lpsi_, state_.lambdas);
}

BelavkinTrajectory belavkin_run(const ModelSpec& model, const StateVector& psi0, const RealNoisePath& path,
                                const TimeGrid& grid) {
  detail::require_channels(model.n_channels(), path.n_channels(), "belavkin_run");
  if (path.n_steps() != grid.n_steps || std::abs(path.dt() - grid.dt) > 1e-12 * grid.dt) {
    throw DimensionError("belavkin_run: noise path does not match the time grid");
  }
  BelavkinTrajectory traj;
  traj.grid = grid;
  traj.states.reserve(grid.n_points());
  traj.lambdas.reserve(grid.n_points());
  traj.records.reserve(grid.n_points());
  traj.innovations.reserve(grid.n_steps);

  BelavkinIntegrator integrator(model, psi0, grid.t0);
  auto record = [&] {
    traj.states.push_back(integrator.state().psi);
    traj.lambdas.push_back(integrator.state().lambdas);
    traj.records.push_back(integrator.state().records);
  };
  record();
  for (std::size_t m = 0; m < grid.n_steps; ++m) {
    const auto dI = path.step(m);
    integrator.step(dI, grid.dt);
    traj.innovations.push_back(Eigen::Map<const RealVector>(dI.data(), static_cast<Index>(dI.size())));
    record();
  }
  return traj;
}

}  // namespace qsde
