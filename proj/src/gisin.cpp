#include "qsde/gisin.hpp"

#include <cmath>
#include <string>

#include "kernels.hpp"

namespace qsde {

GisinState GisinState::initial(const ModelSpec& model, const StateVector& psi0, double t0) {
  require_same_dim(model.dim(), psi0.size(), "GisinState::initial");
  GisinState s;
  s.psi = normalized(psi0);
  s.c = gisin_expectations(model.at(t0), s.psi);
  s.t = t0;
  return s;
}

ComplexVector gisin_expectations(const Coefficients& coeffs, const StateVector& psi) {
  std::vector<StateVector> rpsi;
  detail::apply_couplings(coeffs, psi, rpsi);
  ComplexVector c;
  detail::expectations_from(psi, rpsi, c);
  return c;
}

StateVector gisin_increment(const Coefficients& coeffs, const StateVector& psi,
                            std::span<const Complex> dxi_star, double dt) {
  std::vector<StateVector> rpsi;
  detail::apply_couplings(coeffs, psi, rpsi);
  ComplexVector c;
  detail::expectations_from(psi, rpsi, c);
  StateVector out;
  detail::gisin_delta(coeffs, psi, rpsi, c, dxi_star, dt, out);
  return out;
}

StateVector gisin_increment(const ModelSpec& model, const StateVector& psi, std::span<const Complex> dxi_star,
                            double dt, double t) {
  return gisin_increment(model.at(t), psi, dxi_star, dt);
}

GisinState gisin_step(const ModelSpec& model, const GisinState& state, std::span<const Complex> dxi_star,
                      double dt) {
  GisinIntegrator integrator(model, state.psi, state.t);
  integrator.step(dxi_star, dt);
  return integrator.state();
}

GisinIntegrator::GisinIntegrator(const ModelSpec& model, const StateVector& psi0, double t0)
    : model_(model), coeffs_(model.at(t0)), state_(GisinState::initial(model, psi0, t0)) {
  delta_.resize(psi0.size());
}

void GisinIntegrator::step(std::span<const Complex> dxi_star, double dt) {
  if (model_.is_time_dependent()) {
    coeffs_ = model_.at(state_.t);
    detail::apply_couplings(coeffs_, state_.psi, rpsi_);
    detail::expectations_from(state_.psi, rpsi_, state_.c);
  } else if (rpsi_.size() != coeffs_.n_channels()) {
    detail::apply_couplings(coeffs_, state_.psi, rpsi_);
  }
  detail::gisin_delta(coeffs_, state_.psi, rpsi_, state_.c, dxi_star, dt, delta_);

  delta_ += state_.psi;
  const double n2 = delta_.squaredNorm();
  if (!(std::sqrt(n2) >= kZeroNormGuard)) {
    throw IntegrationError("gisin step: state norm collapsed below 1e-12; reduce dt", steps_taken_);
  }
  state_.psi = delta_ / std::sqrt(n2);
  state_.t += dt;
  ++steps_taken_;

  if (model_.is_time_dependent()) coeffs_ = model_.at(state_.t);
  detail::apply_couplings(coeffs_, state_.psi, rpsi_);
  detail::expectations_from(state_.psi, rpsi_, state_.c);
}

GisinTrajectory gisin_run(const ModelSpec& model, const StateVector& psi0, const ComplexNoisePath& dxi_star,
                          const TimeGrid& grid) {
  if (dxi_star.convention() != ComplexConvention::XiConjugate) {
    throw DomainError("gisin_run: expected the conjugate stream dxi^*; call conjugated() explicitly");
  }
  detail::require_channels(model.n_channels(), dxi_star.n_channels(), "gisin_run");
  if (dxi_star.n_steps() != grid.n_steps || std::abs(dxi_star.dt() - grid.dt) > 1e-12 * grid.dt) {
    throw DimensionError("gisin_run: noise path does not match the time grid");
  }
  GisinTrajectory traj;
  traj.grid = grid;
  traj.states.reserve(grid.n_points());
  traj.c_values.reserve(grid.n_points());
  traj.dxi_star.reserve(grid.n_steps);

  GisinIntegrator integrator(model, psi0, grid.t0);
  traj.states.push_back(integrator.state().psi);
  traj.c_values.push_back(integrator.state().c);
  for (std::size_t m = 0; m < grid.n_steps; ++m) {
    const auto dx = dxi_star.step(m);
    integrator.step(dx, grid.dt);
    traj.dxi_star.push_back(Eigen::Map<const ComplexVector>(dx.data(), static_cast<Index>(dx.size())));
    traj.states.push_back(integrator.state().psi);
    traj.c_values.push_back(integrator.state().c);
  }
  return traj;
}

ComplexNoisePath NoiseRotation::apply(const ComplexNoisePath& dxi_star) const {
  if (dxi_star.convention() != ComplexConvention::XiConjugate) {
    throw DomainError("NoiseRotation::apply: expected the conjugate stream dxi^*");
  }
  const auto n = static_cast<std::size_t>(conj_stream_map.rows());
  detail::require_channels(n, dxi_star.n_channels(), "NoiseRotation::apply");
  std::vector<Complex> out(dxi_star.data().size());
  for (std::size_t m = 0; m < dxi_star.n_steps(); ++m) {
    const auto in = dxi_star.step(m);
    for (std::size_t k = 0; k < n; ++k) {
      Complex acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += conj_stream_map(static_cast<Index>(k), static_cast<Index>(j)) * in[j];
      out[m * n + k] = acc;
    }
  }
  return ComplexNoisePath(n, dxi_star.dt(), std::move(out), ComplexConvention::XiConjugate, dxi_star.seed());
}

double TranslationPhase::rate(const ComplexVector& c) const {
  if (c.size() != beta.size()) throw DimensionError("TranslationPhase::rate: channel mismatch");
  double r = epsilon;
  for (Index k = 0; k < c.size(); ++k) r += (std::conj(beta[k]) * c[k]).imag();
  return r;
}

RotatedModel euclidean_transform_gp(const ModelSpec& model, const Operator& u) {
  const auto n = static_cast<Index>(model.n_channels());
  if (u.rows() != n || u.cols() != n) throw DimensionError("euclidean_transform_gp: U must be n_channels x n_channels");
  if (!is_unitary(u, 1e-12)) throw DomainError("euclidean_transform_gp: U is not unitary within 1e-12");

  const auto& ls = model.couplings();
  std::vector<TimeOperator> rotated;
  rotated.reserve(ls.size());
  for (Index k = 0; k < n; ++k) {
    bool constant = true;
    for (const auto& l : ls) constant = constant && l.is_constant();
    if (constant) {
      Operator acc = Operator::Zero(model.dim(), model.dim());
      for (Index j = 0; j < n; ++j) acc += u(k, j) * ls[static_cast<std::size_t>(j)].constant();
      rotated.emplace_back(std::move(acc));
    } else {
      rotated.emplace_back(model.dim(), [ls, row = ComplexVector(u.row(k).transpose()), dim = model.dim()](double t) {
        Operator acc = Operator::Zero(dim, dim);
        for (Index j = 0; j < row.size(); ++j) acc += row[j] * ls[static_cast<std::size_t>(j)](t);
        return acc;
      });
    }
  }
  return {ModelSpec(std::move(rotated), model.hamiltonian()), NoiseRotation{u.conjugate()}};
}

TranslatedModel euclidean_transform_gp(const ModelSpec& model, const ComplexVector& beta, double epsilon) {
  const auto n = static_cast<Index>(model.n_channels());
  if (beta.size() != n) throw DimensionError("euclidean_transform_gp: beta must have one entry per channel");
  const Index dim = model.dim();
  const Operator id = Operator::Identity(dim, dim);

  std::vector<TimeOperator> shifted;
  shifted.reserve(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    const auto& l = model.couplings()[static_cast<std::size_t>(k)];
    if (l.is_constant()) {
      shifted.emplace_back(Operator(l.constant() + beta[k] * id));
    } else {
      shifted.emplace_back(dim, [l, b = beta[k], id](double t) { return Operator(l(t) + b * id); });
    }
  }

  auto h_shift = [beta, epsilon, id](const std::vector<Operator>& ls) {
    Operator acc = epsilon * id;
    for (std::size_t k = 0; k < ls.size(); ++k) acc += im_part(std::conj(beta[static_cast<Index>(k)]) * ls[k]);
    return acc;
  };

  TimeOperator h;
  if (!model.is_time_dependent()) {
    std::vector<Operator> ls;
    for (const auto& l : model.couplings()) ls.push_back(l.constant());
    h = TimeOperator(Operator(model.hamiltonian().constant() + h_shift(ls)));
  } else {
    h = TimeOperator(dim, [model, h_shift](double t) {
      const Coefficients c = model.at(t);
      return Operator(c.hamiltonian + h_shift(c.couplings));
    });
  }
  return {ModelSpec(std::move(shifted), std::move(h)), TranslationPhase{beta, epsilon}};
}

}  // namespace qsde
