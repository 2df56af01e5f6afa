#include "qsde/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kernels.hpp"

namespace qsde {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

std::array<Operator, 2> canonical_pair(const Operator& r) { return {kInvSqrt2 * r, kI * kInvSqrt2 * r}; }

}  // namespace

FeedbackAlphas feedback_alpha(const StateVector& psi, const Operator& r) {
  require_same_dim(r.rows(), psi.size(), "feedback_alpha");
  const Operator rs = r.adjoint();
  const FeedbackAlphas a{-expectation(psi, r - rs) / (2.0 * std::numbers::sqrt2),
                         -kI * expectation(psi, r + rs) / (2.0 * std::numbers::sqrt2)};
  for (const auto& ak : a) {
    if (std::abs(ak.real()) > 1e-12) {
      throw Error("feedback_alpha: displacement has real part " + std::to_string(ak.real()) +
                  "; the state or R is inconsistent");
    }
  }
  return a;
}

Coefficients modulated_coefficients(const Operator& r, const Operator& h, const FeedbackAlphas& alphas) {
  if (r.rows() != r.cols()) throw DimensionError("modulated_coefficients: R is not square");
  require_same_dim(r.rows(), h.rows(), "modulated_coefficients");
  const auto ls = canonical_pair(r);
  const Operator id = Operator::Identity(r.rows(), r.cols());
  Operator hp = h;
  std::vector<Operator> lp;
  for (std::size_t k = 0; k < 2; ++k) {
    lp.push_back(ls[k] + alphas[k] * id);
    hp += im_part(std::conj(alphas[k]) * ls[k]);
  }
  return make_coefficients(std::move(lp), std::move(hp));
}

StateVector modulated_increment(const Operator& r, const Operator& h, const StateVector& psi,
                                const FeedbackAlphas& alphas, std::span<const double> dI, double dt) {
  const auto ls = canonical_pair(r);
  require_same_dim(r.rows(), psi.size(), "modulated_increment");
  const RealVector lambdas{{2.0 * expectation(psi, ls[0]).real(), 2.0 * expectation(psi, ls[1]).real()}};
  return belavkin_increment_with_lambdas(modulated_coefficients(r, h, alphas), psi, lambdas, dI, dt);
}

FeedbackIdentities feedback_identities(const StateVector& psi, const Operator& r) {
  FeedbackIdentities id;
  const auto ls = canonical_pair(r);
  id.c = expectation(psi, r);
  id.alphas = feedback_alpha(psi, r);
  id.lambdas = RealVector{{2.0 * expectation(psi, ls[0]).real(), 2.0 * expectation(psi, ls[1]).real()}};

  Operator comb = Operator::Zero(r.rows(), r.cols());
  for (std::size_t k = 0; k < 2; ++k) {
    const double lam = id.lambdas[static_cast<Index>(k)];
    comb += (std::conj(id.alphas[k]) - 0.5 * lam) * ls[k];
    id.sum_abs_alpha_sq += std::norm(id.alphas[k]);
    id.quarter_sum_lambda_sq += 0.25 * lam * lam;
  }
  id.combination_vs_minus_cbar_r = (comb + std::conj(id.c) * r).norm();
  id.combination_vs_plus_cbar_r = (comb - std::conj(id.c) * r).norm();
  id.half_sum_abs_alpha_sq = 0.5 * id.sum_abs_alpha_sq;
  id.half_abs_c_sq = 0.5 * std::norm(id.c);
  id.abs_sum_lambda_alpha = std::abs(id.lambdas[0] * id.alphas[0] + id.lambdas[1] * id.alphas[1]);
  return id;
}

double ClosedLoopRun::max_residual() const {
  return residual.empty() ? 0.0 : *std::max_element(residual.begin(), residual.end());
}

ClosedLoopRun closed_loop_run(const Operator& r, const Operator& h, const RealNoisePath& path,
                              const StateVector& psi0, const TimeGrid& grid) {
  detail::require_channels(2, path.n_channels(), "closed_loop_run");
  if (path.n_steps() != grid.n_steps || std::abs(path.dt() - grid.dt) > 1e-12 * grid.dt) {
    throw DimensionError("closed_loop_run: noise path does not match the time grid");
  }
  require_same_dim(r.rows(), psi0.size(), "closed_loop_run");

  const auto z = canonical_coefficients(2);
  const ComplexNoisePath dxi_star = canonical_noise_map(std::span<const Complex>(z.z.data(), 2), path);
  ClosedLoopRun run;
  run.grid = grid;
  run.reference = gisin_run(constant_model({r}, h), psi0, dxi_star, grid);

  const auto ls = canonical_pair(r);
  auto lambdas_of = [&](const StateVector& psi) {
    return RealVector{{2.0 * expectation(psi, ls[0]).real(), 2.0 * expectation(psi, ls[1]).real()}};
  };

  StateVector psi = normalized(psi0);
  RealVector y = RealVector::Zero(2);
  run.states.reserve(grid.n_points());
  run.states.push_back(psi);
  run.lambdas.push_back(lambdas_of(psi));
  run.records.push_back(y);
  run.residual.push_back((psi - run.reference.states[0]).norm());

  for (std::size_t m = 0; m < grid.n_steps; ++m) {
    const auto alphas = feedback_alpha(psi, r);
    run.max_real_alpha = std::max({run.max_real_alpha, std::abs(alphas[0].real()), std::abs(alphas[1].real())});
    const auto dI = path.step(m);
    const RealVector& lam = run.lambdas.back();
    StateVector next = psi + belavkin_increment_with_lambdas(modulated_coefficients(r, h, alphas), psi, lam, dI, grid.dt);
    const double nn = next.norm();
    if (!(nn >= kZeroNormGuard)) throw IntegrationError("closed_loop_run: state norm collapsed below 1e-12", m);
    psi = next / nn;
    for (Index k = 0; k < 2; ++k) y[k] += dI[static_cast<std::size_t>(k)] + lam[k] * grid.dt;

    run.alphas.push_back(alphas);
    run.states.push_back(psi);
    run.lambdas.push_back(lambdas_of(psi));
    run.records.push_back(y);
    run.residual.push_back((psi - run.reference.states[m + 1]).norm());
  }
  return run;
}

}  // namespace qsde
