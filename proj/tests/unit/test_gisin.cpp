#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "qsde/ensemble.hpp"
#include "qsde/gisin.hpp"

namespace qsde {
namespace {

using testing::Rng;

ComplexNoisePath conj_path(std::size_t n, std::size_t steps, double dt, SeedPair seed) {
  return complex_from_real(real_increments(2 * n, steps, dt, seed)).conjugated();
}

TEST(GisinIncrement, TrivialModelGivesZero) {
  Rng rng(31);
  const auto co = make_coefficients({Operator::Zero(2, 2)}, Operator::Zero(2, 2));
  const std::array<Complex, 1> dxi{Complex(0.1, 0.2)};
  EXPECT_LT(gisin_increment(co, testing::random_state(2, rng), dxi, 1e-3).norm(), 1e-16);
}

TEST(GisinIncrement, EigenstateOfCouplingHasNoNoiseTerm) {
  Rng rng(32);
  const Operator h = testing::random_hermitian(2, rng);
  Operator r = Operator::Zero(2, 2);
  r(0, 0) = Complex(0.3, 0.4);
  r(1, 1) = Complex(-1.0, 0.2);
  const auto co = make_coefficients({r}, h);
  const std::array<Complex, 1> a{Complex(0.1, -0.3)}, b{Complex(-0.7, 0.05)};
  const StateVector psi = qubit::excited();
  EXPECT_LT((gisin_increment(co, psi, a, 1e-3) - gisin_increment(co, psi, b, 1e-3)).norm(), 1e-15);
}

TEST(GisinIncrement, QubitDecayFromExcited) {
  const double gamma = 0.6, dt = 1e-3;
  const Operator h = 0.35 * qubit::sigma_z();
  const auto co = make_coefficients({std::sqrt(gamma) * qubit::sigma_minus()}, h);
  EXPECT_LT(gisin_expectations(co, qubit::excited()).norm(), 1e-16);
  const Complex dxi(0.02, -0.01);
  const std::array<Complex, 1> noise{dxi};
  const StateVector expected = -kI * h * qubit::excited() * dt - (gamma / 2) * dt * qubit::excited() +
                               std::sqrt(gamma) * dxi * qubit::ground();
  EXPECT_LT((gisin_increment(co, qubit::excited(), noise, dt) - expected).norm(), 1e-16);
}

TEST(GisinIncrement, MatchesExpandedFormula) {
  Rng rng(33);
  for (int draw = 0; draw < 100; ++draw) {
    const Operator r1 = testing::random_operator(3, rng), r2 = testing::random_operator(3, rng);
    const Operator h = testing::random_hermitian(3, rng);
    const auto co = make_coefficients({r1, r2}, h);
    const StateVector psi = testing::random_state(3, rng);
    const std::array<Complex, 2> dxi{0.02 * rng.complex_normal(), 0.02 * rng.complex_normal()};
    const double dt = 1e-3;
    StateVector expected = -kI * h * psi * dt;
    for (int k = 0; k < 2; ++k) {
      const Operator& r = k == 0 ? r1 : r2;
      const Complex c = psi.dot(r * psi);
      expected += (r * psi - c * psi) * dxi[k];
      expected += -0.5 * (r.adjoint() * r * psi - 2.0 * std::conj(c) * r * psi + std::norm(c) * psi) * dt;
    }
    EXPECT_LT((gisin_increment(co, psi, dxi, dt) - expected).norm(), 1e-13);
  }
}

TEST(GisinStep, NullStep) {
  Rng rng(34);
  const auto model = constant_model({testing::random_operator(2, rng)}, testing::random_hermitian(2, rng));
  const auto s0 = GisinState::initial(model, testing::random_state(2, rng));
  const std::array<Complex, 1> dxi{0.0};
  EXPECT_LT((gisin_step(model, s0, dxi, 0.0).psi - s0.psi).norm(), 1e-15);
}

TEST(GisinRun, RejectsXiStream) {
  const auto model = constant_model({qubit::sigma_minus()}, Operator::Zero(2, 2));
  const auto xi = complex_from_real(real_increments(2, 10, 1e-3, {1, 0}));
  EXPECT_THROW(gisin_run(model, qubit::excited(), xi, TimeGrid(0.0, 1e-3, 10)), DomainError);
  EXPECT_NO_THROW(gisin_run(model, qubit::excited(), xi.conjugated(), TimeGrid(0.0, 1e-3, 10)));
  EXPECT_THROW(gisin_run(model, qubit::excited(), xi.conjugated(), TimeGrid(0.0, 2e-3, 10)), DimensionError);
}

TEST(GisinTransform, IdentityRotationLeavesModelUnchanged) {
  Rng rng(35);
  const auto model = constant_model({testing::random_operator(2, rng), testing::random_operator(2, rng)},
                                    testing::random_hermitian(2, rng));
  const auto rot = euclidean_transform_gp(model, Operator::Identity(2, 2));
  const auto a = model.at(0.0), b = rot.model.at(0.0);
  for (int k = 0; k < 2; ++k) EXPECT_LT(testing::max_diff(a.couplings[k], b.couplings[k]), 1e-16);
  EXPECT_LT(testing::max_diff(a.hamiltonian, b.hamiltonian), 1e-16);
}

TEST(GisinTransform, RejectsNonUnitary) {
  const auto model = constant_model({qubit::sigma_minus(), qubit::sigma_z()}, Operator::Zero(2, 2));
  Operator u = Operator::Identity(2, 2);
  u(0, 1) = 0.1;
  EXPECT_THROW(euclidean_transform_gp(model, u), DomainError);
}

TEST(GisinTransform, RotationIsPathwiseInvariant) {
  Rng rng(36);
  for (int draw = 0; draw < 10; ++draw) {
    const auto model = constant_model({testing::random_operator(3, rng, 0.5), testing::random_operator(3, rng, 0.5)},
                                      testing::random_hermitian(3, rng));
    const auto rot = euclidean_transform_gp(model, testing::random_unitary(2, rng));
    const TimeGrid grid(0.0, 1e-3, 500);
    const auto noise = conj_path(2, grid.n_steps, grid.dt, {36, static_cast<std::uint64_t>(draw)});
    const StateVector psi0 = testing::random_state(3, rng);
    const auto a = gisin_run(model, psi0, noise, grid);
    const auto b = gisin_run(rot.model, psi0, rot.noise.apply(noise), grid);
    for (std::size_t m = 0; m < grid.n_points(); ++m) EXPECT_LT((a.states[m] - b.states[m]).norm(), 1e-10);
  }
}

TEST(GisinTransform, TranslationAgreesUpToGlobalPhase) {
  const auto model = constant_model({qubit::sigma_minus()}, 0.5 * qubit::sigma_z());
  ComplexVector beta(1);
  beta << Complex(0.4, -0.3);
  const auto tr = euclidean_transform_gp(model, beta, 0.25);
  // Translated coupling R + beta, H + Im{beta^* R} + eps.
  const auto co = tr.model.at(0.0);
  EXPECT_LT(testing::max_diff(co.couplings[0], qubit::sigma_minus() + beta(0) * Operator::Identity(2, 2)), 1e-16);
  const Operator expected_h = 0.5 * qubit::sigma_z() + im_part(std::conj(beta(0)) * qubit::sigma_minus()) +
                              0.25 * Operator::Identity(2, 2);
  EXPECT_LT(testing::max_diff(co.hamiltonian, expected_h), 1e-16);

  double previous = 0.0;
  for (const double dt : {1e-3, 2.5e-4}) {
    const TimeGrid grid = TimeGrid::over(2.0, dt);
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
      const auto noise = conj_path(1, grid.n_steps, dt, {37, seed});
      const auto a = gisin_run(model, qubit::plus(), noise, grid);
      const auto b = gisin_run(tr.model, qubit::plus(), noise, grid);
      for (std::size_t m = 0; m < grid.n_points(); ++m) {
        worst = std::max(worst, 1.0 - std::abs(a.states[m].dot(b.states[m])));
      }
    }
    EXPECT_LT(worst, 5.0 * std::sqrt(dt));
    if (previous > 0.0) {
      EXPECT_LT(worst, previous);
    }
    previous = worst;
  }
}

TEST(GisinTransform, TranslationPhaseRate) {
  ComplexVector beta(2), c(2);
  beta << Complex(0.1, 0.2), Complex(-0.3, 0.5);
  c << Complex(0.7, -0.1), Complex(0.2, 0.4);
  const TranslationPhase p{beta, 0.3};
  const double expected = (std::conj(beta(0)) * c(0)).imag() + (std::conj(beta(1)) * c(1)).imag() + 0.3;
  EXPECT_NEAR(p.rate(c), expected, 1e-16);
}

TEST(GisinEnsemble, ReproducesLindbladAverage) {
  const auto model = constant_model({qubit::sigma_minus()}, Operator::Zero(2, 2));
  const TimeGrid grid = TimeGrid::over(2.0, 1e-3);
  EnsembleOptions opts;
  opts.n_traj = 2000;
  opts.base_seed = 202;
  const auto summary =
      unravelling_ensemble(Unravelling::Gisin, model, qubit::excited(), grid, {{"sz", qubit::sigma_z()}}, opts);
  for (const std::size_t m : {std::size_t{1000}, std::size_t{2000}}) {
    const double exact = 2.0 * std::exp(-grid.time(m)) - 1.0;
    const auto& s = summary.at(m, 0);
    EXPECT_LE(std::abs(s.mean() - exact), 3.0 * s.standard_error()) << "t = " << grid.time(m);
  }
}

}  // namespace
}  // namespace qsde
