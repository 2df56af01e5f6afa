#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qsde/lindblad.hpp"

namespace qsde {
namespace {

using testing::Rng;

TEST(LindbladRhs, MaximallyMixedTrivialModelIsStationary) {
  const auto co = make_coefficients({Operator::Zero(3, 3)}, Operator::Zero(3, 3));
  EXPECT_LT(max_abs(lindblad_rhs(co, Operator::Identity(3, 3) / 3.0)), 1e-16);
}

TEST(LindbladRhs, QubitDecayFromExcited) {
  const double gamma = 1.3;
  const auto co = make_coefficients({std::sqrt(gamma) * qubit::sigma_minus()}, Operator::Zero(2, 2));
  const Operator rho = qubit::excited() * qubit::excited().adjoint();
  Operator expected = Operator::Zero(2, 2);
  expected(0, 0) = gamma;
  expected(1, 1) = -gamma;
  EXPECT_LT(testing::max_diff(lindblad_rhs(co, rho), expected), 1e-15);
}

TEST(LindbladRhs, DualToHeisenbergGenerator) {
  Rng rng(11);
  for (int draw = 0; draw < 100; ++draw) {
    const Index d = 2 + draw % 3;
    const auto co = make_coefficients({testing::random_operator(d, rng), testing::random_operator(d, rng)},
                                      testing::random_hermitian(d, rng));
    const Operator x = testing::random_operator(d, rng);
    const Operator rho = testing::random_density(d, rng);
    const Complex lhs = (x * lindblad_rhs(co, rho)).trace();
    const Complex rhs = (gks_lindblad_apply(co, x) * rho).trace();
    EXPECT_LT(std::abs(lhs - rhs), 1e-12);
  }
}

TEST(LindbladRhs, MatchesSuperoperatorOracle) {
  Rng rng(12);
  const auto co = make_coefficients({testing::random_operator(3, rng)}, testing::random_hermitian(3, rng));
  const Operator rho = testing::random_density(3, rng);
  const Eigen::VectorXcd v = testing::lindblad_superoperator(co) * Eigen::Map<const Eigen::VectorXcd>(rho.data(), 9);
  const Operator expected = Eigen::Map<const Operator>(v.data(), 3, 3);
  EXPECT_LT(testing::max_diff(lindblad_rhs(co, rho), expected), 1e-13);
}

TEST(DensityMatrix, ValidatesInvariants) {
  Operator bad = Operator::Identity(2, 2);
  EXPECT_THROW(DensityMatrix{bad}, DomainError);  // trace 2
  Operator neg = Operator::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix{neg}, DomainError);
  Operator nonherm = Operator::Identity(2, 2) / 2.0;
  nonherm(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix{nonherm}, DomainError);
  EXPECT_NO_THROW(DensityMatrix::maximally_mixed(3));
}

TEST(LindbladPropagate, ZeroTimeLeavesStateUnchanged) {
  Rng rng(13);
  const auto model = constant_model({testing::random_operator(2, rng)}, testing::random_hermitian(2, rng));
  const DensityMatrix rho0(testing::random_density(2, rng));
  const auto out = lindblad_propagate(model, rho0, TimeGrid(0.0, 0.1, 0));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].matrix(), rho0.matrix());
}

TEST(LindbladPropagate, QubitDecayClosedForm) {
  for (const double gamma : {0.5, 1.0, 2.0}) {
    const auto model = constant_model({std::sqrt(gamma) * qubit::sigma_minus()}, Operator::Zero(2, 2));
    const TimeGrid grid = TimeGrid::over(2.0 / gamma, 1e-2 / gamma);
    const auto rhos = lindblad_propagate(model, DensityMatrix::pure(qubit::excited()), grid);
    for (const std::size_t m : {std::size_t{100}, std::size_t{200}}) {
      const double t = grid.time(m);
      EXPECT_NEAR(rhos[m].expectation(qubit::sigma_z()).real(), 2.0 * std::exp(-gamma * t) - 1.0, 1e-6);
    }
  }
}

TEST(LindbladPropagate, UnitaryClosedForm) {
  const double delta = 1.7;
  const auto model = constant_model({Operator::Zero(2, 2)}, delta / 2.0 * qubit::sigma_z());
  const TimeGrid grid = TimeGrid::over(3.0, 1e-2);
  const auto rhos = lindblad_propagate(model, DensityMatrix::pure(qubit::plus()), grid);
  for (std::size_t m = 0; m < grid.n_points(); m += 50) {
    const double t = grid.time(m);
    // rho_ge(t) = rho_ge(0) e^{i delta t} in the {g, e} ordering (sigma_z = diag(-1, +1)).
    EXPECT_LT(std::abs(rhos[m].matrix()(0, 1) - 0.5 * std::polar(1.0, delta * t)), 1e-8);
  }
}

TEST(LindbladPropagate, AgreesWithMatrixExponential) {
  Rng rng(14);
  for (int draw = 0; draw < 5; ++draw) {
    const Index d = 2 + draw % 3;
    const Operator l1 = testing::random_operator(d, rng, 0.6);
    const Operator l2 = testing::random_operator(d, rng, 0.6);
    const Operator h = testing::random_hermitian(d, rng);
    const auto model = constant_model({l1, l2}, h);
    const Operator rho0 = testing::random_density(d, rng);
    const TimeGrid grid = TimeGrid::over(2.0, 0.05);
    const auto rhos = lindblad_propagate(model, DensityMatrix(rho0), grid);
    const Operator exact = testing::lindblad_exact(model.at(0.0), rho0, grid.t_end());
    EXPECT_LT(testing::max_diff(rhos.back().matrix(), exact), 1e-8);
    for (const auto& r : rhos) EXPECT_TRUE(DensityMatrix::inspect(r.matrix()).ok());
  }
}

}  // namespace
}  // namespace qsde
