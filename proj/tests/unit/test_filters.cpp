#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "qsde/convergence.hpp"
#include "qsde/filters.hpp"

namespace qsde {
namespace {

using testing::Rng;

const Operator kH = 0.5 * qubit::sigma_z() + qubit::sigma_x();

TEST(FilterSeries, IdentityIsConstantOne) {
  const auto model = constant_model({qubit::sigma_minus()}, kH);
  const TimeGrid grid = TimeGrid::over(1.0, 1e-3);
  const auto traj = belavkin_run(model, qubit::plus(), real_increments(1, grid.n_steps, grid.dt, {1, 0}), grid);
  for (const Complex v : belavkin_filter_series(traj, Operator::Identity(2, 2)).values) EXPECT_LT(std::abs(v - 1.0), 1e-14);
  const auto gt = gisin_run(model, qubit::plus(),
                            complex_from_real(real_increments(2, grid.n_steps, grid.dt, {1, 0})).conjugated(), grid);
  for (const Complex v : gisin_filter_series(gt, Operator::Identity(2, 2)).values) EXPECT_LT(std::abs(v - 1.0), 1e-14);
}

TEST(FilterSeries, ClosedSystemConservesEnergy) {
  Rng rng(51);
  const Operator h = testing::random_hermitian(3, rng);
  const auto model = constant_model({Operator::Zero(3, 3)}, h);
  const TimeGrid grid = TimeGrid::over(1.0, 1e-3);
  const auto traj = belavkin_run(model, testing::random_state(3, rng), real_increments(1, grid.n_steps, grid.dt, {2, 0}), grid);
  const auto s = belavkin_filter_series(traj, h);
  // Euler steps on a closed system conserve <H> up to O(dt) per unit time after renormalization.
  for (const Complex v : s.values) EXPECT_NEAR(v.real(), s.values.front().real(), 1e-3);
  EXPECT_LT(s.max_imaginary(), 1e-13);
}

TEST(FilterRegression, BelavkinIncrementsMatchFilterEquation) {
  const auto model = constant_model({qubit::sigma_minus()}, Operator::Zero(2, 2));
  std::vector<double> dts, rms;
  for (const double dt : {1e-3, 2.5e-4}) {
    const TimeGrid grid = TimeGrid::over(2.0, dt);
    const auto traj = belavkin_run(model, qubit::plus(), real_increments(1, grid.n_steps, dt, {52, 0}), grid);
    const auto reg = belavkin_filter_regression(model, traj, qubit::sigma_z());
    dts.push_back(dt);
    rms.push_back(reg.rms_residual);
  }
  // Residual per step is O(dt): a fourfold refinement cuts it by about four.
  EXPECT_GT(fit_order(dts, rms), 0.8);
  EXPECT_LT(rms.back(), 1e-3);
}

TEST(FilterRegression, GisinIncrementsMatchFilterEquation) {
  const auto model = constant_model({qubit::sigma_minus()}, kH);
  std::vector<double> dts, rms;
  for (const double dt : {1e-3, 2.5e-4}) {
    const TimeGrid grid = TimeGrid::over(2.0, dt);
    const auto traj = gisin_run(model, qubit::plus(),
                                complex_from_real(real_increments(2, grid.n_steps, dt, {53, 0})).conjugated(), grid);
    const auto reg = gisin_filter_regression(model, traj, qubit::sigma_z());
    dts.push_back(dt);
    rms.push_back(reg.rms_residual);
  }
  EXPECT_GT(fit_order(dts, rms), 0.8);
  EXPECT_LT(rms.back(), 1e-3);
}

TEST(FilterRegression, EigenstateStartIsDriftOnly) {
  // sigma_z eigenstate of a dephasing coupling: the noise coefficient of pi(X) vanishes.
  const auto model = constant_model({qubit::sigma_z()}, Operator::Zero(2, 2));
  const TimeGrid grid(0.0, 1e-3, 1);
  const auto traj = belavkin_run(model, qubit::excited(), RealNoisePath(1, 1e-3, {0.05}), grid);
  const auto s = belavkin_filter_series(traj, qubit::sigma_x());
  EXPECT_LT(std::abs(s.values[1] - s.values[0]), 1e-15);
}

TEST(FilterEquality, IdentityObservable) {
  const TimeGrid grid = TimeGrid::over(1.0, 1e-3);
  const auto rep = proposition2_check(qubit::sigma_minus(), kH, Operator::Identity(2, 2),
                                      real_increments(2, grid.n_steps, grid.dt, {54, 0}), qubit::plus(), grid);
  EXPECT_LE(rep.max_deviation, 1e-12);
}

TEST(FilterEquality, NoCoupling) {
  const TimeGrid grid = TimeGrid::over(1.0, 1e-3);
  const auto rep = proposition2_check(Operator::Zero(2, 2), kH, qubit::sigma_z(),
                                      real_increments(2, grid.n_steps, grid.dt, {55, 0}), qubit::plus(), grid);
  EXPECT_LE(rep.max_deviation, 1e-12);
}

TEST(FilterEquality, PhaseImmunityIsExact) {
  const TimeGrid grid = TimeGrid::over(2.0, 1e-3);
  for (const int n : {2, 3, 4}) {
    const auto rep = proposition2_check(qubit::sigma_minus(), kH, qubit::sigma_z(),
                                        real_increments(static_cast<std::size_t>(n), grid.n_steps, grid.dt, {56, 0}),
                                        qubit::plus(), grid);
    EXPECT_LE(rep.phase_immunity_error, 1e-14);
  }
}

TEST(FilterEquality, DeviationConvergesUnderRefinement) {
  const Operator r = qubit::sigma_minus();
  const Operator h = 0.5 * qubit::sigma_z();
  const auto error = [&](const RealNoisePath& path) {
    const TimeGrid grid(0.0, path.dt(), path.n_steps());
    return proposition2_check(r, h, qubit::sigma_z(), path, qubit::plus(), grid).max_deviation;
  };
  const std::array<std::size_t, 3> factors{4, 2, 1};
  const auto study = refinement_study(2, 2.5e-4, 20000, factors, 96, 57, error);
  EXPECT_GT(study.order, 0.35);
  EXPECT_LT(study.mean_errors.back(), study.mean_errors.front());
}

}  // namespace
}  // namespace qsde
