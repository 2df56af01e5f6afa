#pragma once

// Monte Carlo ensembles over seeded trajectories. Trajectories are processed
// in fixed-size blocks: each block is integrated (optionally with OpenMP),
// then folded into streaming mean/variance accumulators in trajectory-index
// order. The fold order never depends on the schedule, so serial and
// parallel runs produce bit-identical statistics.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qsde/grid.hpp"
#include "qsde/model.hpp"
#include "qsde/noise.hpp"

namespace qsde {

/// Welford accumulator.
class RunningStats {
 public:
  void push(double x) noexcept;

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const noexcept;
  double standard_error() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

enum class Unravelling { Belavkin, Gisin };

struct EnsembleOptions {
  std::size_t n_traj = 1;
  std::uint64_t base_seed = 0;
  bool parallel = true;
  std::size_t block_size = 64;
};

/// Per-time, per-observable statistics of Re <psi_t|X psi_t>.
struct EnsembleSummary {
  TimeGrid grid;
  std::vector<std::string> names;
  std::vector<RunningStats> stats;  // [point * n_obs + obs]

  const RunningStats& at(std::size_t point, std::size_t obs) const { return stats[point * names.size() + obs]; }
};

struct NamedObservable {
  std::string name;
  Operator op;
};

/// Fills out[point * n_obs + obs] for trajectory `index`; must be a pure
/// function of its arguments.
using TrajectoryKernel = std::function<void(std::size_t index, std::vector<double>& out)>;

/// Trajectory failures are rethrown as TrajectoryError carrying the index.
class TrajectoryError : public Error {
 public:
  TrajectoryError(const std::string& what, std::size_t trajectory, std::size_t step)
      : Error(what), trajectory_(trajectory), step_(step) {}
  std::size_t trajectory() const noexcept { return trajectory_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t trajectory_;
  std::size_t step_;
};

EnsembleSummary run_ensemble(const TrajectoryKernel& kernel, const TimeGrid& grid, std::vector<std::string> names,
                             const EnsembleOptions& opts);

/// The real noise trajectory `index` of an unravelling ensemble consumes:
/// one channel per coupling for filtering, two per coupling for diffusion
/// (combined by complex_from_real and conjugated into dxi^*).
RealNoisePath ensemble_noise(Unravelling kind, std::size_t n_couplings, const TimeGrid& grid,
                             std::uint64_t base_seed, std::size_t index);

/// Trajectory i uses the noise seed (base_seed, i). Filtering runs draw one
/// real channel per coupling; diffusion runs draw two per coupling and
/// combine them into dxi^*.
EnsembleSummary unravelling_ensemble(Unravelling kind, const ModelSpec& model, const StateVector& psi0,
                                     const TimeGrid& grid, const std::vector<NamedObservable>& observables,
                                     const EnsembleOptions& opts);

}  // namespace qsde
