#include "qsde/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "qsde/belavkin.hpp"
#include "qsde/gisin.hpp"

namespace qsde {

void RunningStats::push(double x) noexcept {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

double RunningStats::variance() const noexcept { return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1); }

double RunningStats::standard_error() const noexcept {
  return n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

EnsembleSummary run_ensemble(const TrajectoryKernel& kernel, const TimeGrid& grid, std::vector<std::string> names,
                             const EnsembleOptions& opts) {
  if (opts.n_traj == 0) throw DomainError("run_ensemble: n_traj must be at least 1");
  const std::size_t width = grid.n_points() * names.size();
  const std::size_t block = std::max<std::size_t>(1, opts.block_size);

  EnsembleSummary summary{grid, std::move(names), {}};
  summary.stats.resize(width);

  std::vector<std::vector<double>> buffers(block, std::vector<double>(width));
  std::vector<std::exception_ptr> errors(block);

  for (std::size_t first = 0; first < opts.n_traj; first += block) {
    const auto count = static_cast<std::ptrdiff_t>(std::min(block, opts.n_traj - first));
#pragma omp parallel for schedule(static) if (opts.parallel)
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      const auto slot = static_cast<std::size_t>(j);
      errors[slot] = nullptr;
      try {
        kernel(first + slot, buffers[slot]);
      } catch (...) {
        errors[slot] = std::current_exception();
      }
    }
    for (std::size_t slot = 0; slot < static_cast<std::size_t>(count); ++slot) {
      if (!errors[slot]) continue;
      const std::size_t index = first + slot;
      try {
        std::rethrow_exception(errors[slot]);
      } catch (const IntegrationError& e) {
        throw TrajectoryError("trajectory " + std::to_string(index) + ": " + e.what(), index, e.step());
      } catch (const std::exception& e) {
        throw TrajectoryError("trajectory " + std::to_string(index) + ": " + e.what(), index, 0);
      }
    }
    for (std::size_t slot = 0; slot < static_cast<std::size_t>(count); ++slot) {
      const auto& row = buffers[slot];
      for (std::size_t i = 0; i < width; ++i) summary.stats[i].push(row[i]);
    }
  }
  return summary;
}

RealNoisePath ensemble_noise(Unravelling kind, std::size_t n_couplings, const TimeGrid& grid,
                             std::uint64_t base_seed, std::size_t index) {
  const std::size_t channels = kind == Unravelling::Belavkin ? n_couplings : 2 * n_couplings;
  return real_increments(channels, grid.n_steps, grid.dt, {base_seed, index});
}

EnsembleSummary unravelling_ensemble(Unravelling kind, const ModelSpec& model, const StateVector& psi0,
                                     const TimeGrid& grid, const std::vector<NamedObservable>& observables,
                                     const EnsembleOptions& opts) {
  std::vector<std::string> names;
  for (const auto& o : observables) {
    require_same_dim(model.dim(), o.op.rows(), "unravelling_ensemble observable");
    names.push_back(o.name);
  }
  const std::size_t n_obs = observables.size();
  const std::size_t n_ch = model.n_channels();

  auto record = [&](std::size_t point, const StateVector& psi, std::vector<double>& out) {
    for (std::size_t o = 0; o < n_obs; ++o) out[point * n_obs + o] = expectation(psi, observables[o].op).real();
  };

  TrajectoryKernel kernel;
  if (kind == Unravelling::Belavkin) {
    kernel = [&](std::size_t index, std::vector<double>& out) {
      const RealNoisePath path = ensemble_noise(kind, n_ch, grid, opts.base_seed, index);
      BelavkinIntegrator integ(model, psi0, grid.t0);
      record(0, integ.state().psi, out);
      for (std::size_t m = 0; m < grid.n_steps; ++m) {
        integ.step(path.step(m), grid.dt);
        record(m + 1, integ.state().psi, out);
      }
    };
  } else {
    kernel = [&](std::size_t index, std::vector<double>& out) {
      const RealNoisePath real = ensemble_noise(kind, n_ch, grid, opts.base_seed, index);
      const ComplexNoisePath dxi_star = complex_from_real(real).conjugated();
      GisinIntegrator integ(model, psi0, grid.t0);
      record(0, integ.state().psi, out);
      for (std::size_t m = 0; m < grid.n_steps; ++m) {
        integ.step(dxi_star.step(m), grid.dt);
        record(m + 1, integ.state().psi, out);
      }
    };
  }
  return run_ensemble(kernel, grid, std::move(names), opts);
}

}  // namespace qsde
