#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qsde/noise.hpp"

namespace qsde {

/// Least-squares slope of log(error) against log(dt). Throws DomainError for
/// fewer than two points or non-positive entries.
double fit_order(std::span<const double> dts, std::span<const double> errors);

struct RefinementStudy {
  std::vector<double> dts;
  std::vector<double> mean_errors;  // averaged over paths
  double order = 0.0;
};

/// For each of n_paths seeded fine paths, coarsens by every factor in
/// `factors` (1 = finest) and evaluates `error(path)`; the fitted order uses
/// the path-averaged errors.
RefinementStudy refinement_study(std::size_t n_channels, double fine_dt, std::size_t fine_steps,
                                 std::span<const std::size_t> factors, std::size_t n_paths,
                                 std::uint64_t base_seed, const std::function<double(const RealNoisePath&)>& error);

}  // namespace qsde
