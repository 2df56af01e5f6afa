#include "qsde/convergence.hpp"

#include <cmath>

namespace qsde {

double fit_order(std::span<const double> dts, std::span<const double> errors) {
  if (dts.size() != errors.size() || dts.size() < 2) throw DomainError("fit_order: need matching sizes >= 2");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto n = static_cast<double>(dts.size());
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (!(dts[i] > 0.0) || !(errors[i] > 0.0)) throw DomainError("fit_order: dt and error must be positive");
    const double x = std::log(dts[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw DomainError("fit_order: all dt values are equal");
  return (n * sxy - sx * sy) / denom;
}

RefinementStudy refinement_study(std::size_t n_channels, double fine_dt, std::size_t fine_steps,
                                 std::span<const std::size_t> factors, std::size_t n_paths,
                                 std::uint64_t base_seed, const std::function<double(const RealNoisePath&)>& error) {
  if (n_paths == 0 || factors.empty()) throw DomainError("refinement_study: need at least one path and factor");
  RefinementStudy study;
  study.mean_errors.assign(factors.size(), 0.0);
  for (std::size_t f : factors) study.dts.push_back(fine_dt * static_cast<double>(f));
  for (std::size_t p = 0; p < n_paths; ++p) {
    const RealNoisePath fine = real_increments(n_channels, fine_steps, fine_dt, {base_seed, p});
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const RealNoisePath path = factors[i] == 1 ? fine : coarsen(fine, factors[i]);
      study.mean_errors[i] += error(path) / static_cast<double>(n_paths);
    }
  }
  study.order = fit_order(study.dts, study.mean_errors);
  return study;
}

}  // namespace qsde
