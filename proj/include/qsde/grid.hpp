#pragma once

#include <cstddef>

namespace qsde {

/// Uniform grid t_m = t0 + m dt, m = 0..n_steps.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t n_steps = 0;

  TimeGrid() = default;
  TimeGrid(double t0, double dt, std::size_t n_steps);

  /// n_steps = round(t_max / dt); throws DomainError unless dt > 0 and t_max >= dt.
  static TimeGrid over(double t_max, double dt);

  double time(std::size_t m) const noexcept { return t0 + static_cast<double>(m) * dt; }
  double t_end() const noexcept { return time(n_steps); }
  std::size_t n_points() const noexcept { return n_steps + 1; }

  /// Same interval with dt / factor.
  TimeGrid refined(std::size_t factor) const;
};

}  // namespace qsde
