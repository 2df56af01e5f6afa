#include "qsde/grid.hpp"

#include <cmath>
#include <string>

#include "qsde/errors.hpp"

namespace qsde {

TimeGrid::TimeGrid(double t0_, double dt_, std::size_t n_steps_) : t0(t0_), dt(dt_), n_steps(n_steps_) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("TimeGrid: dt must be positive, got " + std::to_string(dt));
}

TimeGrid TimeGrid::over(double t_max, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("TimeGrid: dt must be positive, got " + std::to_string(dt));
  if (!(t_max >= dt)) throw DomainError("TimeGrid: t_max must be at least dt");
  return TimeGrid(0.0, dt, static_cast<std::size_t>(std::llround(t_max / dt)));
}

TimeGrid TimeGrid::refined(std::size_t factor) const {
  if (factor == 0) throw DomainError("TimeGrid::refined: factor must be positive");
  return TimeGrid(t0, dt / static_cast<double>(factor), n_steps * factor);
}

}  // namespace qsde
