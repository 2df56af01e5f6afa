#include "qsde/noise.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qsde {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t child_seed(SeedPair seed) noexcept {
  return splitmix64(splitmix64(seed.base_seed) ^ splitmix64(~seed.trajectory_index));
}

double open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("noise: dt must be positive, got " + std::to_string(dt));
}

}  // namespace

GaussianSource::GaussianSource(SeedPair seed) : engine_(child_seed(seed)) {}

double GaussianSource::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = open_unit(engine_());
  const double u2 = open_unit(engine_());
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

RealNoisePath::RealNoisePath(std::size_t n_channels, double dt, std::vector<double> increments, SeedPair seed)
    : n_channels_(n_channels), dt_(dt), data_(std::move(increments)), seed_(seed) {
  check_dt(dt);
  if (n_channels == 0) throw DomainError("RealNoisePath: n_channels must be positive");
  if (data_.size() % n_channels != 0) throw DimensionError("RealNoisePath: data is not a whole number of steps");
}

std::span<const double> RealNoisePath::step(std::size_t m) const {
  return std::span<const double>(data_).subspan(m * n_channels_, n_channels_);
}

ComplexNoisePath::ComplexNoisePath(std::size_t n_channels, double dt, std::vector<Complex> increments,
                                   ComplexConvention convention, SeedPair seed)
    : n_channels_(n_channels), dt_(dt), data_(std::move(increments)), convention_(convention), seed_(seed) {
  check_dt(dt);
  if (n_channels == 0) throw DomainError("ComplexNoisePath: n_channels must be positive");
  if (data_.size() % n_channels != 0) throw DimensionError("ComplexNoisePath: data is not a whole number of steps");
}

std::span<const Complex> ComplexNoisePath::step(std::size_t m) const {
  return std::span<const Complex>(data_).subspan(m * n_channels_, n_channels_);
}

ComplexNoisePath ComplexNoisePath::conjugated() const {
  std::vector<Complex> out(data_.size());
  for (std::size_t i = 0; i < data_.size(); ++i) out[i] = std::conj(data_[i]);
  const auto flipped =
      convention_ == ComplexConvention::Xi ? ComplexConvention::XiConjugate : ComplexConvention::Xi;
  return ComplexNoisePath(n_channels_, dt_, std::move(out), flipped, seed_);
}

RealNoisePath real_increments(std::size_t n_channels, std::size_t n_steps, double dt, SeedPair seed) {
  check_dt(dt);
  if (n_steps == 0) throw DomainError("real_increments: n_steps must be at least 1");
  if (n_channels == 0) throw DomainError("real_increments: n_channels must be positive");
  GaussianSource source(seed);
  const double scale = std::sqrt(dt);
  std::vector<double> data(n_channels * n_steps);
  for (auto& x : data) x = scale * source.next();
  return RealNoisePath(n_channels, dt, std::move(data), seed);
}

ComplexNoisePath complex_from_real(const RealNoisePath& path) {
  if (path.n_channels() % 2 != 0) {
    throw DomainError("complex_from_real: odd real channel count " + std::to_string(path.n_channels()));
  }
  const std::size_t m = path.n_channels() / 2;
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<Complex> out(m * path.n_steps());
  for (std::size_t step = 0; step < path.n_steps(); ++step) {
    for (std::size_t k = 0; k < m; ++k) {
      out[step * m + k] = s * Complex(path(step, 2 * k), path(step, 2 * k + 1));
    }
  }
  return ComplexNoisePath(m, path.dt(), std::move(out), ComplexConvention::Xi, path.seed());
}

ComplexNoisePath canonical_noise_map(std::span<const Complex> z, const RealNoisePath& path) {
  if (z.size() != path.n_channels()) {
    throw DimensionError("canonical_noise_map: z has " + std::to_string(z.size()) + " entries, path has " +
                         std::to_string(path.n_channels()) + " channels");
  }
  double norm2 = 0.0;
  Complex square_sum = 0.0;
  for (const auto& zk : z) {
    norm2 += std::norm(zk);
    square_sum += zk * zk;
  }
  if (std::abs(norm2 - 1.0) > 1e-12 || std::abs(square_sum) > 1e-12) {
    throw DomainError("canonical_noise_map: z must satisfy sum|z|^2 = 1 and sum z^2 = 0");
  }
  std::vector<Complex> out(path.n_steps());
  for (std::size_t step = 0; step < path.n_steps(); ++step) {
    Complex acc = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) acc += z[k] * path(step, k);
    out[step] = acc;
  }
  return ComplexNoisePath(1, path.dt(), std::move(out), ComplexConvention::XiConjugate, path.seed());
}

RealNoisePath coarsen(const RealNoisePath& path, std::size_t factor) {
  if (factor == 0 || path.n_steps() % factor != 0) {
    throw DomainError("coarsen: step count is not divisible by the coarsening factor");
  }
  const std::size_t n = path.n_channels();
  const std::size_t coarse_steps = path.n_steps() / factor;
  std::vector<double> out(coarse_steps * n, 0.0);
  for (std::size_t s = 0; s < coarse_steps; ++s) {
    for (std::size_t j = 0; j < factor; ++j) {
      for (std::size_t k = 0; k < n; ++k) out[s * n + k] += path(s * factor + j, k);
    }
  }
  return RealNoisePath(n, path.dt() * static_cast<double>(factor), std::move(out), path.seed());
}

}  // namespace qsde
