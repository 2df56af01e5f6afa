#pragma once

// Seeded Wiener increments.
//
// Every path is a pure function of (base_seed, trajectory_index, n_steps, dt,
// n_channels). The per-trajectory engine is std::mt19937_64 seeded with a
// SplitMix64 mix of the pair, so trajectories can be generated in any order
// or concurrently. Uniforms take the top 53 bits, offset by half an ulp so
// they lie in (0, 1); normals come from the Box-Muller transform, both
// outputs used, cosine branch first. Increments are laid out step-major.
// Regression outputs depend on this exact recipe.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qsde/linalg.hpp"

namespace qsde {

struct SeedPair {
  std::uint64_t base_seed = 0;
  std::uint64_t trajectory_index = 0;

  friend bool operator==(const SeedPair&, const SeedPair&) = default;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Standard normal stream for one trajectory.
class GaussianSource {
 public:
  explicit GaussianSource(SeedPair seed);

  double next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Real Wiener increments dI_k, one row of n_channels per step.
class RealNoisePath {
 public:
  RealNoisePath(std::size_t n_channels, double dt, std::vector<double> increments, SeedPair seed = {});

  std::size_t n_channels() const noexcept { return n_channels_; }
  std::size_t n_steps() const noexcept { return n_channels_ == 0 ? 0 : data_.size() / n_channels_; }
  double dt() const noexcept { return dt_; }
  SeedPair seed() const noexcept { return seed_; }

  std::span<const double> step(std::size_t m) const;
  double operator()(std::size_t m, std::size_t k) const { return data_[m * n_channels_ + k]; }
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::size_t n_channels_;
  double dt_;
  std::vector<double> data_;
  SeedPair seed_;
};

/// Which stream a complex path holds. State diffusion is driven by dxi^*,
/// so integrators refuse anything but XiConjugate.
enum class ComplexConvention { Xi, XiConjugate };

class ComplexNoisePath {
 public:
  ComplexNoisePath(std::size_t n_channels, double dt, std::vector<Complex> increments,
                   ComplexConvention convention, SeedPair seed = {});

  std::size_t n_channels() const noexcept { return n_channels_; }
  std::size_t n_steps() const noexcept { return n_channels_ == 0 ? 0 : data_.size() / n_channels_; }
  double dt() const noexcept { return dt_; }
  SeedPair seed() const noexcept { return seed_; }
  ComplexConvention convention() const noexcept { return convention_; }

  std::span<const Complex> step(std::size_t m) const;
  Complex operator()(std::size_t m, std::size_t k) const { return data_[m * n_channels_ + k]; }
  const std::vector<Complex>& data() const noexcept { return data_; }

  /// Entrywise complex conjugate with the convention flag flipped.
  ComplexNoisePath conjugated() const;

 private:
  std::size_t n_channels_;
  double dt_;
  std::vector<Complex> data_;
  ComplexConvention convention_;
  SeedPair seed_;
};

/// Independent N(0, dt) increments on n_channels channels.
RealNoisePath real_increments(std::size_t n_channels, std::size_t n_steps, double dt, SeedPair seed);

/// dxi_k = (dB_{2k-1} + i dB_{2k}) / sqrt(2); requires an even channel count.
ComplexNoisePath complex_from_real(const RealNoisePath& path);

/// dxi^* = sum_k z_k dI_k, returned as an XiConjugate stream. Requires
/// sum |z_k|^2 = 1 and sum z_k^2 = 0 within 1e-12.
ComplexNoisePath canonical_noise_map(std::span<const Complex> z, const RealNoisePath& path);

/// Sums consecutive blocks of `factor` increments: the same Brownian path
/// sampled on a grid `factor` times coarser.
RealNoisePath coarsen(const RealNoisePath& path, std::size_t factor);

}  // namespace qsde
