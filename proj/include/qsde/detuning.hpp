#pragma once

// Heterodyne detection with a detuned local oscillator. The filter for
// L(t) = sqrt(gamma) e^{-i phi} e^{i omega t} a is integrated in its linear
// form; the comparison trajectory drops the terms oscillating at 2 omega,
// which leaves the linear diffusion equation for R = sqrt(gamma) a driven by
// dxi_omega^* = e^{-i phi} e^{i omega t} dI. Both are renormalized every step.

#include <vector>

#include "qsde/belavkin.hpp"

namespace qsde {

/// dxi_omega^*(t_m) = e^{-i phi} e^{i omega t_m} dI_m on a one-channel path.
ComplexNoisePath rotating_frame_noise(double phi, double omega, const RealNoisePath& path, const TimeGrid& grid);

/// chi' = chi + dt (-iH - 1/2 R^*R) chi + R chi (dxi^* + <R^*> dt), <.> on chi / ||chi||.
StateVector rotating_wave_step(const Operator& r, const Operator& h, const StateVector& chi, Complex dxi_star,
                               double dt);

struct DetuningComparison {
  double omega = 0.0;
  std::vector<StateVector> filter;   // normalized linear filter
  std::vector<StateVector> limit;    // normalized rotating-wave solution
  std::vector<double> distance;      // phase-insensitive, per grid point
  double max_distance = 0.0;
};

DetuningComparison detuning_comparison(double gamma, double phi, double omega, const Operator& a,
                                       const Operator& h, const RealNoisePath& path, const StateVector& psi0,
                                       const TimeGrid& grid);

}  // namespace qsde
