#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace escphase {

/// Stochastic generalized Hopf normal form
///   dy = [beta y + 2 pi omega J y + (1-beta) |y|^2 y - |y|^4 y] dt + sigma dW.
struct HopfParams {
  double beta = -0.85;
  double omega = 0.88;  // rotation frequency in Hz
  double sigma = 0.05;
  double dt_sim = 1e-3;
  std::uint64_t seed = 1;
};

void validate(const HopfParams& params);

enum class Stability { Stable, Unstable };

struct Radius {
  double r = 0.0;
  Stability stability = Stability::Stable;
};

/// Radial drift f(R) = beta R + (1-beta) R^3 - R^5.
double radial_drift(double beta, double r);

/// Roots of beta + (1-beta) R^2 - R^4 (limit cycles) together with R = 0,
/// ascending, labelled by the sign of f'(R).
std::vector<Radius> deterministic_radii(double beta);

struct SdePath {
  std::vector<double> times;
  std::vector<double> first;   // y1 (Cartesian) or R (polar)
  std::vector<double> second;  // y2 (Cartesian) or theta, unwrapped (polar)
  std::size_t near_origin_samples = 0;  // polar only: R below 10 * r_floor

  std::size_t size() const { return times.size(); }
};

struct SimulationOptions {
  double duration = 10.0;
  /// Keep every n-th integrator step (the first and last states are always kept).
  std::size_t record_stride = 1;
};

/// Euler-Maruyama on the Cartesian form starting from (y1, y2); the linear
/// rotation is applied exactly after each step.
SdePath simulate_cartesian(const HopfParams& params, SimulationOptions options, double y1_0 = 1.0,
                           double y2_0 = 0.0);

inline constexpr double kRadiusFloor = 1e-6;

/// Euler-Maruyama on the polar form (Ito drift sigma^2 / 2R, angular gain
/// sigma / R). R is reflected at kRadiusFloor.
SdePath simulate_polar(const HopfParams& params, SimulationOptions options, double r0 = 1.0,
                       double theta0 = 0.0);

struct EscapeEnsemble {
  std::vector<double> phases;      // theta mod 2pi at first |y| < escape_radius
  std::vector<double> times;       // escape times, aligned with phases
  std::size_t no_escape_count = 0; // paths that exhausted the time budget
};

/// Cartesian paths from (1, 0), each with a seed derived from params.seed and
/// its path index; an escape is the first step with |y| < escape_radius.
EscapeEnsemble escape_phase_ensemble(const HopfParams& params, std::size_t n_paths,
                                     double escape_radius, double time_budget);

}  // namespace escphase
