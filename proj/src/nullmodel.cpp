#include "escphase/nullmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "escphase/error.hpp"
#include "escphase/random.hpp"

namespace escphase {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double drift_derivative(double beta, double r) {
  return beta + 3.0 * (1.0 - beta) * r * r - 5.0 * r * r * r * r;
}

std::size_t step_count(const HopfParams& params, double duration) {
  if (!(duration > 0.0)) throw Error(ErrorCode::InvalidInput, "duration must be positive");
  return static_cast<std::size_t>(std::llround(duration / params.dt_sim));
}

void record(SdePath& path, double t, double a, double b) {
  path.times.push_back(t);
  path.first.push_back(a);
  path.second.push_back(b);
}

}  // namespace

void validate(const HopfParams& params) {
  if (!(params.sigma >= 0.0)) throw Error(ErrorCode::InvalidInput, "sigma must be >= 0");
  if (!(params.dt_sim > 0.0)) throw Error(ErrorCode::InvalidInput, "dt_sim must be > 0");
}

double radial_drift(double beta, double r) {
  const double r2 = r * r;
  return r * (beta + (1.0 - beta) * r2 - r2 * r2);
}

std::vector<Radius> deterministic_radii(double beta) {
  // u = R^2 solves u^2 - (1-beta) u - beta = 0, i.e. u = 1 or u = -beta.
  std::vector<double> roots{0.0, 1.0};
  if (-beta > 0.0) roots.push_back(std::sqrt(-beta));
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());

  std::vector<Radius> out;
  for (double r : roots) {
    const double slope = drift_derivative(beta, r);
    Stability s;
    if (slope != 0.0) {
      s = slope < 0.0 ? Stability::Stable : Stability::Unstable;
    } else {
      // Degenerate: decide from the drift just outside the root.
      s = radial_drift(beta, r + 1e-4) < 0.0 ? Stability::Stable : Stability::Unstable;
    }
    out.push_back({r, s});
  }
  return out;
}

namespace {

// One Euler-Maruyama step for the amplitude drift and additive noise,
// followed by the exact rotation exp(2 pi omega J dt). Treating the linear
// rotation exactly keeps the explicit scheme from spiralling outwards by
// O((2 pi omega)^2 dt) per unit time on the limit cycle.
struct CartesianStep {
  explicit CartesianStep(const HopfParams& p)
      : beta(p.beta),
        dt(p.dt_sim),
        noise(p.sigma * std::sqrt(p.dt_sim)),
        c(std::cos(two_pi * p.omega * p.dt_sim)),
        s(std::sin(two_pi * p.omega * p.dt_sim)) {}

  void advance(double& y1, double& y2, Rng& rng) const {
    const double r2 = y1 * y1 + y2 * y2;
    const double radial = beta + (1.0 - beta) * r2 - r2 * r2;
    const double w1 = rng.normal();
    const double w2 = rng.normal();
    const double z1 = y1 + radial * y1 * dt + noise * w1;
    const double z2 = y2 + radial * y2 * dt + noise * w2;
    y1 = c * z1 - s * z2;
    y2 = s * z1 + c * z2;
  }

  double beta, dt, noise, c, s;
};

}  // namespace

SdePath simulate_cartesian(const HopfParams& params, SimulationOptions options, double y1_0,
                           double y2_0) {
  validate(params);
  const std::size_t steps = step_count(params, options.duration);
  const std::size_t stride = std::max<std::size_t>(1, options.record_stride);
  const double dt = params.dt_sim;
  const CartesianStep step(params);
  Rng rng(params.seed);

  SdePath path;
  path.times.reserve(steps / stride + 2);
  path.first.reserve(steps / stride + 2);
  path.second.reserve(steps / stride + 2);
  double y1 = y1_0, y2 = y2_0;
  record(path, 0.0, y1, y2);
  for (std::size_t n = 1; n <= steps; ++n) {
    step.advance(y1, y2, rng);
    if (n % stride == 0 || n == steps) record(path, static_cast<double>(n) * dt, y1, y2);
  }
  return path;
}

SdePath simulate_polar(const HopfParams& params, SimulationOptions options, double r0,
                       double theta0) {
  validate(params);
  if (!(r0 > 0.0)) throw Error(ErrorCode::InvalidInput, "R0 must be positive");
  const std::size_t steps = step_count(params, options.duration);
  const std::size_t stride = std::max<std::size_t>(1, options.record_stride);
  const double dt = params.dt_sim;
  const double sqrt_dt = std::sqrt(dt);
  const double sigma = params.sigma;
  const double rot = two_pi * params.omega;
  Rng rng(params.seed);

  SdePath path;
  double r = r0, theta = theta0;
  record(path, 0.0, r, theta);
  for (std::size_t n = 1; n <= steps; ++n) {
    const double wr = rng.normal();
    const double wt = rng.normal();
    const double dr = (radial_drift(params.beta, r) + sigma * sigma / (2.0 * r)) * dt +
                      sigma * sqrt_dt * wr;
    const double dtheta = rot * dt + sigma / r * sqrt_dt * wt;
    r += dr;
    theta += dtheta;
    if (r < kRadiusFloor) r = std::max(2.0 * kRadiusFloor - r, kRadiusFloor);
    if (r < 10.0 * kRadiusFloor) ++path.near_origin_samples;
    if (n % stride == 0 || n == steps) record(path, static_cast<double>(n) * dt, r, theta);
  }
  return path;
}

EscapeEnsemble escape_phase_ensemble(const HopfParams& params, std::size_t n_paths,
                                     double escape_radius, double time_budget) {
  validate(params);
  if (n_paths < 1) throw Error(ErrorCode::InvalidInput, "need at least one path");
  const auto radii = deterministic_radii(params.beta);
  const double cycle = radii.back().r;
  if (!(escape_radius > 0.0 && escape_radius < cycle))
    throw Error(ErrorCode::InvalidInput, "escape radius must lie inside the stable cycle");

  const std::size_t steps = step_count(params, time_budget);
  const double dt = params.dt_sim;
  const CartesianStep step(params);
  const double threshold2 = escape_radius * escape_radius;

  EscapeEnsemble out;
  for (std::size_t p = 0; p < n_paths; ++p) {
    Rng rng(derive_seed(params.seed, p));
    double y1 = cycle, y2 = 0.0;
    bool escaped = false;
    for (std::size_t n = 1; n <= steps && !escaped; ++n) {
    step.advance(y1, y2, rng);
      if (y1 * y1 + y2 * y2 < threshold2) {
        double theta = std::atan2(y2, y1);
        if (theta < 0.0) theta += two_pi;
        out.phases.push_back(theta);
        out.times.push_back(static_cast<double>(n) * dt);
        escaped = true;
      }
    }
    if (!escaped) ++out.no_escape_count;
  }
  return out;
}

}  // namespace escphase
