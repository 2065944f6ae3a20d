#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <cstdint>
#include <vector>

#include "escphase/error.hpp"
#include "escphase/grid.hpp"
#include "escphase/markov.hpp"
#include "escphase/signal.hpp"

namespace testing_support {

inline escphase::EmbeddedSignal embedding_of(const std::vector<std::complex<double>>& values,
                                             double dt = 0.01) {
  escphase::EmbeddedSignal emb;
  emb.values = values;
  emb.dt = dt;
  for (auto v : values) {
    emb.amplitude.push_back(std::abs(v));
    emb.phase.push_back(escphase::phase_of(v));
  }
  return emb;
}

/// Model on a one-annulus grid with `weights.size()` boxes; box i+1 carries row i.
inline escphase::TransitionModel model_from_counts(
    const std::vector<std::vector<std::int64_t>>& weights) {
  escphase::TransitionCounts counts(escphase::PolarGrid(1, static_cast<int>(weights.size())));
  for (std::size_t i = 0; i < weights.size(); ++i)
    for (std::size_t j = 0; j < weights[i].size(); ++j)
      if (weights[i][j] > 0) counts.add(static_cast<int>(i + 1), static_cast<int>(j + 1), weights[i][j]);
  return escphase::transition_matrix(counts);
}

/// Steady 0.88 Hz oscillation for `stepping_s`, a 2 s amplitude collapse and
/// low-amplitude noise for `freezing_s`, sampled at 100 Hz.
inline std::vector<double> stepping_then_freezing(double stepping_s, double freezing_s,
                                                  std::uint64_t seed = 1) {
  const double dt = 0.01, ramp_s = 2.0;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 0.03);
  const auto n = static_cast<std::size_t>((stepping_s + ramp_s + freezing_s) / dt);
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    double amp = 1.0;
    if (t > stepping_s) amp = std::max(0.1, 1.0 - 0.9 * (t - stepping_s) / ramp_s);
    x[k] = amp * std::cos(2 * std::numbers::pi * 0.88 * t) + noise(gen);
  }
  return x;
}

template <class Fn>
escphase::ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const escphase::Error& e) {
    return e.code();
  }
  return static_cast<escphase::ErrorCode>(-1);
}

}  // namespace testing_support
