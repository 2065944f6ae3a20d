#include "escphase/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "escphase/error.hpp"

namespace escphase::stats {

CircularSummary circular_summary_degrees(std::span<const double> angles_degrees) {
  if (angles_degrees.empty()) throw Error(ErrorCode::InvalidInput, "no angles");
  constexpr double to_rad = std::numbers::pi / 180.0;
  double c = 0.0, s = 0.0;
  for (double a : angles_degrees) {
    c += std::cos(a * to_rad);
    s += std::sin(a * to_rad);
  }
  const auto n = static_cast<double>(angles_degrees.size());
  c /= n;
  s /= n;
  CircularSummary out;
  out.resultant = std::min(1.0, std::hypot(c, s));
  double mean = std::atan2(s, c) / to_rad;
  if (mean < 0.0) mean += 360.0;
  if (mean >= 360.0 - 1e-9) mean = 0.0;
  if (std::abs(mean) < 1e-9) mean = 0.0;
  out.mean_degrees = mean;
  out.std_degrees = out.resultant > 0.0 ? std::sqrt(-2.0 * std::log(out.resultant)) / to_rad
                                        : std::numeric_limits<double>::infinity();
  // Rayleigh test with the usual small-sample correction.
  const double z = n * out.resultant * out.resultant;
  const double p = std::exp(std::sqrt(1.0 + 4.0 * n + 4.0 * (n * n - n * n * out.resultant * out.resultant)) -
                            (1.0 + 2.0 * n));
  out.rayleigh_p = n < 2 ? 1.0 : std::clamp(z > 0.0 ? p : 1.0, 0.0, 1.0);
  return out;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidInput, "KS needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

ChiSquareResult chi_square_uniform(std::span<const double> angles_radians, std::size_t bins) {
  if (angles_radians.empty() || bins < 2) throw Error(ErrorCode::InvalidInput, "chi-square needs data and >= 2 bins");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> counts(bins, 0.0);
  for (double a : angles_radians) {
    double wrapped = std::fmod(a, two_pi);
    if (wrapped < 0.0) wrapped += two_pi;
    const auto b = std::min(bins - 1, static_cast<std::size_t>(wrapped / two_pi * static_cast<double>(bins)));
    counts[b] += 1.0;
  }
  const double expected = static_cast<double>(angles_radians.size()) / static_cast<double>(bins);
  ChiSquareResult out;
  for (double c : counts) out.statistic += (c - expected) * (c - expected) / expected;
  out.dof = bins - 1;
  boost::math::chi_squared dist(static_cast<double>(out.dof));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

}  // namespace escphase::stats
