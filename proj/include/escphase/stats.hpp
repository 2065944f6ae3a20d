#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace escphase::stats {

struct CircularSummary {
  double mean_degrees = 0.0;  // in [0, 360)
  double std_degrees = 0.0;   // sqrt(-2 ln Rbar)
  double resultant = 0.0;     // mean resultant length Rbar
  double rayleigh_p = 1.0;    // uniformity test p-value
};

CircularSummary circular_summary_degrees(std::span<const double> angles_degrees);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t dof = 0;
};

/// Pearson chi-square test of uniformity of angles (radians) over `bins` bins.
ChiSquareResult chi_square_uniform(std::span<const double> angles_radians, std::size_t bins);

}  // namespace escphase::stats
