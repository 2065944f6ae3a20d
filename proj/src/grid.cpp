#include "escphase/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "escphase/error.hpp"
#include "escphase/signal.hpp"

namespace escphase {

PolarGrid::PolarGrid(int annuli, int cones) : annuli_(annuli), cones_(cones) {
  if (annuli < 1 || cones < 1)
    throw Error(ErrorCode::InvalidInput, "grid needs P >= 1 and Q >= 1");
}

PolarGrid PolarGrid::from_box_sizes(double p, double q_degrees) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidInput, "p must lie in (0, 1]");
  if (!(q_degrees > 0.0 && q_degrees <= 360.0))
    throw Error(ErrorCode::InvalidInput, "q must lie in (0, 360]");
  return PolarGrid(static_cast<int>(std::lround(1.0 / p)),
                   static_cast<int>(std::lround(360.0 / q_degrees)));
}

BoxIndex ind(const PolarGrid& grid, std::complex<double> x) {
  const double r = std::abs(x);
  if (!(r <= 1.0 + kDiskTolerance))
    throw Error(ErrorCode::OutOfDisk, "|X| = " + std::to_string(r) + " exceeds 1");
  const int P = grid.annuli();
  const int Q = grid.cones();
  const int k = std::clamp(static_cast<int>(std::ceil(r * P)), 1, P);
  const double psi = phase_of(x);
  const int l =
      std::clamp(static_cast<int>(std::floor(psi * Q / (2.0 * std::numbers::pi))) + 1, 1, Q);
  return {l + Q * (k - 1), k, l};
}

BoxIndex from_linear(const PolarGrid& grid, int i) {
  const int Q = grid.cones();
  if (i < 1 || i > grid.box_count())
    throw Error(ErrorCode::IndexOutOfRange, "box index " + std::to_string(i));
  const int k = (i + Q - 1) / Q;
  return {i, k, i - Q * (k - 1)};
}

std::complex<double> box_center(const PolarGrid& grid, int i) {
  const BoxIndex b = from_linear(grid, i);
  const double radius = (b.k - 0.5) / grid.annuli();
  const double angle = 2.0 * std::numbers::pi * (b.l - 0.5) / grid.cones();
  return std::polar(radius, angle);
}

double box_center_phase_degrees(const PolarGrid& grid, int i) {
  const BoxIndex b = from_linear(grid, i);
  return 360.0 * (b.l - 0.5) / grid.cones();
}

}  // namespace escphase
