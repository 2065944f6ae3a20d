#pragma once

#include <complex>

namespace escphase {

/// 1-based box position: annulus k, cone l and linear index i = l + Q(k-1).
struct BoxIndex {
  int i = 0;
  int k = 0;
  int l = 0;

  friend bool operator==(const BoxIndex&, const BoxIndex&) = default;
};

/// P annuli of radial thickness 1/P and Q cones of 360/Q degrees covering the
/// closed unit disk. Boxes are numbered angle-first from the origin outwards.
class PolarGrid {
 public:
  PolarGrid(int annuli, int cones);

  /// From box sizes: P = round(1/p), Q = round(360/q_degrees).
  static PolarGrid from_box_sizes(double p, double q_degrees);

  int annuli() const { return annuli_; }
  int cones() const { return cones_; }
  int box_count() const { return annuli_ * cones_; }
  double radial_size() const { return 1.0 / annuli_; }
  double angular_size_degrees() const { return 360.0 / cones_; }

  friend bool operator==(const PolarGrid&, const PolarGrid&) = default;

 private:
  int annuli_;
  int cones_;
};

/// Tolerance on |X| above 1 before OutOfDisk is raised.
inline constexpr double kDiskTolerance = 1e-9;

/// Box containing X. Radii on an annulus boundary go to the inner annulus,
/// angles on a cone boundary to the higher cone; the origin maps to k = 1.
BoxIndex ind(const PolarGrid& grid, std::complex<double> x);

/// (k, l) from a linear index, k = ceil(i/Q).
BoxIndex from_linear(const PolarGrid& grid, int i);

/// Mid point in radius and angle of box i.
std::complex<double> box_center(const PolarGrid& grid, int i);

/// Phase of the box centre in degrees, [0, 360).
double box_center_phase_degrees(const PolarGrid& grid, int i);

}  // namespace escphase
