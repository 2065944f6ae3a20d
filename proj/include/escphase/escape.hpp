#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "escphase/classes.hpp"
#include "escphase/markov.hpp"

namespace escphase {

/// Substochastic block of the chain on the transition set.
struct TransitionBlock {
  RowMatrix matrix;                   // A_F, ordered as `boxes`
  std::vector<std::size_t> positions; // state positions in the full chain
  std::vector<int> boxes;             // ascending
};

TransitionBlock restrict_to_transition_set(const TransitionModel& model,
                                           const ClassDecomposition& dec);

// All times below are in steps; seconds appear only in EscapeReport.

/// s (I - A_F)^{-1} e via one sparse LU solve.
double met_from_distribution(const RowMatrix& a_f, std::span<const double> s);

/// Expected escape time from each state: solution x of (I - A_F) x = e.
std::vector<double> met_per_state(const RowMatrix& a_f);

struct SpectrumOptions {
  double tolerance = 1e-10;
  int max_iterations = 500;
  /// Dense eigenvalue computation up to this size, restarted Arnoldi above.
  std::size_t dense_limit = 2000;
  std::size_t krylov_dimension = 60;
};

struct DominantSpectrum {
  double lambda1 = 0.0;     // Perron root of A_F
  double lambda_dec = 0.0;  // modulus of the next eigenvalue; 0 for a 1x1 block
  std::vector<double> quasi_stationary;  // left eigenvector at lambda1, sums to 1
};

DominantSpectrum dominant_spectrum(const RowMatrix& a_f, SpectrumOptions options = {});

struct PreferredPhase {
  int i_min = 0;
  std::complex<double> x_min;
  double r_min = 0.0;
  double psi_min_degrees = 0.0;
  std::vector<int> below_mean_boxes;  // MET_i < MET_F
  bool multiple_minima = false;
};

/// Argmin of `met` (ties to the smallest box) located at its box centre.
PreferredPhase preferred_phase(std::span<const double> met, std::span<const int> boxes,
                               const PolarGrid& grid, double met_f);

struct EscapeReport {
  std::vector<int> boxes;         // F, ascending
  std::vector<double> met_i;      // seconds, aligned with boxes
  double met_f = 0.0;             // seconds
  double mix_f = 0.0;             // seconds
  double lambda1 = 0.0;
  double lambda_dec = 0.0;
  std::vector<double> quasi_stationary;
  int i_min = 0;
  std::complex<double> x_min;
  double r_min = 0.0;
  double psi_min_degrees = 0.0;
  std::vector<int> below_mean_boxes;
  bool multiple_minima = false;
};

EscapeReport analyze_escape(const TransitionModel& model, const ClassDecomposition& dec, double dt,
                            SpectrumOptions options = {});

}  // namespace escphase
