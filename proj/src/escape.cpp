#include "escphase/escape.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>

#include "escphase/error.hpp"

namespace escphase {
namespace {

using ColMatrix = Eigen::SparseMatrix<double>;

ColMatrix identity_minus(const RowMatrix& a, double shift = 1.0) {
  const Eigen::Index n = a.rows();
  ColMatrix m(n, n);
  ColMatrix eye(n, n);
  eye.setIdentity();
  m = shift * eye - ColMatrix(a);
  m.makeCompressed();
  return m;
}

Eigen::VectorXd solve_escape_system(const RowMatrix& a_f) {
  if (a_f.rows() != a_f.cols() || a_f.rows() == 0)
    throw Error(ErrorCode::InvalidInput, "A_F must be square and non-empty");
  const ColMatrix system = identity_minus(a_f);
  Eigen::SparseLU<ColMatrix> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorCode::SingularSystem, "I - A_F could not be factorized");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(a_f.rows());
  Eigen::VectorXd x = lu.solve(ones);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw Error(ErrorCode::SingularSystem, "I - A_F is singular");
  const double residual = (system * x - ones).lpNorm<Eigen::Infinity>();
  if (residual > 1e-6 * std::max(1.0, x.lpNorm<Eigen::Infinity>()) || x.minCoeff() <= 0.0)
    throw Error(ErrorCode::SingularSystem, "I - A_F is numerically singular");
  return x;
}

std::vector<std::complex<double>> dense_eigenvalues(const RowMatrix& a_f) {
  const Eigen::MatrixXd dense = Eigen::MatrixXd(a_f);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(dense, false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::ConvergenceFailure, "dense eigenvalue iteration did not converge");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

// Explicitly restarted Arnoldi for the two largest-modulus Ritz values.
std::vector<std::complex<double>> arnoldi_eigenvalues(const RowMatrix& a_f,
                                                      const SpectrumOptions& options) {
  const Eigen::Index n = a_f.rows();
  const Eigen::Index m = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(options.krylov_dimension));
  Eigen::VectorXd start = Eigen::VectorXd::Ones(n).normalized();

  for (int cycle = 0; cycle < options.max_iterations; ++cycle) {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, m + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
    v.col(0) = start;
    Eigen::Index built = m;
    for (Eigen::Index j = 0; j < m; ++j) {
      // Left multiplication keeps the Perron vector positive: use A_F^T.
      Eigen::VectorXd w = a_f.transpose() * v.col(j);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index i = 0; i <= j; ++i) {
          const double c = v.col(i).dot(w);
          h(i, j) += c;
          w -= c * v.col(i);
        }
      }
      h(j + 1, j) = w.norm();
      if (h(j + 1, j) < 1e-14) {
        built = j + 1;
        break;
      }
      v.col(j + 1) = w / h(j + 1, j);
    }

    const Eigen::MatrixXd hm = h.topLeftCorner(built, built);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(hm, true);
    if (solver.info() != Eigen::Success) break;
    const auto values = solver.eigenvalues();
    const auto vectors = solver.eigenvectors();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(built));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
      return std::abs(values(x)) > std::abs(values(y));
    });

    const std::size_t wanted = std::min<std::size_t>(2, order.size());
    bool converged = true;
    const double beta = built < m ? 0.0 : h(m, m - 1);
    for (std::size_t r = 0; r < wanted; ++r) {
      const auto y = vectors.col(order[r]);
      const double estimate = beta * std::abs(y(built - 1)) / y.norm();
      if (estimate > options.tolerance * std::max(1e-300, std::abs(values(order[r]))))
        converged = false;
    }
    if (converged || built < m) {
      std::vector<std::complex<double>> out;
      for (std::size_t r = 0; r < wanted; ++r) out.push_back(values(order[r]));
      return out;
    }
    const Eigen::MatrixXd basis = v.leftCols(built);
    Eigen::VectorXd next = basis * vectors.col(order[0]).real();
    if (wanted > 1) {
      next += basis * vectors.col(order[1]).real();
      next += basis * vectors.col(order[1]).imag();
    }
    start = next.normalized();
  }
  throw Error(ErrorCode::ConvergenceFailure, "Arnoldi iteration exhausted its budget");
}

// Left Perron vector by shifted inverse iteration on A_F^T.
std::vector<double> left_perron_vector(const RowMatrix& a_f, double lambda1,
                                       const SpectrumOptions& options) {
  const Eigen::Index n = a_f.rows();
  const double shift = lambda1 + 1e-9 * std::max(1.0, lambda1);
  ColMatrix system = identity_minus(a_f, shift);  // shift*I - A_F
  ColMatrix transposed = system.transpose();
  transposed.makeCompressed();
  Eigen::SparseLU<ColMatrix> lu;
  lu.compute(transposed);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorCode::ConvergenceFailure, "shifted system could not be factorized");

  Eigen::VectorXd s = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < options.max_iterations; ++it) {
    Eigen::VectorXd y = lu.solve(s);
    if (!y.allFinite()) break;
    const double total = y.sum();
    if (total == 0.0) break;
    y /= total;
    for (Eigen::Index i = 0; i < n; ++i)
      if (y(i) < 0.0 && y(i) > -1e-13) y(i) = 0.0;
    y /= y.sum();
    s = y;
    const Eigen::VectorXd image = a_f.transpose() * s;
    const double mass = image.sum();
    if (mass > 0.0 && (image / mass - s).lpNorm<Eigen::Infinity>() <= options.tolerance &&
        s.minCoeff() >= 0.0) {
      return {s.data(), s.data() + n};
    }
  }
  throw Error(ErrorCode::ConvergenceFailure, "quasi-stationary vector did not converge");
}

}  // namespace

TransitionBlock restrict_to_transition_set(const TransitionModel& model,
                                           const ClassDecomposition& dec) {
  TransitionBlock block;
  block.positions = dec.transition_set;
  std::vector<Eigen::Index> local(model.size(), -1);
  for (std::size_t r = 0; r < block.positions.size(); ++r) {
    local[block.positions[r]] = static_cast<Eigen::Index>(r);
    block.boxes.push_back(model.states()[block.positions[r]]);
  }
  std::vector<Eigen::Triplet<double>> triplets;
  const RowMatrix& a = model.matrix();
  for (std::size_t r = 0; r < block.positions.size(); ++r) {
    for (RowMatrix::InnerIterator it(a, static_cast<Eigen::Index>(block.positions[r])); it; ++it) {
      const Eigen::Index c = local[static_cast<std::size_t>(it.col())];
      if (c >= 0) triplets.emplace_back(static_cast<Eigen::Index>(r), c, it.value());
    }
  }
  const auto m = static_cast<Eigen::Index>(block.positions.size());
  block.matrix = RowMatrix(m, m);
  block.matrix.setFromTriplets(triplets.begin(), triplets.end());
  block.matrix.makeCompressed();
  return block;
}

double met_from_distribution(const RowMatrix& a_f, std::span<const double> s) {
  if (static_cast<Eigen::Index>(s.size()) != a_f.rows())
    throw Error(ErrorCode::InvalidInput, "distribution length does not match A_F");
  const Eigen::VectorXd x = solve_escape_system(a_f);
  double met = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) met += s[i] * x(static_cast<Eigen::Index>(i));
  return met;
}

std::vector<double> met_per_state(const RowMatrix& a_f) {
  const Eigen::VectorXd x = solve_escape_system(a_f);
  return {x.data(), x.data() + x.size()};
}

DominantSpectrum dominant_spectrum(const RowMatrix& a_f, SpectrumOptions options) {
  if (a_f.rows() != a_f.cols() || a_f.rows() == 0)
    throw Error(ErrorCode::InvalidInput, "A_F must be square and non-empty");
  const auto n = static_cast<std::size_t>(a_f.rows());
  auto values = n <= options.dense_limit ? dense_eigenvalues(a_f) : arnoldi_eigenvalues(a_f, options);
  std::sort(values.begin(), values.end(),
            [](auto x, auto y) { return std::abs(x) > std::abs(y); });

  DominantSpectrum spectrum;
  // The spectral radius of a nonnegative matrix is itself an eigenvalue.
  spectrum.lambda1 = std::abs(values.front());
  if (!(spectrum.lambda1 < 1.0))
    throw Error(ErrorCode::SingularSystem, "spectral radius of A_F is not below 1");
  if (values.size() > 1) {
    // Drop the eigenvalue representing the Perron root, keep the next modulus.
    std::size_t perron = 0;
    double best = std::abs(values[0] - spectrum.lambda1);
    for (std::size_t k = 1; k < values.size() && std::abs(values[k]) >= spectrum.lambda1 * (1 - 1e-9); ++k) {
      if (std::abs(values[k] - spectrum.lambda1) < best) {
        best = std::abs(values[k] - spectrum.lambda1);
        perron = k;
      }
    }
    spectrum.lambda_dec = std::abs(values[perron == 0 ? 1 : 0]);
  }
  spectrum.quasi_stationary = left_perron_vector(a_f, spectrum.lambda1, options);
  return spectrum;
}

PreferredPhase preferred_phase(std::span<const double> met, std::span<const int> boxes,
                               const PolarGrid& grid, double met_f) {
  if (met.empty() || met.size() != boxes.size())
    throw Error(ErrorCode::InvalidInput, "MET vector and box list must be non-empty and aligned");
  std::vector<std::size_t> order(met.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return boxes[a] < boxes[b]; });

  std::size_t best = order.front();
  for (std::size_t idx : order)
    if (met[idx] < met[best]) best = idx;

  PreferredPhase out;
  const double tie_tol = 1e-12 * std::max(1.0, std::abs(met[best]));
  int ties = 0;
  for (std::size_t idx : order) {
    if (std::abs(met[idx] - met[best]) <= tie_tol) ++ties;
    if (met[idx] < met_f) out.below_mean_boxes.push_back(boxes[idx]);
  }
  out.multiple_minima = ties > 1;
  out.i_min = boxes[best];
  out.x_min = box_center(grid, out.i_min);
  out.r_min = std::abs(out.x_min);
  out.psi_min_degrees = box_center_phase_degrees(grid, out.i_min);
  return out;
}

EscapeReport analyze_escape(const TransitionModel& model, const ClassDecomposition& dec, double dt,
                            SpectrumOptions options) {
  const TransitionBlock block = restrict_to_transition_set(model, dec);
  const auto met_steps = met_per_state(block.matrix);
  const DominantSpectrum spectrum = dominant_spectrum(block.matrix, options);
  const double met_f_steps = 1.0 / (1.0 - spectrum.lambda1);
  const PreferredPhase phase = preferred_phase(met_steps, block.boxes, model.grid(), met_f_steps);

  EscapeReport report;
  report.boxes = block.boxes;
  report.met_i.reserve(met_steps.size());
  for (double m : met_steps) report.met_i.push_back(m * dt);
  report.met_f = met_f_steps * dt;
  report.mix_f = dt / (1.0 - spectrum.lambda_dec);
  report.lambda1 = spectrum.lambda1;
  report.lambda_dec = spectrum.lambda_dec;
  report.quasi_stationary = spectrum.quasi_stationary;
  report.i_min = phase.i_min;
  report.x_min = phase.x_min;
  report.r_min = phase.r_min;
  report.psi_min_degrees = phase.psi_min_degrees;
  report.below_mean_boxes = phase.below_mean_boxes;
  report.multiple_minima = phase.multiple_minima;
  return report;
}

}  // namespace escphase
