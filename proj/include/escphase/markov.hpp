#pragma once

#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "escphase/grid.hpp"
#include "escphase/signal.hpp"

namespace escphase {

/// Sparse box-to-box transition counts on a polar grid (1-based box indices).
class TransitionCounts {
 public:
  using Entries = std::map<std::pair<int, int>, std::int64_t>;

  explicit TransitionCounts(PolarGrid grid) : grid_(grid) {}

  void add(int from, int to, std::int64_t count = 1);
  /// Sums counts of another record on the same grid.
  TransitionCounts& operator+=(const TransitionCounts& other);

  std::int64_t at(int from, int to) const;
  std::int64_t total() const { return total_; }
  const Entries& entries() const { return entries_; }
  const PolarGrid& grid() const { return grid_; }

 private:
  PolarGrid grid_;
  Entries entries_;
  std::int64_t total_ = 0;
};

using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Row-stochastic chain estimated from counts.
///
/// `support` holds the boxes with outgoing counts. A box that is only ever a
/// transition target (the trajectory ended there) is kept as an absorbing
/// state with a unit self-loop; `states` is the union, ascending by box index,
/// and indexes the rows and columns of `matrix`.
class TransitionModel {
 public:
  TransitionModel(TransitionCounts counts, std::vector<int> states, std::vector<int> support,
                  RowMatrix matrix);

  const PolarGrid& grid() const { return counts_.grid(); }
  const TransitionCounts& counts() const { return counts_; }
  const std::vector<int>& states() const { return states_; }
  const std::vector<int>& support() const { return support_; }
  std::vector<int> dangling() const;
  const RowMatrix& matrix() const { return matrix_; }
  std::size_t size() const { return states_.size(); }

  std::optional<std::size_t> position_of(int box) const;
  bool is_dangling(std::size_t position) const { return !has_row_[position]; }

 private:
  TransitionCounts counts_;
  std::vector<int> states_;
  std::vector<int> support_;
  std::vector<bool> has_row_;
  RowMatrix matrix_;
};

/// Box index of every sample.
std::vector<int> box_sequence(const PolarGrid& grid, const EmbeddedSignal& emb);

/// Counts transitions X(t) -> X(t+1) for t in [window.start, window.end - 1].
TransitionCounts count_transitions(const PolarGrid& grid, const EmbeddedSignal& emb,
                                   Window window);
TransitionCounts count_transitions(const PolarGrid& grid, const EmbeddedSignal& emb);

/// Normalizes rows with positive mass; throws EmptySupport if there are none.
TransitionModel transition_matrix(const TransitionCounts& counts);

/// Random walk of `steps` transitions from `start_box`, sampled row by row with
/// inverse-CDF draws from an Rng seeded with `seed`. Returns steps + 1 boxes.
std::vector<int> surrogate(const TransitionModel& model, int start_box, std::size_t steps,
                           std::uint64_t seed);

}  // namespace escphase
