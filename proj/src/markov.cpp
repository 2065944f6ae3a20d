#include "escphase/markov.hpp"

#include <algorithm>
#include <string>

#include "escphase/error.hpp"
#include "escphase/random.hpp"

namespace escphase {

void TransitionCounts::add(int from, int to, std::int64_t count) {
  if (from < 1 || to < 1 || from > grid_.box_count() || to > grid_.box_count())
    throw Error(ErrorCode::IndexOutOfRange, "transition outside grid");
  if (count < 0) throw Error(ErrorCode::InvalidInput, "negative transition count");
  if (count == 0) return;
  entries_[{from, to}] += count;
  total_ += count;
}

TransitionCounts& TransitionCounts::operator+=(const TransitionCounts& other) {
  if (!(other.grid_ == grid_))
    throw Error(ErrorCode::InvalidInput, "cannot merge counts on different grids");
  for (const auto& [key, c] : other.entries_) add(key.first, key.second, c);
  return *this;
}

std::int64_t TransitionCounts::at(int from, int to) const {
  const auto it = entries_.find({from, to});
  return it == entries_.end() ? 0 : it->second;
}

TransitionModel::TransitionModel(TransitionCounts counts, std::vector<int> states,
                                 std::vector<int> support, RowMatrix matrix)
    : counts_(std::move(counts)),
      states_(std::move(states)),
      support_(std::move(support)),
      matrix_(std::move(matrix)) {
  has_row_.resize(states_.size());
  for (std::size_t p = 0; p < states_.size(); ++p)
    has_row_[p] = std::binary_search(support_.begin(), support_.end(), states_[p]);
}

std::vector<int> TransitionModel::dangling() const {
  std::vector<int> out;
  for (std::size_t p = 0; p < states_.size(); ++p)
    if (!has_row_[p]) out.push_back(states_[p]);
  return out;
}

std::optional<std::size_t> TransitionModel::position_of(int box) const {
  const auto it = std::lower_bound(states_.begin(), states_.end(), box);
  if (it == states_.end() || *it != box) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

std::vector<int> box_sequence(const PolarGrid& grid, const EmbeddedSignal& emb) {
  std::vector<int> boxes(emb.size());
  std::transform(emb.values.begin(), emb.values.end(), boxes.begin(),
                 [&](std::complex<double> z) { return ind(grid, z).i; });
  return boxes;
}

TransitionCounts count_transitions(const PolarGrid& grid, const EmbeddedSignal& emb,
                                   Window window) {
  if (window.end < window.start || window.end >= emb.size())
    throw Error(ErrorCode::InvalidInput, "window outside embedding");
  if (window.end == window.start)
    throw Error(ErrorCode::WindowTooShort, "counting needs at least 2 samples");
  TransitionCounts counts(grid);
  int previous = ind(grid, emb.values[window.start]).i;
  for (std::size_t t = window.start + 1; t <= window.end; ++t) {
    const int current = ind(grid, emb.values[t]).i;
    counts.add(previous, current);
    previous = current;
  }
  return counts;
}

TransitionCounts count_transitions(const PolarGrid& grid, const EmbeddedSignal& emb) {
  if (emb.size() < 2) throw Error(ErrorCode::WindowTooShort, "counting needs at least 2 samples");
  return count_transitions(grid, emb, Window{0, emb.size() - 1});
}

TransitionModel transition_matrix(const TransitionCounts& counts) {
  std::map<int, std::int64_t> row_sums;
  std::vector<int> states;
  for (const auto& [key, c] : counts.entries()) {
    row_sums[key.first] += c;
    states.push_back(key.first);
    states.push_back(key.second);
  }
  if (row_sums.empty()) throw Error(ErrorCode::EmptySupport, "no transitions counted");
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());

  std::vector<int> support;
  support.reserve(row_sums.size());
  for (const auto& [box, sum] : row_sums) support.push_back(box);

  auto position = [&](int box) {
    return static_cast<int>(std::lower_bound(states.begin(), states.end(), box) - states.begin());
  };

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(counts.entries().size() + states.size());
  for (const auto& [key, c] : counts.entries()) {
    triplets.emplace_back(position(key.first), position(key.second),
                          static_cast<double>(c) / static_cast<double>(row_sums[key.first]));
  }
  for (int box : states) {
    if (!row_sums.contains(box)) triplets.emplace_back(position(box), position(box), 1.0);
  }
  const auto n = static_cast<Eigen::Index>(states.size());
  RowMatrix matrix(n, n);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  matrix.makeCompressed();
  return TransitionModel(counts, std::move(states), std::move(support), std::move(matrix));
}

std::vector<int> surrogate(const TransitionModel& model, int start_box, std::size_t steps,
                           std::uint64_t seed) {
  const auto start = model.position_of(start_box);
  if (!start || model.is_dangling(*start))
    throw Error(ErrorCode::StartNotInSupport, "box " + std::to_string(start_box));
  if (steps < 1) throw Error(ErrorCode::InvalidInput, "surrogate needs at least one step");

  Rng rng(seed);
  const RowMatrix& a = model.matrix();
  std::vector<int> path;
  path.reserve(steps + 1);
  auto state = static_cast<Eigen::Index>(*start);
  path.push_back(model.states()[*start]);
  for (std::size_t s = 0; s < steps; ++s) {
    const double u = rng.uniform();
    double cumulative = 0.0;
    Eigen::Index next = -1;
    for (RowMatrix::InnerIterator it(a, state); it; ++it) {
      next = it.col();
      cumulative += it.value();
      if (u < cumulative) break;
    }
    state = next;
    path.push_back(model.states()[static_cast<std::size_t>(state)]);
  }
  return path;
}

}  // namespace escphase
