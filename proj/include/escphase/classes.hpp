#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "escphase/markov.hpp"

namespace escphase {

/// Dense square boolean matrix.
class BoolMatrix {
 public:
  explicit BoolMatrix(std::size_t n = 0) : n_(n), bits_(n * n, 0) {}

  std::size_t size() const { return n_; }
  bool operator()(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool value = true) { bits_[i * n_ + j] = value; }

  friend bool operator==(const BoolMatrix&, const BoolMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<std::uint8_t> bits_;
};

/// Entry (i, j) is true iff j can be reached from i by a path of length >= 1
/// along positive entries of `a`.
BoolMatrix reachability(const RowMatrix& a);

/// Strongly connected components of the positive pattern of a chain.
struct CommunicatingClasses {
  /// State positions per class, ascending; classes ordered by first member.
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::size_t> class_of;
  /// precedes(a, b): class b is reachable from class a, a != b (transitive).
  BoolMatrix precedes;
  /// Direct edges of the condensation graph.
  std::vector<std::pair<std::size_t, std::size_t>> order_edges;

  std::size_t count() const { return members.size(); }
};

CommunicatingClasses communicating_classes(const RowMatrix& a);

struct EntryState {
  std::size_t position = 0;
  int box = 0;
  double inbound_mass = 0.0;  // sum of A[i][j] over i in F
};

/// Transition set F (stepping class plus everything upstream of it) and
/// absorbing set E (everything downstream of it).
struct ClassDecomposition {
  CommunicatingClasses classes;
  std::size_t stepping_class = 0;
  std::vector<std::size_t> transition_set;  // state positions, ascending
  std::vector<std::size_t> absorbing_set;   // state positions, ascending
  std::vector<EntryState> entry_states;     // E-states one step from F, by box
  std::size_t primary_entry = 0;            // index into entry_states, max inbound mass
  double stepping_fraction = 0.0;           // |F_step| / number of states
  bool stepping_has_self_loop = false;
  std::vector<bool> in_transition_set;      // per state position

  bool unique_entry() const { return entry_states.size() == 1; }
  std::complex<double> entry_point(const PolarGrid& grid) const;
};

/// Picks the largest class as stepping class and splits the chain.
/// Throws DecompositionFailure on a size tie or a class incomparable to the
/// stepping class, EmptyAbsorbingSet when nothing lies downstream.
ClassDecomposition split_transition_absorbing(const TransitionModel& model,
                                              CommunicatingClasses classes);
ClassDecomposition split_transition_absorbing(const TransitionModel& model);

enum class SampleTag : std::uint8_t { Transition, Absorbing };

/// Tags every sample of the window by the set containing its box.
std::vector<SampleTag> label_samples(const ClassDecomposition& dec, const TransitionModel& model,
                                     const EmbeddedSignal& emb, Window window);

std::size_t count_transition_samples(const std::vector<SampleTag>& tags);

}  // namespace escphase
