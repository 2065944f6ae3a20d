#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "escphase/classes.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace escphase;
using testing_support::code_of;
using testing_support::embedding_of;
using testing_support::model_from_counts;

namespace {

oracle::Pattern to_pattern(const BoolMatrix& m) {
  oracle::Pattern p(m.size(), std::vector<bool>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) p[i][j] = m(i, j);
  return p;
}

}  // namespace

TEST_CASE("reachability examples") {
  const auto a = oracle::to_sparse((Eigen::MatrixXd(2, 2) << 0, 1, 0, 1).finished());
  CHECK(to_pattern(reachability(a)) == oracle::Pattern{{false, true}, {false, true}});
  const auto id = oracle::to_sparse(Eigen::MatrixXd::Identity(2, 2));
  CHECK(to_pattern(reachability(id)) == oracle::Pattern{{true, false}, {false, true}});
}

TEST_CASE("reachability matches boolean powers on random 30-state chains") {
  std::mt19937_64 gen(30);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle::random_stochastic(30, 0.04 + 0.01 * trial, gen);
    const auto z = oracle::pattern_of(a);
    CHECK(to_pattern(reachability(oracle::to_sparse(a))) == oracle::reachability_by_powers(z));
  }
}

TEST_CASE("communicating class examples") {
  const auto full = oracle::to_sparse((Eigen::MatrixXd(2, 2) << 0.5, 0.5, 0.5, 0.5).finished());
  const auto one = communicating_classes(full);
  CHECK(one.count() == 1);
  CHECK(one.members[0] == std::vector<std::size_t>{0, 1});

  const auto chain = oracle::to_sparse((Eigen::MatrixXd(2, 2) << 0, 1, 0, 1).finished());
  const auto two = communicating_classes(chain);
  REQUIRE(two.count() == 2);
  CHECK(two.members[0] == std::vector<std::size_t>{0});
  CHECK(two.members[1] == std::vector<std::size_t>{1});
  CHECK(two.precedes(0, 1));
  CHECK_FALSE(two.precedes(1, 0));
  CHECK(two.order_edges == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}});
}

TEST_CASE("classes match union-find on random 30-state chains") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle::random_stochastic(30, 0.05, gen);
    const auto brute = oracle::classes_by_union_find(oracle::reachability_by_paths(oracle::pattern_of(a)));
    const auto cc = communicating_classes(oracle::to_sparse(a));
    REQUIRE(cc.count() == brute.classes.size());
    std::set<std::set<std::size_t>> got, want(brute.classes.begin(), brute.classes.end());
    for (const auto& m : cc.members) got.emplace(m.begin(), m.end());
    CHECK(got == want);
    for (std::size_t x = 0; x < 30; ++x)
      for (std::size_t y = 0; y < 30; ++y) {
        const bool expected = brute.precedes[brute.class_of[x]][brute.class_of[y]];
        CHECK(cc.precedes(cc.class_of[x], cc.class_of[y]) == expected);
      }
  }
}

TEST_CASE("split of a three-class chain") {
  // {1} -> {2,3} -> {4}, the middle class is largest.
  const auto model = model_from_counts({{0, 1, 0, 0}, {0, 0, 3, 0}, {0, 2, 0, 1}, {0, 0, 0, 5}});
  const auto dec = split_transition_absorbing(model);
  CHECK(dec.classes.count() == 3);
  CHECK(dec.classes.members[dec.stepping_class] == std::vector<std::size_t>{1, 2});
  CHECK(dec.transition_set == std::vector<std::size_t>{0, 1, 2});
  CHECK(dec.absorbing_set == std::vector<std::size_t>{3});
  REQUIRE(dec.unique_entry());
  CHECK(dec.entry_states[0].box == 4);
  CHECK(dec.entry_states[0].inbound_mass == doctest::Approx(1.0 / 3.0));
  CHECK(dec.stepping_fraction == doctest::Approx(0.5));
  CHECK_FALSE(dec.stepping_has_self_loop);
  CHECK(dec.in_transition_set == std::vector<bool>{true, true, true, false});
  CHECK(std::abs(dec.entry_point(model.grid()) - box_center(model.grid(), 4)) < 1e-15);
}

TEST_CASE("entry states ordered by box and primary by inbound mass") {
  // F = {1,2}; E = {3} and {4}, 4 receives more.
  const auto model = model_from_counts({{1, 3, 0, 1}, {2, 2, 1, 3}, {0, 0, 1, 0}, {0, 0, 0, 1}});
  const auto dec = split_transition_absorbing(model);
  REQUIRE(dec.entry_states.size() == 2);
  CHECK(dec.entry_states[0].box == 3);
  CHECK(dec.entry_states[1].box == 4);
  CHECK(dec.primary_entry == 1);
  CHECK(dec.stepping_has_self_loop);
}

TEST_CASE("split failures") {
  SUBCASE("single ergodic class") {
    const auto model = model_from_counts({{1, 1}, {1, 1}});
    CHECK(code_of([&] { split_transition_absorbing(model); }) == ErrorCode::EmptyAbsorbingSet);
  }
  SUBCASE("tie for the largest class") {
    const auto model = model_from_counts({{0, 1, 1, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}});
    CHECK(code_of([&] { split_transition_absorbing(model); }) == ErrorCode::DecompositionFailure);
  }
  SUBCASE("class incomparable to the stepping class") {
    // {1,2} -> {3}; {4} is disconnected (a dangling target of nobody: self-loop).
    const auto model = model_from_counts({{1, 1, 1, 0}, {1, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
    CHECK(code_of([&] { split_transition_absorbing(model); }) == ErrorCode::DecompositionFailure);
  }
}

TEST_CASE("split agrees with brute force on random small graphs") {
  std::mt19937_64 gen(12);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_real_distribution<double> u(0, 1);
  int ok = 0, failures = 0, empty = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(gen);
    const double density = 0.05 + 0.3 * u(gen);
    std::vector<std::vector<std::int64_t>> w(n, std::vector<std::int64_t>(n, 0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j)
        if (u(gen) < density) w[i][j] = 1 + static_cast<int>(3 * u(gen));
      if (std::all_of(w[i].begin(), w[i].end(), [](auto v) { return v == 0; })) w[i][(i + 1) % n] = 1;
    }
    const auto model = model_from_counts(w);
    Eigen::MatrixXd dense(model.matrix());
    const auto expected = oracle::split_by_enumeration(
        oracle::classes_by_union_find(oracle::reachability_by_paths(oracle::pattern_of(dense))));
    if (expected.outcome == 0) {
      const auto dec = split_transition_absorbing(model);
      CHECK(std::set<std::size_t>(dec.transition_set.begin(), dec.transition_set.end()) == expected.transition);
      CHECK(std::set<std::size_t>(dec.absorbing_set.begin(), dec.absorbing_set.end()) == expected.absorbing);
      ++ok;
    } else {
      const auto want = expected.outcome == 1 ? ErrorCode::DecompositionFailure : ErrorCode::EmptyAbsorbingSet;
      CHECK(code_of([&] { split_transition_absorbing(model); }) == want);
      (expected.outcome == 1 ? failures : empty) += 1;
    }
  }
  CHECK(ok > 10);
  CHECK(failures > 10);
  CHECK(empty > 10);
}

TEST_CASE("sample labels") {
  const PolarGrid g(1, 4);
  const auto center = [&](int i) { return box_center(g, i); };
  // One F box held throughout.
  {
    const auto emb = embedding_of(std::vector<std::complex<double>>(8, center(1)));
    TransitionCounts counts(g);
    counts.add(1, 1, 7);
    counts.add(1, 2, 2);
    counts.add(2, 1, 2);
    counts.add(2, 3, 1);  // an escape observed elsewhere
    const auto model = transition_matrix(counts);
    const auto dec = split_transition_absorbing(model);
    const auto tags = label_samples(dec, model, emb, Window{0, 7});
    CHECK(count_transition_samples(tags) == 8);
  }
  // F then E.
  {
    const auto emb = embedding_of({center(1), center(2), center(1), center(2), center(3), center(3)});
    const auto counts = count_transitions(g, emb);
    const auto model = transition_matrix(counts);
    const auto dec = split_transition_absorbing(model);
    const auto tags = label_samples(dec, model, emb, Window{0, 5});
    CHECK(tags == std::vector<SampleTag>{SampleTag::Transition, SampleTag::Transition, SampleTag::Transition,
                                         SampleTag::Transition, SampleTag::Absorbing, SampleTag::Absorbing});
    CHECK(count_transition_samples(tags) == 4);
    const auto foreign = embedding_of(std::vector<std::complex<double>>(3, center(4)));
    CHECK(code_of([&] { label_samples(dec, model, foreign, Window{0, 2}); }) == ErrorCode::InvalidInput);
  }
}
