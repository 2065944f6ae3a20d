#include "escphase/classes.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "escphase/error.hpp"

namespace escphase {
namespace {

using Graph = std::vector<std::vector<std::size_t>>;

Graph successors(const RowMatrix& a) {
  Graph graph(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    for (RowMatrix::InnerIterator it(a, r); it; ++it) {
      if (it.value() > 0.0) graph[static_cast<std::size_t>(r)].push_back(static_cast<std::size_t>(it.col()));
    }
  }
  return graph;
}

// Iterative Tarjan; components come out sinks first.
std::vector<std::vector<std::size_t>> tarjan(const Graph& graph) {
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  const std::size_t n = graph.size();
  std::vector<std::size_t> number(n, unvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> frames;  // (vertex, next successor)
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (number[root] != unvisited) continue;
    frames.emplace_back(root, 0);
    number[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      if (next < graph[v].size()) {
        const std::size_t w = graph[v][next++];
        if (number[w] == unvisited) {
          number[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], number[w]);
        }
        continue;
      }
      const std::size_t done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
      if (low[done] == number[done]) {
        std::vector<std::size_t> component;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
        } while (w != done);
        components.push_back(std::move(component));
      }
    }
  }
  return components;
}

}  // namespace

CommunicatingClasses communicating_classes(const RowMatrix& a) {
  const Graph graph = successors(a);
  auto components = tarjan(graph);
  const std::size_t n = graph.size();
  const std::size_t count = components.size();

  // Tarjan order is reverse topological; remember it before relabelling.
  for (auto& c : components) std::sort(c.begin(), c.end());
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return components[x].front() < components[y].front(); });

  CommunicatingClasses result;
  result.members.resize(count);
  result.class_of.assign(n, 0);
  std::vector<std::size_t> sink_first_rank(count);
  for (std::size_t id = 0; id < count; ++id) {
    result.members[id] = std::move(components[order[id]]);
    sink_first_rank[id] = order[id];
    for (std::size_t s : result.members[id]) result.class_of[s] = id;
  }

  std::vector<std::vector<std::size_t>> class_succ(count);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t w : graph[v]) {
      const std::size_t cv = result.class_of[v], cw = result.class_of[w];
      if (cv != cw) class_succ[cv].push_back(cw);
    }
  }
  for (std::size_t c = 0; c < count; ++c) {
    auto& s = class_succ[c];
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (std::size_t d : s) result.order_edges.emplace_back(c, d);
  }

  // Accumulate descendants sinks first so every successor is complete.
  const std::size_t words = (count + 63) / 64;
  std::vector<std::uint64_t> reach(count * words, 0);
  std::vector<std::size_t> by_sink_rank(count);
  for (std::size_t id = 0; id < count; ++id) by_sink_rank[sink_first_rank[id]] = id;
  for (std::size_t c : by_sink_rank) {
    std::uint64_t* row = &reach[c * words];
    for (std::size_t d : class_succ[c]) {
      row[d / 64] |= std::uint64_t{1} << (d % 64);
      const std::uint64_t* sub = &reach[d * words];
      for (std::size_t w = 0; w < words; ++w) row[w] |= sub[w];
    }
  }
  result.precedes = BoolMatrix(count);
  for (std::size_t c = 0; c < count; ++c)
    for (std::size_t d = 0; d < count; ++d)
      if ((reach[c * words + d / 64] >> (d % 64)) & 1U) result.precedes.set(c, d);
  return result;
}

BoolMatrix reachability(const RowMatrix& a) {
  const auto classes = communicating_classes(a);
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<bool> self_loop(n, false);
  for (Eigen::Index r = 0; r < a.outerSize(); ++r)
    for (RowMatrix::InnerIterator it(a, r); it; ++it)
      if (it.col() == r && it.value() > 0.0) self_loop[static_cast<std::size_t>(r)] = true;

  BoolMatrix z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ci = classes.class_of[i];
    const bool cyclic = classes.members[ci].size() > 1 || self_loop[i];
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t cj = classes.class_of[j];
      z.set(i, j, ci == cj ? cyclic : classes.precedes(ci, cj));
    }
  }
  return z;
}

std::complex<double> ClassDecomposition::entry_point(const PolarGrid& grid) const {
  return box_center(grid, entry_states.at(primary_entry).box);
}

ClassDecomposition split_transition_absorbing(const TransitionModel& model,
                                              CommunicatingClasses classes) {
  const std::size_t count = classes.count();
  std::size_t largest = 0;
  for (const auto& m : classes.members) largest = std::max(largest, m.size());
  std::vector<std::size_t> tied;
  for (std::size_t c = 0; c < count; ++c)
    if (classes.members[c].size() == largest) tied.push_back(c);
  if (tied.size() > 1) {
    std::string boxes;
    for (std::size_t c : tied) boxes += " " + std::to_string(model.states()[classes.members[c].front()]);
    throw Error(ErrorCode::DecompositionFailure,
                std::to_string(tied.size()) + " classes tie for largest size " +
                    std::to_string(largest) + " (classes starting at boxes" + boxes + ")");
  }

  ClassDecomposition dec;
  dec.stepping_class = tied.front();
  const std::size_t k_step = dec.stepping_class;
  std::vector<bool> in_f(model.size(), false);
  for (std::size_t c = 0; c < count; ++c) {
    const bool upstream = c == k_step || classes.precedes(c, k_step);
    const bool downstream = classes.precedes(k_step, c);
    if (!upstream && !downstream) {
      throw Error(ErrorCode::DecompositionFailure,
                  "class starting at box " +
                      std::to_string(model.states()[classes.members[c].front()]) +
                      " is incomparable to the stepping class");
    }
    for (std::size_t s : classes.members[c]) in_f[s] = upstream;
  }
  for (std::size_t s = 0; s < model.size(); ++s)
    (in_f[s] ? dec.transition_set : dec.absorbing_set).push_back(s);
  if (dec.absorbing_set.empty())
    throw Error(ErrorCode::EmptyAbsorbingSet, "no class lies downstream of the stepping class");

  const RowMatrix& a = model.matrix();
  std::vector<double> inbound(model.size(), 0.0);
  for (std::size_t i : dec.transition_set) {
    for (RowMatrix::InnerIterator it(a, static_cast<Eigen::Index>(i)); it; ++it) {
      const auto j = static_cast<std::size_t>(it.col());
      if (!in_f[j] && it.value() > 0.0) inbound[j] += it.value();
    }
  }
  for (std::size_t j : dec.absorbing_set) {
    if (inbound[j] > 0.0) dec.entry_states.push_back({j, model.states()[j], inbound[j]});
  }
  for (std::size_t e = 1; e < dec.entry_states.size(); ++e) {
    if (dec.entry_states[e].inbound_mass > dec.entry_states[dec.primary_entry].inbound_mass)
      dec.primary_entry = e;
  }

  const auto& stepping = classes.members[k_step];
  dec.stepping_fraction = static_cast<double>(stepping.size()) / static_cast<double>(model.size());
  for (std::size_t s : stepping) {
    if (a.coeff(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) > 0.0) {
      dec.stepping_has_self_loop = true;
      break;
    }
  }
  dec.in_transition_set = std::move(in_f);
  dec.classes = std::move(classes);
  return dec;
}

ClassDecomposition split_transition_absorbing(const TransitionModel& model) {
  return split_transition_absorbing(model, communicating_classes(model.matrix()));
}

std::vector<SampleTag> label_samples(const ClassDecomposition& dec, const TransitionModel& model,
                                     const EmbeddedSignal& emb, Window window) {
  if (window.end < window.start || window.end >= emb.size())
    throw Error(ErrorCode::InvalidInput, "window outside embedding");
  std::vector<SampleTag> tags;
  tags.reserve(window.length());
  for (std::size_t t = window.start; t <= window.end; ++t) {
    const int box = ind(model.grid(), emb.values[t]).i;
    const auto pos = model.position_of(box);
    if (!pos) throw Error(ErrorCode::InvalidInput, "sample box " + std::to_string(box) + " not in chain");
    tags.push_back(dec.in_transition_set[*pos] ? SampleTag::Transition : SampleTag::Absorbing);
  }
  return tags;
}

std::size_t count_transition_samples(const std::vector<SampleTag>& tags) {
  return static_cast<std::size_t>(std::count(tags.begin(), tags.end(), SampleTag::Transition));
}

}  // namespace escphase
