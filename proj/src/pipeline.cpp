#include "escphase/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <thread>

#include "escphase/classes.hpp"
#include "escphase/error.hpp"
#include "escphase/markov.hpp"
#include "escphase/stats.hpp"

namespace escphase {
namespace {

struct EmbeddedEvent {
  EmbeddedSignal embedding;
  Window window;  // whole embedding
};

Status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::DecompositionFailure: return Status::DecompositionFailure;
    case ErrorCode::EmptyAbsorbingSet: return Status::EmptyAbsorbingSet;
    case ErrorCode::SingularSystem:
    case ErrorCode::ConvergenceFailure: return Status::NumericalFailure;
    default: return Status::InvalidInput;
  }
}

void add_oscillation_advisory(AnalysisRecord& record, const EventSpec& event, double oscillations) {
  const std::string where = fmt::format("event {}/{} [{},{}]", event.subject, event.dataset,
                                        event.t_start, event.t_end);
  if (oscillations < 2.0) {
    record.warnings.push_back(fmt::format(
        "{} spans only {:.1f} stepping oscillations (< 2); decomposition is unreliable", where,
        oscillations));
  } else if (oscillations < 4.0) {
    record.warnings.push_back(
        fmt::format("{} spans {:.1f} stepping oscillations (< 4)", where, oscillations));
  }
}

AnalysisRecord analyze_windows(std::span<const TimeSeries* const> series,
                               std::span<const EventSpec> events, double p, double q,
                               const AnalysisOptions& options) {
  AnalysisRecord record;
  record.events.assign(events.begin(), events.end());
  record.p = p;
  record.q = q;
  record.embedding = options.embedding;
  try {
    if (events.empty()) throw Error(ErrorCode::InvalidInput, "no events");
    const PolarGrid grid = PolarGrid::from_box_sizes(p, q);
    record.annuli = grid.annuli();
    record.cones = grid.cones();
    if (std::abs(360.0 / q - std::round(360.0 / q)) > 1e-9)
      record.warnings.push_back(fmt::format("q = {} does not divide 360 degrees; using Q = {}", q,
                                            grid.cones()));
    record.dt = series.front()->dt();

    std::vector<EmbeddedEvent> embedded;
    TransitionCounts counts(grid);
    for (std::size_t e = 0; e < events.size(); ++e) {
      const TimeSeries& ts = *series[e];
      const EventSpec& event = events[e];
      if (ts.dt() != record.dt)
        throw Error(ErrorCode::InvalidInput, "merged records must share the sample period");
      if (event.t_end <= event.t_start || event.t_end >= ts.size())
        throw Error(ErrorCode::InvalidInput,
                    fmt::format("window [{},{}] outside record of {} samples", event.t_start,
                                event.t_end, ts.size()));
      const double f_stp = options.stepping_frequency ? *options.stepping_frequency
                                                      : power_spectrum(ts).dominant_frequency;
      const double oscillations =
          static_cast<double>(event.t_end - event.t_start) * ts.dt() * f_stp;
      record.oscillations += oscillations;
      add_oscillation_advisory(record, event, oscillations);

      EmbeddedEvent ev{hilbert_embed(ts, event.window(), options.embedding), {}};
      ev.window = Window{0, ev.embedding.size() - 1};
      counts += count_transitions(grid, ev.embedding, ev.window);
      embedded.push_back(std::move(ev));
    }

    const TransitionModel model = transition_matrix(counts);
    CommunicatingClasses classes = communicating_classes(model.matrix());
    record.chain = ChainSummary{model.size(), model.support().size(), model.dangling().size(),
                                classes.count(), counts.total()};

    const ClassDecomposition dec = split_transition_absorbing(model, std::move(classes));
    DecompositionSummary summary;
    const auto& stepping = dec.classes.members[dec.stepping_class];
    summary.stepping_first_box = model.states()[stepping.front()];
    summary.stepping_size = stepping.size();
    summary.stepping_fraction = dec.stepping_fraction;
    summary.stepping_has_self_loop = dec.stepping_has_self_loop;
    for (std::size_t s : dec.transition_set) summary.transition_boxes.push_back(model.states()[s]);
    for (std::size_t s : dec.absorbing_set) summary.absorbing_boxes.push_back(model.states()[s]);
    for (const auto& entry : dec.entry_states) {
      const auto center = box_center(grid, entry.box);
      summary.entry_states.push_back(
          {entry.box, std::abs(center), box_center_phase_degrees(grid, entry.box), entry.inbound_mass});
    }
    const EntryInfo& primary = summary.entry_states.at(dec.primary_entry);
    summary.i_tr = primary.box;
    summary.r_tr = primary.radius;
    summary.psi_tr_degrees = primary.phase_degrees;
    for (const auto& ev : embedded) {
      const auto tags = label_samples(dec, model, ev.embedding, ev.window);
      summary.transition_samples += count_transition_samples(tags);
      summary.window_samples += tags.size();
    }
    record.decomposition = std::move(summary);

    if (!dec.stepping_has_self_loop)
      record.warnings.push_back("no stepping-class box has a self-loop; the chain may be periodic");
    if (dec.entry_states.size() > 1)
      record.warnings.push_back(fmt::format(
          "{} entry states into the absorbing set; psi_tr uses the one with most inbound mass",
          dec.entry_states.size()));

    record.escape = analyze_escape(model, dec, record.dt, options.spectrum);
    if (record.escape->multiple_minima)
      record.warnings.push_back("MultipleMinima: several boxes share the minimal escape time");
    record.status = Status::Ok;
  } catch (const Error& err) {
    record.status = status_for(err.code());
    record.detail = err.what();
    record.escape.reset();
    if (record.status != Status::NumericalFailure) record.decomposition.reset();
  }
  return record;
}

}  // namespace

SweepSpec SweepSpec::default_grid() {
  return {{0.05, 0.1, 0.15, 0.2}, {3.0, 5.0, 10.0, 15.0, 20.0, 30.0}, {}};
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Ok: return "ok";
    case Status::DecompositionFailure: return "DecompositionFailure";
    case Status::EmptyAbsorbingSet: return "EmptyAbsorbingSet";
    case Status::InvalidInput: return "InvalidInput";
    case Status::NumericalFailure: return "NumericalFailure";
  }
  return "unknown";
}

Status status_from_string(std::string_view name) {
  for (Status s : {Status::Ok, Status::DecompositionFailure, Status::EmptyAbsorbingSet,
                   Status::InvalidInput, Status::NumericalFailure}) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorCode::InvalidInput, "unknown status " + std::string(name));
}

std::string_view to_string(EmbeddingScope scope) {
  return scope == EmbeddingScope::Window ? "window" : "record";
}

EmbeddingScope embedding_scope_from_string(std::string_view name) {
  if (name == "window") return EmbeddingScope::Window;
  if (name == "record") return EmbeddingScope::Record;
  throw Error(ErrorCode::InvalidInput, "unknown embedding scope " + std::string(name));
}

AnalysisRecord analyze_event(const TimeSeries& ts, const EventSpec& event, double p, double q,
                             const AnalysisOptions& options) {
  const TimeSeries* series[] = {&ts};
  return analyze_windows(series, std::span(&event, 1), p, q, options);
}

AnalysisRecord merge_events(std::span<const TimeSeries> series, std::span<const EventSpec> events,
                            double p, double q, const AnalysisOptions& options) {
  if (series.size() != events.size())
    throw Error(ErrorCode::InvalidInput, "one time series per event is required");
  std::vector<const TimeSeries*> pointers;
  for (const auto& ts : series) pointers.push_back(&ts);
  return analyze_windows(pointers, events, p, q, options);
}

std::size_t default_worker_count() {
  if (const char* env = std::getenv("ESCPHASE_WORKERS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<std::size_t>(n);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<AnalysisRecord> sweep(const TimeSeries& ts, const EventSpec& event,
                                  const SweepSpec& spec, std::size_t workers,
                                  AnalysisOptions options) {
  if (spec.p_values.empty() || spec.q_values.empty())
    throw Error(ErrorCode::InvalidInput, "sweep needs at least one p and one q");
  std::vector<EventSpec> variants;
  if (spec.intervals.empty()) {
    variants.push_back(event);
  } else {
    for (const auto& [start, end] : spec.intervals) {
      EventSpec v = event;
      v.t_start = start;
      v.t_end = end;
      variants.push_back(v);
    }
  }
  struct Cell {
    std::size_t variant;
    double p;
    double q;
  };
  std::vector<Cell> cells;
  for (std::size_t v = 0; v < variants.size(); ++v)
    for (double p : spec.p_values)
      for (double q : spec.q_values) cells.push_back({v, p, q});

  if (!options.stepping_frequency) options.stepping_frequency = power_spectrum(ts).dominant_frequency;

  std::vector<AnalysisRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      records[c] = analyze_event(ts, variants[cells[c].variant], cells[c].p, cells[c].q, options);
    }
  };
  const std::size_t n_threads = std::min(cells.size(), workers == 0 ? default_worker_count() : workers);
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  return records;
}

CohortSummary cohort_summary(std::span<const AnalysisRecord> records) {
  CohortSummary summary;
  std::map<std::string, std::vector<double>> phases;
  std::map<std::string, std::size_t> totals;
  for (const auto& r : records) {
    CohortRow row;
    if (!r.events.empty()) {
      row.subject = r.events.front().subject;
      row.dataset = r.events.front().dataset;
      row.label = r.events.size() > 1 ? "merged" : r.events.front().label;
    }
    row.status = r.status;
    ++totals[row.subject];
    if (r.ok() && r.escape) {
      row.psi_min_degrees = r.escape->psi_min_degrees;
      row.met_f = r.escape->met_f;
      row.mix_f = r.escape->mix_f;
      phases[row.subject].push_back(r.escape->psi_min_degrees);
    }
    summary.rows.push_back(std::move(row));
  }
  if (phases.empty()) throw Error(ErrorCode::NoSuccessfulRecords, "no record has status ok");
  for (const auto& [subject, total] : totals) {
    SubjectPhases s;
    s.subject = subject;
    s.events = total;
    const auto it = phases.find(subject);
    if (it != phases.end()) {
      const auto circ = stats::circular_summary_degrees(it->second);
      s.ok_events = it->second.size();
      s.circular_mean_degrees = circ.mean_degrees;
      s.circular_std_degrees = circ.std_degrees;
      s.rayleigh_p = circ.rayleigh_p;
    }
    summary.subjects.push_back(std::move(s));
  }
  return summary;
}

int exit_code_for(std::span<const AnalysisRecord> records) {
  const auto ok = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.ok(); });
  if (records.empty() || ok == 0) return 3;
  return ok == static_cast<std::ptrdiff_t>(records.size()) ? 0 : 2;
}

}  // namespace escphase
