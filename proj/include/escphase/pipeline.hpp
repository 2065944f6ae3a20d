#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "escphase/escape.hpp"
#include "escphase/signal.hpp"

namespace escphase {

/// One labelled transition interval [t_start, t_end] in sample indices.
struct EventSpec {
  std::string subject;
  std::string dataset;
  std::size_t t_start = 0;
  std::size_t t_end = 0;
  std::string label;

  Window window() const { return {t_start, t_end}; }
  friend bool operator==(const EventSpec&, const EventSpec&) = default;
};

struct SweepSpec {
  std::vector<double> p_values;
  std::vector<double> q_values;  // degrees
  /// (t_start, t_end) variants; the event's own interval when empty.
  std::vector<std::pair<std::size_t, std::size_t>> intervals;

  /// p in {0.05, 0.1, 0.15, 0.2}, q in {3, 5, 10, 15, 20, 30} degrees.
  static SweepSpec default_grid();
};

enum class Status {
  Ok,
  DecompositionFailure,
  EmptyAbsorbingSet,
  InvalidInput,
  NumericalFailure,
};

std::string_view to_string(Status status);
std::string_view to_string(EmbeddingScope scope);
EmbeddingScope embedding_scope_from_string(std::string_view name);
Status status_from_string(std::string_view name);

struct EntryInfo {
  int box = 0;
  double radius = 0.0;
  double phase_degrees = 0.0;
  double inbound_mass = 0.0;
};

struct ChainSummary {
  std::size_t n_states = 0;
  std::size_t n_support = 0;
  std::size_t n_dangling = 0;
  std::size_t n_classes = 0;
  std::int64_t count_total = 0;
};

struct DecompositionSummary {
  int stepping_first_box = 0;
  std::size_t stepping_size = 0;
  double stepping_fraction = 0.0;
  bool stepping_has_self_loop = false;
  std::vector<int> transition_boxes;
  std::vector<int> absorbing_boxes;
  std::vector<EntryInfo> entry_states;
  int i_tr = 0;  // primary entry state
  double r_tr = 0.0;
  double psi_tr_degrees = 0.0;
  std::size_t transition_samples = 0;  // samples whose box lies in F
  std::size_t window_samples = 0;
};

struct AnalysisRecord {
  std::vector<EventSpec> events;  // one for analyze, several when merged
  double p = 0.0;
  double q = 0.0;
  int annuli = 0;
  int cones = 0;
  double dt = 0.0;
  EmbeddingScope embedding = EmbeddingScope::Record;
  Status status = Status::Ok;
  std::string detail;
  std::vector<std::string> warnings;
  double oscillations = 0.0;  // window length times stepping frequency, summed over events
  std::optional<ChainSummary> chain;
  std::optional<DecompositionSummary> decomposition;
  std::optional<EscapeReport> escape;

  bool ok() const { return status == Status::Ok; }
};

struct AnalysisOptions {
  /// Dominant stepping frequency used for the oscillation-count advisory;
  /// estimated from the whole record when absent.
  std::optional<double> stepping_frequency;
  SpectrumOptions spectrum;
  /// Record: analytic signal of the whole record restricted to the window.
  EmbeddingScope embedding = EmbeddingScope::Record;
};

/// Embeds, discretizes, estimates, decomposes and computes escape statistics
/// for one event. Analysis failures are returned as a status.
AnalysisRecord analyze_event(const TimeSeries& ts, const EventSpec& event, double p, double q,
                             const AnalysisOptions& options = {});

/// Each event is embedded on its own window (from its own record); counts are summed before
/// normalization. series[k] holds the record for events[k].
AnalysisRecord merge_events(std::span<const TimeSeries> series, std::span<const EventSpec> events,
                            double p, double q, const AnalysisOptions& options = {});

/// Worker count from ESCPHASE_WORKERS, else hardware concurrency.
std::size_t default_worker_count();

/// One record per (interval, p, q) cell in that nesting order.
/// The stepping frequency is estimated once for all cells unless given.
std::vector<AnalysisRecord> sweep(const TimeSeries& ts, const EventSpec& event,
                                  const SweepSpec& spec, std::size_t workers = 0,
                                  AnalysisOptions options = {});

struct CohortRow {
  std::string subject;
  std::string dataset;
  std::string label;
  Status status = Status::Ok;
  std::optional<double> psi_min_degrees;
  std::optional<double> met_f;
  std::optional<double> mix_f;
};

struct SubjectPhases {
  std::string subject;
  std::size_t events = 0;        // all records
  std::size_t ok_events = 0;
  double circular_mean_degrees = 0.0;
  double circular_std_degrees = 0.0;
  double rayleigh_p = 1.0;       // beyond the method itself: uniformity test
};

struct CohortSummary {
  std::vector<CohortRow> rows;
  std::vector<SubjectPhases> subjects;  // ascending by subject
};

/// Throws NoSuccessfulRecords when no record is ok.
CohortSummary cohort_summary(std::span<const AnalysisRecord> records);

/// 0 when every record is ok, 2 for partial failure, 3 when none is ok.
int exit_code_for(std::span<const AnalysisRecord> records);

}  // namespace escphase
