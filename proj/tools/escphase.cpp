#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "escphase/error.hpp"
#include "escphase/io.hpp"
#include "escphase/markov.hpp"
#include "escphase/nullmodel.hpp"
#include "escphase/pipeline.hpp"
#include "escphase/stats.hpp"

namespace fs = std::filesystem;
using namespace escphase;

namespace {

constexpr int kUsageOrIo = 1;

struct DataOptions {
  std::string data;
  std::string data_dir;
  std::string events;
  std::optional<double> dt;
  std::string subject = "subject";
  std::string dataset = "1";
  std::optional<std::size_t> t_start;
  std::optional<std::size_t> t_end;
};

struct AnalysisFlags {
  std::string embedding = "record";
  AnalysisOptions options() const {
    AnalysisOptions o;
    o.embedding = embedding_scope_from_string(embedding);
    return o;
  }
};

void add_analysis_flags(CLI::App& cmd, AnalysisFlags& a) {
  cmd.add_option("--embed-scope", a.embedding,
                 "Analytic signal from the window only, or from the whole record restricted to the window")
      ->check(CLI::IsMember({"window", "record"}));
}

struct OutputOptions {
  std::string out;
  std::string format = "json";
};

void add_data_options(CLI::App& cmd, DataOptions& d) {
  cmd.add_option("--data", d.data, "Force record CSV (t,force or force)");
  cmd.add_option("--data-dir", d.data_dir, "Directory holding <subject>_<dataset>.csv records");
  cmd.add_option("--events", d.events, "Event annotation JSON");
  cmd.add_option("--dt", d.dt, "Sample period in seconds (required without a t column)");
  cmd.add_option("--subject", d.subject, "Subject id for --data");
  cmd.add_option("--dataset", d.dataset, "Dataset id for --data");
  cmd.add_option("--t-start", d.t_start, "Window start sample for --data");
  cmd.add_option("--t-end", d.t_end, "Window end sample for --data");
}

void add_output_options(CLI::App& cmd, OutputOptions& o) {
  cmd.add_option("--out", o.out, "Output directory (stdout when omitted)");
  cmd.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
}

struct Job {
  TimeSeries series;
  EventSpec event;
};

TimeSeries load_series(const DataOptions& d, const std::string& subject, const std::string& dataset) {
  fs::path path;
  if (!d.data.empty()) {
    path = d.data;
  } else if (!d.data_dir.empty()) {
    path = fs::path(d.data_dir) / fmt::format("{}_{}.csv", subject, dataset);
  } else {
    throw Error(ErrorCode::InvalidInput, "either --data or --data-dir is required");
  }
  return io::read_series_csv(path, d.dt, subject, dataset);
}

// Events from --events (records resolved via --data-dir or --data) or one
// window given on the command line.
std::vector<Job> load_jobs(const DataOptions& d) {
  std::vector<Job> jobs;
  if (!d.events.empty()) {
    std::map<std::pair<std::string, std::string>, TimeSeries> cache;
    for (const auto& ev : io::read_events(d.events)) {
      const auto key = std::make_pair(ev.subject, ev.dataset);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, load_series(d, ev.subject, ev.dataset)).first;
      jobs.push_back({it->second, ev});
    }
    if (jobs.empty()) throw Error(ErrorCode::InvalidInput, "event file lists no events");
    return jobs;
  }
  if (d.data.empty()) throw Error(ErrorCode::InvalidInput, "--data or --events is required");
  auto ts = load_series(d, d.subject, d.dataset);
  EventSpec ev;
  ev.subject = d.subject;
  ev.dataset = d.dataset;
  ev.t_start = d.t_start.value_or(0);
  ev.t_end = d.t_end.value_or(ts.size() - 1);
  ev.label = fmt::format("{}_{}_{}_{}", ev.subject, ev.dataset, ev.t_start, ev.t_end);
  jobs.push_back({std::move(ts), ev});
  return jobs;
}

void emit(const OutputOptions& o, const std::string& stem, const std::string& json_text,
          const std::string& csv_text) {
  const bool csv = o.format == "csv";
  const std::string& body = csv ? csv_text : json_text;
  if (o.out.empty()) {
    std::cout << body;
    return;
  }
  fs::create_directories(o.out);
  const fs::path path = fs::path(o.out) / (stem + (csv ? ".csv" : ".json"));
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::Io, "cannot write " + path.string());
  file << body;
  std::cerr << "wrote " << path.string() << '\n';
}

int emit_records(const OutputOptions& o, const std::string& stem,
                 const std::vector<AnalysisRecord>& records) {
  emit(o, stem, io::records_document(records).dump(2) + "\n", io::records_csv(records));
  for (const auto& r : records)
    if (!r.ok()) std::cerr << fmt::format("{}: {} ({})\n", r.events.front().label, to_string(r.status), r.detail);
  return exit_code_for(records);
}

std::pair<std::size_t, std::size_t> parse_interval(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::InvalidInput, "interval must be START:END, got " + text);
  return {std::stoul(text.substr(0, colon)), std::stoul(text.substr(colon + 1))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preferred escape phases from stepping force records"};
  app.require_subcommand(1);

  DataOptions data;
  OutputOptions output;
  AnalysisFlags flags;
  double p = 0.1, q = 5.0;

  auto* analyze = app.add_subcommand("analyze", "Analyze one event (or every event of --events)");
  add_data_options(*analyze, data);
  add_output_options(*analyze, output);
  add_analysis_flags(*analyze, flags);
  analyze->add_option("--p", p, "Radial box size");
  analyze->add_option("--q", q, "Angular box size in degrees");

  std::vector<double> p_values, q_values;
  std::vector<std::string> intervals;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep box sizes and transition intervals");
  add_data_options(*sweep_cmd, data);
  add_output_options(*sweep_cmd, output);
  add_analysis_flags(*sweep_cmd, flags);
  sweep_cmd->add_option("--p", p_values, "Radial box sizes (default 0.05 0.1 0.15 0.2)");
  sweep_cmd->add_option("--q", q_values, "Angular box sizes in degrees (default 3 5 10 15 20 30)");
  sweep_cmd->add_option("--interval", intervals, "Transition interval START:END (repeatable)");

  auto* merge = app.add_subcommand("merge", "Analyze the summed counts of several events");
  add_data_options(*merge, data);
  add_output_options(*merge, output);
  add_analysis_flags(*merge, flags);
  merge->add_option("--p", p, "Radial box size");
  merge->add_option("--q", q, "Angular box size in degrees");

  std::vector<std::string> reports;
  auto* cohort = app.add_subcommand("cohort", "Per-subject table of preferred phases");
  cohort->add_option("--in", reports, "Analysis report JSON files")->required();
  add_output_options(*cohort, output);

  HopfParams hopf;
  SimulationOptions sim;
  std::string form = "cartesian";
  std::size_t ensemble = 0;
  double escape_radius = 0.5, budget = 2000.0;
  auto* simulate = app.add_subcommand("simulate", "Null-model path (t,force = y1) or escape ensemble");
  simulate->add_option("--beta", hopf.beta);
  simulate->add_option("--omega", hopf.omega, "Rotation frequency in Hz");
  simulate->add_option("--sigma", hopf.sigma);
  simulate->add_option("--dt-sim", hopf.dt_sim, "Integrator step");
  simulate->add_option("--seed", hopf.seed);
  simulate->add_option("--duration", sim.duration, "Simulated time");
  simulate->add_option("--stride", sim.record_stride, "Record every n-th step");
  simulate->add_option("--form", form)->check(CLI::IsMember({"cartesian", "polar"}));
  simulate->add_option("--ensemble", ensemble, "Number of escape paths instead of one path");
  simulate->add_option("--escape-radius", escape_radius);
  simulate->add_option("--time-budget", budget, "Per-path time limit for --ensemble");
  simulate->add_option("--out", output.out, "Output directory (stdout when omitted)");

  std::optional<int> start_box;
  std::size_t steps = 1000;
  std::uint64_t seed = 1;
  auto* surrogate_cmd = app.add_subcommand("surrogate", "Random walk on the estimated chain");
  add_data_options(*surrogate_cmd, data);
  add_analysis_flags(*surrogate_cmd, flags);
  surrogate_cmd->add_option("--p", p, "Radial box size");
  surrogate_cmd->add_option("--q", q, "Angular box size in degrees");
  surrogate_cmd->add_option("--start", start_box, "Start box (default: first box of the window)");
  surrogate_cmd->add_option("--steps", steps);
  surrogate_cmd->add_option("--seed", seed);
  surrogate_cmd->add_option("--out", output.out, "Output directory (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageOrIo;
  }

  try {
    if (*analyze) {
      std::vector<AnalysisRecord> records;
      for (const auto& job : load_jobs(data)) records.push_back(analyze_event(job.series, job.event, p, q, flags.options()));
      return emit_records(output, "analysis", records);
    }
    if (*sweep_cmd) {
      SweepSpec spec = SweepSpec::default_grid();
      if (!p_values.empty()) spec.p_values = p_values;
      if (!q_values.empty()) spec.q_values = q_values;
      for (const auto& text : intervals) spec.intervals.push_back(parse_interval(text));
      std::vector<AnalysisRecord> records;
      for (const auto& job : load_jobs(data)) {
        auto cells = sweep(job.series, job.event, spec, default_worker_count(), flags.options());
        records.insert(records.end(), cells.begin(), cells.end());
      }
      return emit_records(output, "sweep", records);
    }
    if (*merge) {
      const auto jobs = load_jobs(data);
      std::vector<TimeSeries> series;
      std::vector<EventSpec> events;
      for (const auto& job : jobs) {
        series.push_back(job.series);
        events.push_back(job.event);
      }
      return emit_records(output, "merged", {merge_events(series, events, p, q, flags.options())});
    }
    if (*cohort) {
      std::vector<AnalysisRecord> records;
      for (const auto& path : reports) {
        auto part = io::parse_records(io::load_json(path));
        records.insert(records.end(), part.begin(), part.end());
      }
      const auto summary = cohort_summary(records);
      emit(output, "cohort", io::to_json(summary).dump(2) + "\n", io::cohort_csv(summary));
      return exit_code_for(records);
    }
    if (*simulate) {
      if (ensemble > 0) {
        const auto ens = escape_phase_ensemble(hopf, ensemble, escape_radius, budget);
        io::Json j;
        j["schema_version"] = io::kSchemaVersion;
        j["params"] = {{"beta", hopf.beta}, {"omega", hopf.omega}, {"sigma", hopf.sigma},
                       {"dt_sim", hopf.dt_sim}, {"seed", hopf.seed}};
        j["escape_radius"] = escape_radius;
        j["paths"] = ensemble;
        j["no_escape"] = ens.no_escape_count;
        j["phases_rad"] = ens.phases;
        j["times_s"] = ens.times;
        if (ens.phases.size() >= 12) {
          const auto chi = stats::chi_square_uniform(ens.phases, 12);
          j["chi_square_12_bins"] = {{"statistic", chi.statistic}, {"dof", chi.dof}, {"p_value", chi.p_value}};
        }
        output.format = "json";
        emit(output, "ensemble", j.dump(2) + "\n", {});
        return ens.phases.empty() ? 3 : 0;
      }
      const auto path = form == "polar" ? simulate_polar(hopf, sim) : simulate_cartesian(hopf, sim);
      std::vector<double> force(path.size());
      for (std::size_t t = 0; t < path.size(); ++t)
        force[t] = form == "polar" ? path.first[t] * std::cos(path.second[t]) : path.first[t];
      if (output.out.empty()) {
        std::string text = "t,force\n";
        for (std::size_t t = 0; t < path.size(); ++t) text += fmt::format("{},{}\n", path.times[t], force[t]);
        std::cout << text;
      } else {
        fs::create_directories(output.out);
        const auto file = fs::path(output.out) / "simulation.csv";
        io::write_series_csv(file, path.times, force);
        std::cerr << "wrote " << file.string() << '\n';
      }
      return 0;
    }
    if (*surrogate_cmd) {
      const auto jobs = load_jobs(data);
      const auto& job = jobs.front();
      const auto grid = PolarGrid::from_box_sizes(p, q);
      const auto emb = hilbert_embed(job.series, job.event.window(), flags.options().embedding);
      const auto model = transition_matrix(count_transitions(grid, emb));
      const int start = start_box.value_or(ind(grid, emb.values.front()).i);
      const auto walk = surrogate(model, start, steps, seed);
      std::string text = "step,box,re,im\n";
      for (std::size_t s = 0; s < walk.size(); ++s) {
        const auto c = box_center(grid, walk[s]);
        text += fmt::format("{},{},{},{}\n", s, walk[s], c.real(), c.imag());
      }
      output.format = "csv";
      emit(output, "surrogate", {}, text);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "escphase: " << e.what() << '\n';
    const bool total_failure = e.code() == ErrorCode::NoSuccessfulRecords;
    return total_failure ? 3 : kUsageOrIo;
  } catch (const std::exception& e) {
    std::cerr << "escphase: " << e.what() << '\n';
    return kUsageOrIo;
  }
  return kUsageOrIo;
}
