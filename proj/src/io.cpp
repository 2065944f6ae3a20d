#include "escphase/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "escphase/error.hpp"

namespace escphase::io {
namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_number(const std::string& text, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw Error(ErrorCode::InvalidInput,
                fmt::format("{}:{}: '{}' is not a finite number", path.string(), line, text));
  return v;
}

Json complex_json(std::complex<double> z) {
  Json j;
  j["re"] = z.real();
  j["im"] = z.imag();
  return j;
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

TimeSeries read_series_csv(const std::filesystem::path& path, std::optional<double> dt,
                           std::string subject, std::string dataset) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidInput, path.string() + " is empty");
  const auto header = split(line);
  std::optional<std::size_t> t_col, f_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = lower(header[c]);
    if (name == "t") t_col = c;
    if (name == "force") f_col = c;
  }
  if (!f_col) throw Error(ErrorCode::InvalidInput, path.string() + ": header lacks a 'force' column");

  std::vector<double> times, force;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw Error(ErrorCode::InvalidInput, fmt::format("{}:{}: expected {} columns", path.string(),
                                                       line_no, header.size()));
    force.push_back(parse_number(cells[*f_col], path, line_no));
    if (t_col) times.push_back(parse_number(cells[*t_col], path, line_no));
  }
  if (force.empty()) throw Error(ErrorCode::InvalidInput, path.string() + " has no samples");

  double period = dt.value_or(0.0);
  if (t_col && force.size() >= 2) {
    period = times[1] - times[0];
    for (std::size_t i = 2; i < times.size(); ++i) {
      const double step = times[i] - times[i - 1];
      if (std::abs(step - period) > 1e-6 * std::max(1.0, std::abs(period)))
        throw Error(ErrorCode::InvalidInput,
                    fmt::format("{}: non-uniform sampling at row {}", path.string(), i + 2));
    }
  } else if (!dt) {
    throw Error(ErrorCode::InvalidInput, path.string() + ": no 't' column, dt must be supplied");
  }
  return TimeSeries(std::move(force), period, std::move(subject), std::move(dataset));
}

void write_series_csv(const std::filesystem::path& path, std::span<const double> times,
                      std::span<const double> force) {
  if (times.size() != force.size()) throw Error(ErrorCode::InvalidInput, "column lengths differ");
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "t,force\n";
  for (std::size_t i = 0; i < times.size(); ++i) out << fmt::format("{},{}\n", times[i], force[i]);
}

std::vector<EventSpec> parse_events(const Json& doc) {
  const Json& list = doc.is_object() && doc.contains("events") ? doc.at("events") : doc;
  if (!list.is_array()) throw Error(ErrorCode::InvalidInput, "events must be a JSON list");
  std::vector<EventSpec> events;
  for (const auto& item : list) {
    EventSpec e;
    auto text = [&](const char* key) {
      const auto& v = item.at(key);
      return v.is_string() ? v.get<std::string>() : v.dump();
    };
    try {
      e.subject = text("subject");
      e.dataset = text("dataset");
      const auto start = item.at("t_start").get<long long>();
      const auto end = item.at("t_end").get<long long>();
      if (start < 0 || end <= start)
        throw Error(ErrorCode::InvalidInput, "event needs 0 <= t_start < t_end");
      e.t_start = static_cast<std::size_t>(start);
      e.t_end = static_cast<std::size_t>(end);
      e.label = item.contains("label") ? item.at("label").get<std::string>()
                                       : fmt::format("{}_{}_{}_{}", e.subject, e.dataset, start, end);
    } catch (const Json::exception& ex) {
      throw Error(ErrorCode::InvalidInput, std::string("malformed event: ") + ex.what());
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<EventSpec> read_events(const std::filesystem::path& path) {
  return parse_events(load_json(path));
}

std::string display4(double value) { return fmt::format("{:.4f}", value); }

Json to_json(const EventSpec& event) {
  Json j;
  j["subject"] = event.subject;
  j["dataset"] = event.dataset;
  j["t_start"] = event.t_start;
  j["t_end"] = event.t_end;
  j["label"] = event.label;
  return j;
}

Json to_json(const TransitionModel& model) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["grid"] = {{"P", model.grid().annuli()},
               {"Q", model.grid().cones()},
               {"p", model.grid().radial_size()},
               {"q_degrees", model.grid().angular_size_degrees()}};
  j["support"] = model.support();
  j["dangling"] = model.dangling();
  Json counts = Json::array();
  for (const auto& [key, c] : model.counts().entries()) counts.push_back({key.first, key.second, c});
  j["counts"] = std::move(counts);
  return j;
}

Json to_json(const ClassDecomposition& dec, const TransitionModel& model) {
  Json j;
  Json classes = Json::array();
  for (const auto& members : dec.classes.members) {
    Json boxes = Json::array();
    for (std::size_t s : members) boxes.push_back(model.states()[s]);
    classes.push_back(std::move(boxes));
  }
  j["classes"] = std::move(classes);
  Json edges = Json::array();
  for (const auto& [a, b] : dec.classes.order_edges) edges.push_back({a, b});
  j["order_edges"] = std::move(edges);
  j["stepping_class"] = dec.stepping_class;
  Json f = Json::array(), e = Json::array();
  for (std::size_t s : dec.transition_set) f.push_back(model.states()[s]);
  for (std::size_t s : dec.absorbing_set) e.push_back(model.states()[s]);
  j["transition_set"] = std::move(f);
  j["absorbing_set"] = std::move(e);
  Json entries = Json::array();
  for (const auto& entry : dec.entry_states) {
    const auto c = box_center(model.grid(), entry.box);
    entries.push_back({{"box", entry.box},
                       {"radius", std::abs(c)},
                       {"phase_degrees", box_center_phase_degrees(model.grid(), entry.box)},
                       {"inbound_mass", entry.inbound_mass}});
  }
  j["entry_states"] = std::move(entries);
  return j;
}

Json to_json(const EscapeReport& r) {
  Json j;
  j["met_F_s"] = r.met_f;
  j["mix_F_s"] = r.mix_f;
  j["lambda1"] = r.lambda1;
  j["lambda_dec"] = r.lambda_dec;
  j["i_min"] = r.i_min;
  j["X_min"] = complex_json(r.x_min);
  j["R_min"] = r.r_min;
  j["psi_min_degrees"] = r.psi_min_degrees;
  j["multiple_minima"] = r.multiple_minima;
  j["below_mean_boxes"] = r.below_mean_boxes;
  j["boxes"] = r.boxes;
  j["met_i_s"] = r.met_i;
  j["quasi_stationary"] = r.quasi_stationary;
  j["display"] = {{"met_F_s", display4(r.met_f)},
                  {"mix_F_s", display4(r.mix_f)},
                  {"lambda1", display4(r.lambda1)},
                  {"lambda_dec", display4(r.lambda_dec)},
                  {"psi_min_degrees", display4(r.psi_min_degrees)}};
  return j;
}

Json to_json(const AnalysisRecord& record) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json events = Json::array();
  for (const auto& e : record.events) events.push_back(to_json(e));
  j["events"] = std::move(events);
  j["grid"] = {{"p", record.p}, {"q_degrees", record.q}, {"P", record.annuli}, {"Q", record.cones}};
  j["dt"] = record.dt;
  j["embedding"] = to_string(record.embedding);
  j["status"] = std::string(to_string(record.status));
  j["detail"] = record.detail;
  j["warnings"] = record.warnings;
  j["oscillations"] = record.oscillations;
  if (record.chain) {
    const auto& c = *record.chain;
    j["chain"] = {{"n_states", c.n_states},
                  {"n_support", c.n_support},
                  {"n_dangling", c.n_dangling},
                  {"n_classes", c.n_classes},
                  {"count_total", c.count_total}};
  } else {
    j["chain"] = nullptr;
  }
  if (record.decomposition) {
    const auto& d = *record.decomposition;
    Json entries = Json::array();
    for (const auto& e : d.entry_states)
      entries.push_back({{"box", e.box},
                         {"radius", e.radius},
                         {"phase_degrees", e.phase_degrees},
                         {"inbound_mass", e.inbound_mass}});
    j["decomposition"] = {{"stepping_first_box", d.stepping_first_box},
                          {"stepping_size", d.stepping_size},
                          {"stepping_fraction", d.stepping_fraction},
                          {"stepping_has_self_loop", d.stepping_has_self_loop},
                          {"transition_boxes", d.transition_boxes},
                          {"absorbing_boxes", d.absorbing_boxes},
                          {"entry_states", std::move(entries)},
                          {"i_tr", d.i_tr},
                          {"R_tr", d.r_tr},
                          {"psi_tr_degrees", d.psi_tr_degrees},
                          {"transition_samples", d.transition_samples},
                          {"window_samples", d.window_samples},
                          {"empirical_transition_time_s",
                           static_cast<double>(d.transition_samples) * record.dt}};
  } else {
    j["decomposition"] = nullptr;
  }
  j["escape"] = record.escape ? to_json(*record.escape) : Json(nullptr);
  return j;
}

Json to_json(const CohortSummary& summary) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json rows = Json::array();
  for (const auto& r : summary.rows) {
    rows.push_back({{"subject", r.subject},
                    {"dataset", r.dataset},
                    {"label", r.label},
                    {"status", std::string(to_string(r.status))},
                    {"psi_min_degrees", optional_json(r.psi_min_degrees)},
                    {"met_F_s", optional_json(r.met_f)},
                    {"mix_F_s", optional_json(r.mix_f)}});
  }
  j["rows"] = std::move(rows);
  Json subjects = Json::array();
  for (const auto& s : summary.subjects) {
    subjects.push_back({{"subject", s.subject},
                        {"events", s.events},
                        {"ok_events", s.ok_events},
                        {"circular_mean_degrees", s.circular_mean_degrees},
                        {"circular_std_degrees", s.circular_std_degrees},
                        {"rayleigh_p_extra", s.rayleigh_p}});
  }
  j["subjects"] = std::move(subjects);
  return j;
}

Json records_document(std::span<const AnalysisRecord> records) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json list = Json::array();
  for (const auto& r : records) list.push_back(to_json(r));
  j["records"] = std::move(list);
  return j;
}

std::vector<AnalysisRecord> parse_records(const Json& doc) {
  if (doc.contains("schema_version") && doc.at("schema_version") != kSchemaVersion)
    throw Error(ErrorCode::InvalidInput, "unsupported schema_version " + doc.at("schema_version").dump());
  std::vector<Json> items;
  if (doc.contains("records")) {
    for (const auto& r : doc.at("records")) items.push_back(r);
  } else {
    items.push_back(doc);
  }
  std::vector<AnalysisRecord> out;
  try {
    for (const auto& item : items) {
      AnalysisRecord r;
      r.events = parse_events(item.at("events"));
      r.p = item.at("grid").at("p").get<double>();
      r.q = item.at("grid").at("q_degrees").get<double>();
      r.annuli = item.at("grid").at("P").get<int>();
      r.cones = item.at("grid").at("Q").get<int>();
      r.dt = item.at("dt").get<double>();
      r.embedding = embedding_scope_from_string(item.value("embedding", "window"));
      r.status = status_from_string(item.at("status").get<std::string>());
      r.detail = item.value("detail", "");
      if (item.contains("escape") && !item.at("escape").is_null()) {
        const auto& e = item.at("escape");
        EscapeReport rep;
        rep.met_f = e.at("met_F_s").get<double>();
        rep.mix_f = e.at("mix_F_s").get<double>();
        rep.lambda1 = e.at("lambda1").get<double>();
        rep.lambda_dec = e.at("lambda_dec").get<double>();
        rep.i_min = e.at("i_min").get<int>();
        rep.x_min = {e.at("X_min").at("re").get<double>(), e.at("X_min").at("im").get<double>()};
        rep.r_min = e.at("R_min").get<double>();
        rep.psi_min_degrees = e.at("psi_min_degrees").get<double>();
        rep.multiple_minima = e.at("multiple_minima").get<bool>();
        rep.below_mean_boxes = e.at("below_mean_boxes").get<std::vector<int>>();
        rep.boxes = e.at("boxes").get<std::vector<int>>();
        rep.met_i = e.at("met_i_s").get<std::vector<double>>();
        rep.quasi_stationary = e.at("quasi_stationary").get<std::vector<double>>();
        r.escape = std::move(rep);
      }
      out.push_back(std::move(r));
    }
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::InvalidInput, std::string("malformed record: ") + ex.what());
  }
  return out;
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& ex) {
    throw Error(ErrorCode::InvalidInput, path.string() + ": " + ex.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::string records_csv(std::span<const AnalysisRecord> records) {
  std::string out =
      "subject,dataset,label,t_start,t_end,p,q_degrees,status,met_F_s,mix_F_s,lambda1,lambda_dec,"
      "psi_min_degrees,psi_tr_degrees,transition_samples\n";
  for (const auto& r : records) {
    const EventSpec first = r.events.empty() ? EventSpec{} : r.events.front();
    const bool merged = r.events.size() > 1;
    out += fmt::format("{},{},{},{},{},{},{},{}", first.subject, first.dataset,
                       merged ? "merged" : first.label, first.t_start, first.t_end, r.p, r.q,
                       to_string(r.status));
    if (r.escape) {
      out += fmt::format(",{},{},{},{},{}", r.escape->met_f, r.escape->mix_f, r.escape->lambda1,
                         r.escape->lambda_dec, r.escape->psi_min_degrees);
    } else {
      out += ",,,,,";
    }
    if (r.decomposition) {
      out += fmt::format(",{},{}\n", r.decomposition->psi_tr_degrees, r.decomposition->transition_samples);
    } else {
      out += ",,\n";
    }
  }
  return out;
}

std::string cohort_csv(const CohortSummary& summary) {
  std::string out = "subject,dataset,label,status,psi_min_degrees,met_F_s,mix_F_s\n";
  auto cell = [](const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string{}; };
  for (const auto& r : summary.rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.subject, r.dataset, r.label, to_string(r.status),
                       cell(r.psi_min_degrees), cell(r.met_f), cell(r.mix_f));
  }
  return out;
}

}  // namespace escphase::io
