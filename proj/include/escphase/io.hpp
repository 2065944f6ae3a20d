#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "escphase/classes.hpp"
#include "escphase/markov.hpp"
#include "escphase/nullmodel.hpp"
#include "escphase/pipeline.hpp"
#include "escphase/signal.hpp"

namespace escphase::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

/// Reads `t,force` or `force` CSV with one header row. With a `t` column the
/// sample period comes from the first two rows and must be uniform; otherwise
/// `dt` is required.
TimeSeries read_series_csv(const std::filesystem::path& path, std::optional<double> dt = {},
                           std::string subject = {}, std::string dataset = {});

/// Writes `t,force` rows at full precision.
void write_series_csv(const std::filesystem::path& path, std::span<const double> times,
                      std::span<const double> force);

/// Annotation list: [{subject, dataset, t_start, t_end[, label]}, ...].
std::vector<EventSpec> read_events(const std::filesystem::path& path);
std::vector<EventSpec> parse_events(const Json& doc);

/// Fixed-point text with four decimals, matching reported precision.
std::string display4(double value);

Json to_json(const EventSpec& event);
Json to_json(const TransitionModel& model);
Json to_json(const ClassDecomposition& dec, const TransitionModel& model);
Json to_json(const EscapeReport& report);
Json to_json(const AnalysisRecord& record);
Json to_json(const CohortSummary& summary);
Json records_document(std::span<const AnalysisRecord> records);

/// Reads records back from a document written by records_document or a
/// single record object (only fields needed for cohort tables are restored).
std::vector<AnalysisRecord> parse_records(const Json& doc);

Json load_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& doc);

/// Flat CSV table, one row per record.
std::string records_csv(std::span<const AnalysisRecord> records);
std::string cohort_csv(const CohortSummary& summary);

}  // namespace escphase::io
