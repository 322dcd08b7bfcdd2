#pragma once

#include "coxsel/pipelines.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace coxsel {

/// One rendered report field; "NA" marks a field that does not apply.
struct ReportField {
    std::string key;
    std::string value;
};

/// Flat view of a report, covariates named via `names`. The CSV, the human
/// table and the JSON record are all built from this list.
std::vector<ReportField> report_fields(const InferenceReport& report, const std::vector<std::string>& names);

/// Column names joined with ';', "(none)" for the empty set.
std::string join_names(const ColumnSet& columns, const std::vector<std::string>& names);

/// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& resolved);

/// Header line carried by every CSV output.
std::string hash_line(const std::string& hash);

void write_reports_csv(std::ostream& out, const std::vector<InferenceReport>& reports,
                       const std::vector<std::string>& names);
void write_reports_table(std::ostream& out, const std::vector<InferenceReport>& reports,
                         const std::vector<std::string>& names);
nlohmann::json reports_json(const std::vector<InferenceReport>& reports, const std::vector<std::string>& names);

/// method, step, lambda, count, columns; one row per selection step.
void write_selection_trace(std::ostream& out, const std::vector<InferenceReport>& reports,
                           const std::vector<std::string>& names);

}  // namespace coxsel
