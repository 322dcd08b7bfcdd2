#pragma once

#include "coxsel/survival_data.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace coxsel {

/// Column mapping for ingest_csv. Covariates are either listed or taken as
/// every column not named elsewhere. Categorical columns are expanded to
/// indicator columns "name=level" for each level except the first in
/// lexicographic order.
struct CsvSchema {
    std::string time;
    std::string status;
    std::string exposure;
    std::vector<std::string> covariates;
    bool all_other_columns = false;
    std::vector<std::string> categorical;
    char delimiter = ',';
    double tau = infinity<double>;
};

/// Raw cells with 1-based source line numbers.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;

    /// Index of a header name; SchemaError if absent.
    std::size_t column(const std::string& name) const;
};

CsvTable read_csv_table(std::istream& in, char delimiter = ',');

SurvivalData<double> ingest_csv(std::istream& in, const CsvSchema& schema);
SurvivalData<double> ingest_csv(const std::string& path, const CsvSchema& schema);

/// Strict numeric parse of one cell; ParseError carries line and column.
double parse_number(const std::string& cell, std::size_t line, std::size_t column);

/// Shortest text that parses back to the same double.
std::string format_double(double value);

/// Writes time, status, exposure and covariates with a header row.
void write_csv(std::ostream& out, const SurvivalData<double>& data, const std::string& time_name = "time",
               const std::string& status_name = "status", char delimiter = ',');

}  // namespace coxsel
