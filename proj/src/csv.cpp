#include "coxsel/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace coxsel {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Splits one record; fields may be double-quoted with "" as an escaped quote.
std::vector<std::string> split_record(const std::string& line, char delimiter, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && trim(cur).empty()) {
            quoted = true;
            was_quoted = true;
            cur.clear();
        } else if (c == delimiter) {
            fields.push_back(was_quoted ? cur : trim(cur));
            cur.clear();
            was_quoted = false;
        } else {
            cur += c;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field on line " + std::to_string(line_no), line_no, fields.size() + 1);
    fields.push_back(was_quoted ? cur : trim(cur));
    return fields;
}

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == ".";
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError("column '" + name + "' not found in CSV header");
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv_table(std::istream& in, char delimiter) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto fields = split_record(line, delimiter, line_no);
        if (!have_header) {
            table.header = std::move(fields);
            std::set<std::string> seen;
            for (const auto& h : table.header) {
                if (h.empty()) throw SchemaError("empty column name in CSV header");
                if (!seen.insert(h).second) throw SchemaError("duplicate column '" + h + "' in CSV header");
            }
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size())
            throw ParseError("line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                                 " fields, header has " + std::to_string(table.header.size()),
                             line_no, std::min(fields.size(), table.header.size()) + 1);
        table.rows.push_back(std::move(fields));
        table.lines.push_back(line_no);
    }
    if (!have_header) throw SchemaError("CSV input is empty (header row required)");
    return table;
}

double parse_number(const std::string& cell, std::size_t line, std::size_t column) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (first != last && *first == '+') ++first;
    double value = 0;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last)
        throw ParseError("non-numeric value '" + cell + "' at line " + std::to_string(line) + ", column " +
                             std::to_string(column),
                         line, column);
    return value;
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw Error("format_double: conversion failed");
    return std::string(buf, ptr);
}

SurvivalData<double> ingest_csv(std::istream& in, const CsvSchema& schema) {
    const CsvTable table = read_csv_table(in, schema.delimiter);
    if (schema.time.empty() || schema.status.empty() || schema.exposure.empty())
        throw SchemaError("schema must name the time, status and exposure columns");
    const std::size_t c_time = table.column(schema.time);
    const std::size_t c_status = table.column(schema.status);
    const std::size_t c_exposure = table.column(schema.exposure);

    std::vector<std::string> covariates = schema.covariates;
    if (schema.all_other_columns) {
        if (!covariates.empty()) throw ConfigError("give either a covariate list or all-other-columns, not both");
        for (const auto& h : table.header)
            if (h != schema.time && h != schema.status && h != schema.exposure) covariates.push_back(h);
    }
    for (const auto& name : schema.categorical)
        if (std::find(covariates.begin(), covariates.end(), name) == covariates.end())
            throw SchemaError("categorical column '" + name + "' is not among the covariates");
    {
        std::set<std::string> seen;
        for (const auto& name : covariates) {
            if (name == schema.time || name == schema.status || name == schema.exposure)
                throw SchemaError("column '" + name + "' cannot be both a covariate and a survival field");
            if (!seen.insert(name).second) throw SchemaError("covariate '" + name + "' listed twice");
        }
    }

    const auto n = static_cast<Index>(table.rows.size());
    auto cell = [&](Index r, std::size_t c) -> const std::string& {
        const std::string& v = table.rows[static_cast<std::size_t>(r)][c];
        if (is_missing(v))
            throw ValidationError("missing value in column '" + table.header[c] + "' at line " +
                                  std::to_string(table.lines[static_cast<std::size_t>(r)]));
        return v;
    };
    auto number = [&](Index r, std::size_t c) {
        return parse_number(cell(r, c), table.lines[static_cast<std::size_t>(r)], c + 1);
    };

    SurvivalData<double> data;
    data.time.resize(n);
    data.status.resize(n);
    data.exposure.resize(n);
    for (Index r = 0; r < n; ++r) {
        data.time(r) = number(r, c_time);
        const double s = number(r, c_status);
        if (s != 0.0 && s != 1.0)
            throw ValidationError("status must be 0 or 1 at line " + std::to_string(table.lines[static_cast<std::size_t>(r)]));
        data.status(r) = static_cast<int>(s);
        data.exposure(r) = number(r, c_exposure);
    }

    std::vector<Vec<double>> columns;
    for (const auto& name : covariates) {
        const std::size_t c = table.column(name);
        const bool categorical =
            std::find(schema.categorical.begin(), schema.categorical.end(), name) != schema.categorical.end();
        if (!categorical) {
            Vec<double> col(n);
            for (Index r = 0; r < n; ++r) col(r) = number(r, c);
            columns.push_back(std::move(col));
            data.covariate_names.push_back(name);
            continue;
        }
        std::set<std::string> levels;
        for (Index r = 0; r < n; ++r) levels.insert(cell(r, c));
        auto it = levels.begin();
        if (it != levels.end()) ++it;  // first level is the reference
        for (; it != levels.end(); ++it) {
            Vec<double> col(n);
            for (Index r = 0; r < n; ++r) col(r) = table.rows[static_cast<std::size_t>(r)][c] == *it ? 1.0 : 0.0;
            columns.push_back(std::move(col));
            data.covariate_names.push_back(name + "=" + *it);
        }
    }
    data.covariates.resize(n, static_cast<Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) data.covariates.col(static_cast<Index>(j)) = columns[j];
    data.exposure_name = schema.exposure;
    data.tau = schema.tau;
    validate(data);
    return data;
}

SurvivalData<double> ingest_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open input file '" + path + "'");
    return ingest_csv(in, schema);
}

void write_csv(std::ostream& out, const SurvivalData<double>& data, const std::string& time_name,
               const std::string& status_name, char delimiter) {
    out << time_name << delimiter << status_name << delimiter << data.exposure_name;
    for (const auto& name : data.covariate_names) out << delimiter << name;
    out << '\n';
    for (Index i = 0; i < data.n(); ++i) {
        out << format_double(data.time(i)) << delimiter << data.status(i) << delimiter
            << format_double(data.exposure(i));
        for (Index j = 0; j < data.p(); ++j) out << delimiter << format_double(data.covariates(i, j));
        out << '\n';
    }
}

}  // namespace coxsel
