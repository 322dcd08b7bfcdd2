#include "coxsel/report.hpp"

#include "coxsel/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <ostream>

namespace coxsel {

namespace {

const std::string kNotApplicable = "NA";

std::string num(double v) { return format_double(v); }

std::string num(const std::optional<double>& v) { return v ? format_double(*v) : kNotApplicable; }

std::string names_or_na(const std::optional<ColumnSet>& s, const std::vector<std::string>& names) {
    return s ? join_names(*s, names) : kNotApplicable;
}

std::string csv_cell(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

}  // namespace

std::string join_names(const ColumnSet& columns, const std::vector<std::string>& names) {
    if (columns.empty()) return "(none)";
    std::string out;
    for (Index j : columns) {
        if (!out.empty()) out += ';';
        const auto k = static_cast<std::size_t>(j);
        out += k < names.size() ? names[k] : "L" + std::to_string(j + 1);
    }
    return out;
}

std::vector<ReportField> report_fields(const InferenceReport& r, const std::vector<std::string>& names) {
    const auto& s = r.selection;
    std::string notes;
    for (const auto& n : r.notes) notes += (notes.empty() ? "" : "; ") + n;
    return {
        {"method", to_string(r.method)},
        {"estimate", num(r.estimate)},
        {"se", num(r.se)},
        {"z", num(r.z)},
        {"p_value", num(r.p_value)},
        {"ci_lower", num(r.ci_lower)},
        {"ci_upper", num(r.ci_upper)},
        {"level", num(r.level)},
        {"n", std::to_string(r.n)},
        {"p", std::to_string(r.p)},
        {"events", std::to_string(r.events)},
        {"selected_outcome", names_or_na(s.outcome, names)},
        {"selected_censoring", names_or_na(s.censoring, names)},
        {"selected_exposure", names_or_na(s.exposure, names)},
        {"union_b", join_names(s.union_b, names)},
        {"lambda_outcome", num(s.lambda_outcome)},
        {"lambda_censoring", num(s.lambda_censoring)},
        {"lambda_exposure", num(s.lambda_exposure)},
        {"s_beta", std::to_string(r.s_beta)},
        {"s_eta", std::to_string(r.s_eta)},
        {"s_gamma", std::to_string(r.s_gamma)},
        {"sparsity_ratio", num(r.sparsity_ratio)},
        {"converged", r.converged ? "true" : "false"},
        {"score_mean_abs", num(r.score_mean)},
        {"sigma2_hat", num(r.sigma2_hat)},
        {"v_hat", num(r.v_hat)},
        {"notes", notes.empty() ? kNotApplicable : notes},
    };
}

std::string config_hash(const nlohmann::json& resolved) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : resolved.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_line(const std::string& hash) { return "# config_hash=" + hash + "\n"; }

void write_reports_csv(std::ostream& out, const std::vector<InferenceReport>& reports,
                       const std::vector<std::string>& names) {
    bool header = true;
    for (const auto& r : reports) {
        const auto fields = report_fields(r, names);
        if (header) {
            for (std::size_t k = 0; k < fields.size(); ++k) out << (k ? "," : "") << fields[k].key;
            out << '\n';
            header = false;
        }
        for (std::size_t k = 0; k < fields.size(); ++k) out << (k ? "," : "") << csv_cell(fields[k].value);
        out << '\n';
    }
}

void write_reports_table(std::ostream& out, const std::vector<InferenceReport>& reports,
                         const std::vector<std::string>& names) {
    if (reports.empty()) return;
    std::vector<std::vector<ReportField>> cols;
    for (const auto& r : reports) cols.push_back(report_fields(r, names));
    std::size_t key_width = 0;
    for (const auto& f : cols.front()) key_width = std::max(key_width, f.key.size());
    std::vector<std::size_t> width(cols.size(), 0);
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (const auto& f : cols[c]) width[c] = std::max(width[c], f.value.size());
    for (std::size_t k = 0; k < cols.front().size(); ++k) {
        out << std::left << std::setw(static_cast<int>(key_width)) << cols.front()[k].key;
        for (std::size_t c = 0; c < cols.size(); ++c)
            out << "  " << std::setw(static_cast<int>(width[c])) << cols[c][k].value;
        out << '\n';
    }
    out << std::right;
}

nlohmann::json reports_json(const std::vector<InferenceReport>& reports, const std::vector<std::string>& names) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json obj = nlohmann::json::object();
        for (const auto& f : report_fields(r, names)) obj[f.key] = f.value;
        arr.push_back(std::move(obj));
    }
    return arr;
}

void write_selection_trace(std::ostream& out, const std::vector<InferenceReport>& reports,
                           const std::vector<std::string>& names) {
    out << "method,step,lambda,count,columns\n";
    for (const auto& r : reports) {
        const auto& s = r.selection;
        auto row = [&](const char* step, const std::optional<ColumnSet>& cols, const std::optional<double>& lambda) {
            if (!cols) return;
            out << to_string(r.method) << ',' << step << ',' << num(lambda) << ',' << cols->size() << ','
                << csv_cell(join_names(*cols, names)) << '\n';
        };
        row("outcome", s.outcome, s.lambda_outcome);
        row("censoring", s.censoring, s.lambda_censoring);
        row("exposure", s.exposure, s.lambda_exposure);
        row("union", s.union_b, std::nullopt);
    }
}

}  // namespace coxsel
