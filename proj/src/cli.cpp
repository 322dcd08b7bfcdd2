#include "coxsel/cli.hpp"

#include "coxsel/csv.hpp"
#include "coxsel/report.hpp"
#include "coxsel/sim_lab.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace coxsel {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct SchemaOpts {
    std::string input;
    std::string time, status, exposure;
    std::vector<std::string> covariates;
    bool all_other_columns = false;
    std::vector<std::string> categorical;
    std::string delimiter = ",";
    std::optional<double> tau;
};

struct PipelineOpts {
    int folds = 20;
    std::string rule = "1se";
    std::string exposure_family = "auto";
    std::vector<std::string> forced_in;
    std::uint64_t seed = 1;
    double level = 0.05;
    int n_lambda = 100;
};

struct OutputOpts {
    std::string output_dir;
    std::string format = "table";
    std::string config;
    bool progress = false;
};

struct FitOpts {
    SchemaOpts schema;
    PipelineOpts pipeline;
    OutputOpts output;
    std::vector<std::string> methods{"all"};
    std::vector<std::string> oracle_columns;
};

struct SimulateOpts {
    PipelineOpts pipeline;
    OutputOpts output;
    std::string preset = "paper-1a";
    bool desk = false;
    bool full = false;
    std::optional<int> reps;
    std::optional<Index> n, p;
    std::optional<std::string> mechanism;
    std::optional<double> rho, c_a, alpha, eta1, beta0, eta0;
    std::optional<int> setting;
    std::vector<double> b_values, g_values;
    std::vector<std::string> methods{"all"};
    int threads = 0;
    double failure_cap = 0.02;
};

struct SubsampleOpts {
    SchemaOpts schema;
    PipelineOpts pipeline;
    OutputOpts output;
    std::optional<Index> surrogate;
    std::uint64_t surrogate_seed = 2024;
    std::vector<Index> sizes{75, 150, 300, 450, 600};
    int subsamples = 1000;
    std::vector<std::string> methods{"post-lasso", "poor-mans", "triple"};
    std::string benchmark = "full";
    Index min_events = 5;
    int threads = 0;
};

void add_schema(CLI::App* app, SchemaOpts& o) {
    app->add_option("input,--input", o.input, "CSV file");
    app->add_option("--time", o.time, "observed time column");
    app->add_option("--status", o.status, "event indicator column (1 = event)");
    app->add_option("--exposure", o.exposure, "exposure column");
    auto* cov = app->add_option("--covariates", o.covariates, "covariate columns")->delimiter(',');
    auto* all = app->add_flag("--all-other-columns", o.all_other_columns, "use every other column as a covariate");
    cov->excludes(all);
    app->add_option("--categorical", o.categorical, "columns coded as indicators")->delimiter(',');
    app->add_option("--delimiter", o.delimiter, "field separator");
    app->add_option("--tau", o.tau, "end of follow-up");
}

void add_pipeline(CLI::App* app, PipelineOpts& o) {
    app->add_option("--folds", o.folds, "cross-validation folds");
    app->add_option("--rule", o.rule, "lambda rule: 1se or min");
    app->add_option("--exposure-family", o.exposure_family, "auto, linear or logistic");
    app->add_option("--forced-in", o.forced_in, "covariates kept in every union")->delimiter(',');
    app->add_option("--seed", o.seed, "master seed");
    app->add_option("--level", o.level, "significance level");
    app->add_option("--n-lambda", o.n_lambda, "lambda grid size");
}

void add_output(CLI::App* app, OutputOpts& o) {
    app->add_option("--output-dir", o.output_dir, "output directory (default $COXSEL_OUTPUT_DIR or .)");
    app->add_option("--format", o.format, "stdout format: table, csv or json");
    app->add_option("--config", o.config, "flat key = value file; flags override it");
    app->add_flag("--progress", o.progress, "report progress on stderr");
}

LambdaRule parse_rule(const std::string& tag) {
    if (tag == "1se" || tag == "one-se") return LambdaRule::one_se;
    if (tag == "min") return LambdaRule::min;
    throw ConfigError("unknown lambda rule '" + tag + "' (expected 1se or min)");
}

std::vector<Method> resolve_methods(const std::vector<std::string>& tags) {
    std::vector<Method> out;
    auto push = [&](Method m) {
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    };
    for (const auto& t : tags) {
        if (t.empty()) continue;
        if (t == "all") {
            for (Method m : comparison_methods()) push(m);
        } else {
            push(parse_method(t));
        }
    }
    if (out.empty()) throw ConfigError("no methods requested");
    return out;
}

std::vector<std::string> method_tags(const std::vector<Method>& methods) {
    std::vector<std::string> out;
    for (Method m : methods) out.push_back(to_string(m));
    return out;
}

void check_format(const std::string& format, bool allow_json) {
    if (format == "table" || format == "csv" || (allow_json && format == "json")) return;
    throw ConfigError("unknown format '" + format + "'");
}

// Pipeline settings without the covariate-dependent parts.
PipelineConfig base_pipeline(const PipelineOpts& o) {
    PipelineConfig cfg;
    cfg.folds = o.folds;
    cfg.rule = parse_rule(o.rule);
    cfg.exposure_family = parse_exposure_family(o.exposure_family);
    cfg.seed = o.seed;
    cfg.level = o.level;
    cfg.n_lambda = o.n_lambda;
    validate(cfg, 0);
    return cfg;
}

json pipeline_json(const PipelineOpts& o) {
    return {{"folds", o.folds},       {"rule", o.rule},   {"exposure_family", o.exposure_family},
            {"forced_in", o.forced_in}, {"seed", o.seed}, {"level", o.level},
            {"n_lambda", o.n_lambda}};
}

CsvSchema make_schema(const SchemaOpts& o) {
    if (o.input.empty()) throw ConfigError("an input CSV file is required");
    if (o.time.empty() || o.status.empty() || o.exposure.empty())
        throw ConfigError("--time, --status and --exposure are required");
    if (o.covariates.empty() && !o.all_other_columns && !o.categorical.empty())
        throw ConfigError("categorical columns need --covariates or --all-other-columns");
    if (o.delimiter.size() != 1) throw ConfigError("--delimiter must be a single character");
    CsvSchema s;
    s.time = o.time;
    s.status = o.status;
    s.exposure = o.exposure;
    s.covariates = o.covariates;
    s.all_other_columns = o.all_other_columns;
    s.categorical = o.categorical;
    s.delimiter = o.delimiter[0];
    if (o.tau) {
        if (!(*o.tau > 0)) throw ConfigError("--tau must be positive");
        s.tau = *o.tau;
    }
    return s;
}

json schema_json(const SchemaOpts& o) {
    return {{"input", o.input},
            {"time", o.time},
            {"status", o.status},
            {"exposure", o.exposure},
            {"covariates", o.covariates},
            {"all_other_columns", o.all_other_columns},
            {"categorical", o.categorical},
            {"delimiter", o.delimiter},
            {"tau", o.tau ? json(*o.tau) : json("inf")}};
}

// Names -> covariate indices; a categorical base name selects all its indicators.
ColumnSet resolve_columns(const std::vector<std::string>& wanted, const std::vector<std::string>& names) {
    ColumnSet out;
    for (const auto& w : wanted) {
        bool found = false;
        for (std::size_t j = 0; j < names.size(); ++j)
            if (names[j] == w || names[j].rfind(w + "=", 0) == 0) {
                out.push_back(static_cast<Index>(j));
                found = true;
            }
        if (!found) throw ConfigError("unknown covariate '" + w + "'");
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string output_dir(const OutputOpts& o) {
    if (!o.output_dir.empty()) return o.output_dir;
    if (const char* env = std::getenv("COXSEL_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

class OutputSet {
  public:
    explicit OutputSet(std::string dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw ConfigError("cannot create output directory '" + dir_ + "': " + ec.message());
    }
    void write(const std::string& name, const std::string& content) {
        const fs::path path = fs::path(dir_) / name;
        std::ofstream f(path, std::ios::binary);
        f << content;
        if (!f) throw ConfigError("cannot write '" + path.string() + "'");
        files_.push_back(name);
    }
    const std::vector<std::string>& files() const { return files_; }
    const std::string& dir() const { return dir_; }

  private:
    std::string dir_;
    std::vector<std::string> files_;
};

void write_manifest(OutputSet& outputs, const std::string& command, const json& config, const std::string& hash,
                    json runtime, json results) {
    runtime["output_dir"] = outputs.dir();
    json m = {{"tool", "coxsel"},         {"version", kVersion},   {"command", command},
              {"config", config},         {"config_hash", hash},   {"runtime", std::move(runtime)},
              {"results", std::move(results)}};
    std::vector<std::string> files = outputs.files();
    files.push_back("manifest.json");
    m["outputs"] = files;
    outputs.write("manifest.json", m.dump(2) + "\n");
}

Progress progress_printer(bool enabled, std::ostream& err) {
    if (!enabled) return {};
    return [&err](std::size_t done, std::size_t total) {
        const std::size_t step = std::max<std::size_t>(1, total / 100);
        if (done % step == 0 || done == total) err << "\r" << done << "/" << total << (done == total ? "\n" : "") << std::flush;
    };
}

int cmd_fit(const FitOpts& o, std::ostream& out) {
    const auto methods = resolve_methods(o.methods);
    check_format(o.output.format, true);
    const CsvSchema schema = make_schema(o.schema);
    PipelineConfig cfg = base_pipeline(o.pipeline);
    const json config = {{"schema", schema_json(o.schema)},
                         {"pipeline", pipeline_json(o.pipeline)},
                         {"methods", method_tags(methods)},
                         {"oracle_columns", o.oracle_columns}};
    const std::string hash = config_hash(config);

    const auto data = ingest_csv(o.schema.input, schema);
    cfg.forced_in = resolve_columns(o.pipeline.forced_in, data.covariate_names);
    cfg.oracle_support = resolve_columns(o.oracle_columns, data.covariate_names);
    validate(cfg, data.p());
    const auto reports = run_methods(data, cfg, methods);

    OutputSet outputs(output_dir(o.output));
    std::ostringstream csv, trace;
    csv << hash_line(hash);
    write_reports_csv(csv, reports, data.covariate_names);
    trace << hash_line(hash);
    write_selection_trace(trace, reports, data.covariate_names);
    const json record = {{"config_hash", hash}, {"reports", reports_json(reports, data.covariate_names)}};
    outputs.write("report.csv", csv.str());
    outputs.write("report.json", record.dump(2) + "\n");
    outputs.write("selection_trace.csv", trace.str());
    write_manifest(outputs, "fit", config, hash, json::object(),
                   {{"n", data.n()}, {"p", data.p()}, {"events", reports.front().events}});

    if (o.output.format == "csv") {
        write_reports_csv(out, reports, data.covariate_names);
    } else if (o.output.format == "json") {
        out << record.dump(2) << '\n';
    } else {
        write_reports_table(out, reports, data.covariate_names);
    }
    return exit_ok;
}

ExperimentGrid make_grid(const SimulateOpts& o) {
    if (o.desk && o.full) throw ConfigError("--desk and --full are mutually exclusive");
    ExperimentGrid g;
    DgpConfig& d = g.dgp;
    d.n = 400;
    d.p = 30;
    d.eta1 = 1.0;
    d.beta0 = 0.0;
    d.eta0 = 0.0;
    if (o.preset == "paper-1a" || o.preset == "paper-2a") {
        d.mechanism = Mechanism::a;
        d.rho = 0.5;
    } else if (o.preset == "paper-1b" || o.preset == "paper-2b") {
        d.mechanism = Mechanism::b;
        d.c_a = 1.0;
    } else {
        throw ConfigError("unknown preset '" + o.preset + "' (expected paper-1a, paper-1b, paper-2a or paper-2b)");
    }
    d.setting = o.preset[6] == '1' ? 1 : 2;
    if (o.n) d.n = *o.n;
    if (o.p) d.p = *o.p;
    if (o.mechanism) d.mechanism = parse_mechanism(*o.mechanism);
    if (o.rho) d.rho = *o.rho;
    if (o.c_a) d.c_a = *o.c_a;
    if (o.setting) d.setting = *o.setting;
    if (o.alpha) d.alpha = *o.alpha;
    if (o.eta1) d.eta1 = *o.eta1;
    if (o.beta0) d.beta0 = *o.beta0;
    if (o.eta0) d.eta0 = *o.eta0;

    if (o.full) {
        g.b_values.clear();
        for (int k = 0; k <= 8; ++k) g.b_values.push_back(0.25 * k);
        g.g_values = g.b_values;
        g.replications = 1000;
    }
    if (!o.b_values.empty()) g.b_values = o.b_values;
    if (!o.g_values.empty()) g.g_values = o.g_values;
    if (o.reps) g.replications = *o.reps;
    g.methods = resolve_methods(o.methods);
    g.pipeline = base_pipeline(o.pipeline);
    g.level = g.pipeline.level;
    g.seed = o.pipeline.seed;
    g.threads = o.threads;
    g.failure_cap = o.failure_cap;
    validate(g);
    return g;
}

json grid_json(const ExperimentGrid& g, const SimulateOpts& o) {
    const DgpConfig& d = g.dgp;
    return {{"preset", o.preset},
            {"scale", o.full ? "full" : "desk"},
            {"dgp",
             {{"n", d.n},
              {"p", d.p},
              {"mechanism", to_string(d.mechanism)},
              {"rho", d.rho},
              {"c_a", d.c_a},
              {"setting", d.setting},
              {"alpha", d.alpha},
              {"eta1", d.eta1},
              {"beta0", d.beta0},
              {"eta0", d.eta0}}},
            {"b_values", g.b_values},
            {"g_values", g.g_values},
            {"replications", g.replications},
            {"methods", method_tags(g.methods)},
            {"failure_cap", g.failure_cap},
            {"pipeline", pipeline_json(o.pipeline)}};
}

int cmd_simulate(const SimulateOpts& o, std::ostream& out, std::ostream& err) {
    check_format(o.output.format, false);
    if (!o.pipeline.forced_in.empty()) throw ConfigError("--forced-in is not available for simulate");
    if (o.threads < 0) throw ConfigError("--threads must be non-negative");
    const ExperimentGrid grid = make_grid(o);
    const json config = grid_json(grid, o);
    const std::string hash = config_hash(config);
    OutputSet outputs(output_dir(o.output));

    const GridResult result = run_grid(grid, progress_printer(o.output.progress, err));

    std::ostringstream grid_csv, plot_csv, reps_csv;
    grid_csv << hash_line(hash);
    write_grid_csv(grid_csv, result);
    plot_csv << hash_line(hash);
    write_plot_csv(plot_csv, result);
    reps_csv << hash_line(hash);
    write_replications_csv(reps_csv, result);
    outputs.write("grid.csv", grid_csv.str());
    outputs.write("plot_data.csv", plot_csv.str());
    outputs.write("replications.csv", reps_csv.str());

    json unreliable = json::array();
    int failures = 0;
    for (const auto& c : result.cells) {
        failures += c.failures;
        if (c.unreliable) unreliable.push_back({{"method", to_string(c.method)}, {"b", c.b}, {"g", c.g}});
    }
    const std::uint64_t master = grid.seed;
    write_manifest(outputs, "simulate", config, hash,
                   {{"threads", grid.threads}},
                   {{"seed_scheme", "dataset derive_seed(seed, {cell, rep, 0}); pipeline derive_seed(seed, {cell, rep, 1})"},
                    {"master_seed", master},
                    {"failed_replications", failures},
                    {"unreliable_cells", unreliable}});

    if (o.output.format == "csv") {
        write_grid_csv(out, result);
    } else {
        out << std::left << std::setw(12) << "method" << std::setw(8) << "b" << std::setw(8) << "g" << std::setw(10)
            << "rate" << std::setw(10) << "mc_se" << "failures\n";
        for (const auto& c : result.cells)
            out << std::setw(12) << to_string(c.method) << std::setw(8) << c.b << std::setw(8) << c.g
                << std::setw(10) << std::setprecision(4) << c.rate << std::setw(10) << c.mc_se << c.failures
                << (c.unreliable ? "  unreliable" : "") << '\n';
        out << std::right;
    }
    return exit_ok;
}

int cmd_subsample(const SubsampleOpts& o, std::ostream& out, std::ostream& err) {
    check_format(o.output.format, false);
    if (o.surrogate && !o.schema.input.empty()) throw ConfigError("give either an input file or --surrogate, not both");
    if (o.threads < 0) throw ConfigError("--threads must be non-negative");
    SubsampleConfig sc;
    sc.sizes = o.sizes;
    sc.n_subsamples = o.subsamples;
    sc.methods = resolve_methods(o.methods);
    sc.pipeline = base_pipeline(o.pipeline);
    sc.seed = o.pipeline.seed;
    sc.threads = o.threads;
    sc.min_events = o.min_events;
    const Method benchmark_method = parse_method(o.benchmark);
    std::optional<CsvSchema> schema;
    if (!o.surrogate) schema = make_schema(o.schema);

    json config = {{"sizes", o.sizes},
                   {"subsamples", o.subsamples},
                   {"methods", method_tags(sc.methods)},
                   {"benchmark", to_string(benchmark_method)},
                   {"min_events", o.min_events},
                   {"pipeline", pipeline_json(o.pipeline)}};
    if (o.surrogate)
        config["data"] = {{"surrogate_n", *o.surrogate}, {"surrogate_seed", o.surrogate_seed}};
    else
        config["data"] = schema_json(o.schema);
    const std::string hash = config_hash(config);
    if (o.surrogate && *o.surrogate < 2) throw ConfigError("--surrogate needs at least 2 rows");

    const auto data = o.surrogate ? generate_rotterdam_surrogate(*o.surrogate, o.surrogate_seed)
                                  : ingest_csv(o.schema.input, *schema);
    sc.pipeline.forced_in = resolve_columns(o.pipeline.forced_in, data.covariate_names);
    validate(sc, data.n(), data.p());
    OutputSet outputs(output_dir(o.output));

    const auto bench = run_method(data, sc.pipeline, benchmark_method);
    const auto result = run_subsample_study(data, bench.estimate, sc, progress_printer(o.output.progress, err));

    std::ostringstream csv;
    csv << hash_line(hash);
    write_coverage_csv(csv, result);
    outputs.write("coverage.csv", csv.str());
    write_manifest(outputs, "subsample", config, hash, {{"threads", sc.threads}},
                   {{"benchmark_estimate", bench.estimate},
                    {"benchmark_se", bench.se},
                    {"n", data.n()},
                    {"p", data.p()},
                    {"redraws", result.redraws}});

    if (o.output.format == "csv") {
        write_coverage_csv(out, result);
    } else {
        out << "benchmark (" << to_string(benchmark_method) << "): " << bench.estimate << " (robust SE " << bench.se
            << ")\n";
        out << std::left << std::setw(6) << "n" << std::setw(12) << "method" << std::setw(10) << "bias"
            << std::setw(10) << "sd" << std::setw(10) << "mean_se" << "coverage\n";
        for (const auto& r : result.rows)
            out << std::setw(6) << r.size << std::setw(12) << to_string(r.method) << std::setprecision(3)
                << std::setw(10) << r.bias << std::setw(10) << r.sd << std::setw(10) << r.mean_se << r.coverage
                << '\n';
        out << std::right;
        if (result.redraws > 0) out << "redrawn subsamples: " << result.redraws << '\n';
    }
    return exit_ok;
}

// Inserts `--key=value` tokens from the config file for options the command
// line leaves unset, right after the subcommand name.
std::vector<std::string> merge_config(const std::vector<std::string>& args, CLI::App* sub,
                                      const std::string& config_path) {
    std::vector<std::string> tokens;
    for (const auto& [key, value] : read_flat_config(config_path)) {
        if (key == "config") throw ConfigError("config files cannot include other config files");
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt) throw ConfigError("unknown config key '" + key + "' for " + sub->get_name());
        if (opt->count() == 0) tokens.push_back("--" + key + "=" + value);
    }
    std::vector<std::string> merged;
    bool inserted = false;
    for (const auto& a : args) {
        merged.push_back(a);
        if (!inserted && a == sub->get_name()) {
            merged.insert(merged.end(), tokens.begin(), tokens.end());
            inserted = true;
        }
    }
    return merged;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t line_no = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string{};
        return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
            throw ConfigError("config file '" + path + "' line " + std::to_string(line_no) + ": expected key = value");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Post-selection inference for an exposure effect in the Cox model", "coxsel"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    FitOpts fit;
    auto* fit_cmd = app.add_subcommand("fit", "analyze a CSV file with one or more methods");
    add_schema(fit_cmd, fit.schema);
    add_pipeline(fit_cmd, fit.pipeline);
    add_output(fit_cmd, fit.output);
    fit_cmd->add_option("--method", fit.methods, "post-lasso, poor-mans, triple, double, fang, full, oracle or all")
        ->delimiter(',');
    fit_cmd->add_option("--oracle-columns", fit.oracle_columns, "adjustment set of the oracle method")->delimiter(',');

    SimulateOpts sim;
    auto* sim_cmd = app.add_subcommand("simulate", "run a Type I error grid");
    add_pipeline(sim_cmd, sim.pipeline);
    add_output(sim_cmd, sim.output);
    sim_cmd->add_option("--preset", sim.preset, "paper-1a, paper-1b, paper-2a or paper-2b");
    sim_cmd->add_flag("--desk", sim.desk, "3 x 3 grid over {0.5, 1, 2}, 500 replications (default)");
    sim_cmd->add_flag("--full", sim.full, "9 x 9 grid over 0, 0.25, ..., 2, 1000 replications");
    sim_cmd->add_option("--reps", sim.reps, "replications per cell");
    sim_cmd->add_option("--n", sim.n, "sample size");
    sim_cmd->add_option("--p", sim.p, "number of covariates");
    sim_cmd->add_option("--mechanism", sim.mechanism, "a or b");
    sim_cmd->add_option("--rho", sim.rho, "Toeplitz parameter (mechanism a)");
    sim_cmd->add_option("--cA", sim.c_a, "exposure-model scale (mechanism b)");
    sim_cmd->add_option("--setting", sim.setting, "1 or 2");
    sim_cmd->add_option("--alpha", sim.alpha, "true exposure effect");
    sim_cmd->add_option("--eta1", sim.eta1, "exposure effect on censoring");
    sim_cmd->add_option("--beta0", sim.beta0, "outcome log baseline rate");
    sim_cmd->add_option("--eta0", sim.eta0, "censoring log baseline rate");
    sim_cmd->add_option("--b", sim.b_values, "outcome coefficient scales")->delimiter(',');
    sim_cmd->add_option("--g", sim.g_values, "censoring coefficient scales")->delimiter(',');
    sim_cmd->add_option("--methods,--method", sim.methods, "methods to compare")->delimiter(',');
    sim_cmd->add_option("--threads", sim.threads, "worker threads (0 = all cores)");
    sim_cmd->add_option("--failure-cap", sim.failure_cap, "failed fraction marking a cell unreliable");

    SubsampleOpts sub;
    auto* sub_cmd = app.add_subcommand("subsample", "sub-sampling coverage study");
    add_schema(sub_cmd, sub.schema);
    add_pipeline(sub_cmd, sub.pipeline);
    add_output(sub_cmd, sub.output);
    sub_cmd->add_option("--surrogate", sub.surrogate, "simulate a Rotterdam-shaped dataset of this size instead");
    sub_cmd->add_option("--surrogate-seed", sub.surrogate_seed, "seed of the surrogate dataset");
    sub_cmd->add_option("--sizes", sub.sizes, "subsample sizes")->delimiter(',');
    sub_cmd->add_option("--subsamples", sub.subsamples, "subsamples per size");
    sub_cmd->add_option("--methods,--method", sub.methods, "methods to evaluate")->delimiter(',');
    sub_cmd->add_option("--benchmark", sub.benchmark, "full-data benchmark method");
    sub_cmd->add_option("--min-events", sub.min_events, "redraw subsamples with fewer events");
    sub_cmd->add_option("--threads", sub.threads, "worker threads (0 = all cores)");

    std::vector<std::string> argv = args;
    for (int pass = 0; pass < 2; ++pass) {
        std::vector<std::string> reversed(argv.rbegin(), argv.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? exit_ok : exit_config;
        }
        if (pass == 1) break;
        CLI::App* chosen = app.get_subcommands().front();
        const std::string& config = chosen == fit_cmd ? fit.output.config
                                    : chosen == sim_cmd ? sim.output.config
                                                        : sub.output.config;
        if (config.empty()) break;
        try {
            argv = merge_config(args, chosen, config);
        } catch (const InputError& e) {
            err << "error: " << e.what() << '\n';
            return exit_config;
        }
        fit = FitOpts{};
        sim = SimulateOpts{};
        sub = SubsampleOpts{};
        app.clear();
    }

    try {
        CLI::App* chosen = app.get_subcommands().front();
        if (chosen == fit_cmd) return cmd_fit(fit, out);
        if (chosen == sim_cmd) return cmd_simulate(sim, out, err);
        return cmd_subsample(sub, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return exit_numerical;
    }
}

}  // namespace coxsel
