#pragma once

#include "coxsel/pipelines.hpp"
#include "coxsel/survival_data.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace coxsel {

enum class Mechanism { a, b };

std::string to_string(Mechanism m);
Mechanism parse_mechanism(const std::string& tag);

struct DgpConfig {
    Index n = 400;
    Index p = 30;
    Mechanism mechanism = Mechanism::a;
    double rho = 0.5;      // Toeplitz parameter, mechanism (a)
    double c_a = 1.0;      // exposure-model scale, mechanism (b)
    int setting = 1;       // choice of the censoring coefficient pattern
    double b_scale = 0.0;  // beta = b * nu_T
    double g_scale = 0.0;  // eta2 = g * nu_C
    double alpha = 0.0;
    double eta1 = 1.0;
    double beta0 = 0.0;
    double eta0 = 0.0;
    std::uint64_t seed = 1;
};

/// ConfigError on an invalid configuration.
void validate(const DgpConfig& config);

/// (1, 1/2, ..., 1/10, 0, ...) truncated to p.
Vec<double> nu_t(Index p);
/// Censoring pattern of Setting 1 (positions 1-10) or 2 (1-5 and 11-15).
Vec<double> nu_c(Index p, int setting);
/// c_a * nu_t(p).
Vec<double> nu_a(Index p, double c_a);

/// Covariates with a nonzero coefficient in the outcome or censoring hazard.
ColumnSet true_support(const DgpConfig& config);

/// One dataset of size n drawn with config.seed.
SurvivalData<double> generate_dataset(const DgpConfig& config);

/// Rotterdam-shaped data: binary exposure, 9 baseline covariates (tumor size
/// as 3 levels, so 10 design columns), weakly prognostic confounders that
/// drive the exposure, and follow-up that depends on the year of incidence.
SurvivalData<double> generate_rotterdam_surrogate(Index n, std::uint64_t seed);

struct ExperimentGrid {
    DgpConfig dgp;  // b_scale, g_scale and seed are set per cell and replication
    std::vector<double> b_values{0.5, 1.0, 2.0};
    std::vector<double> g_values{0.5, 1.0, 2.0};
    int replications = 500;
    std::vector<Method> methods = comparison_methods();
    double level = 0.05;
    PipelineConfig pipeline;  // seed is set per replication
    std::uint64_t seed = 1;
    int threads = 1;          // 0 = hardware concurrency
    double failure_cap = 0.02;
};

void validate(const ExperimentGrid& grid);

struct ReplicationRecord {
    Index cell = 0;
    int replication = 0;
    Method method = Method::post_lasso;
    bool failed = false;
    double estimate = 0;
    double se = 0;
    bool rejected = false;
    std::string error;
};

struct CellResult {
    Method method = Method::post_lasso;
    double b = 0;
    double g = 0;
    int reps = 0;      // successful replications
    int failures = 0;  // excluded replications
    int rejections = 0;
    double rate = 0;
    double mc_se = 0;  // sqrt(rate * (1 - rate) / reps)
    double mean_estimate = 0;
    double mean_se = 0;
    bool unreliable = false;  // failures above the cap
};

struct GridResult {
    std::vector<CellResult> cells;  // ordered by b, then g, then method
    std::vector<ReplicationRecord> replications;

    const CellResult& cell(Method m, double b, double g) const;
};

/// Called after each finished replication with (done, total).
using Progress = std::function<void(std::size_t, std::size_t)>;

/// Seeds: dataset derive_seed(seed, {cell, rep, 0}), pipeline
/// derive_seed(seed, {cell, rep, 1}); the result does not depend on threads.
GridResult run_grid(const ExperimentGrid& grid, const Progress& progress = {});

struct SubsampleConfig {
    std::vector<Index> sizes{150, 300, 600};
    int n_subsamples = 500;
    std::vector<Method> methods{Method::post_lasso, Method::poor_mans, Method::triple};
    PipelineConfig pipeline;
    std::uint64_t seed = 1;
    int threads = 1;
    Index min_events = 5;  // subsamples with fewer events are redrawn
    int max_redraws = 1000;
};

void validate(const SubsampleConfig& config, Index n, Index p);

struct CoverageRow {
    Index size = 0;
    Method method = Method::post_lasso;
    int subsamples = 0;
    int failures = 0;
    double bias = 0;  // mean(estimate) - benchmark
    double sd = 0;
    double mean_se = 0;
    double coverage = 0;
};

struct SubsampleResult {
    double benchmark = 0;
    std::vector<CoverageRow> rows;  // ordered by size, then method
    int redraws = 0;

    const CoverageRow& row(Index size, Method m) const;
};

SubsampleResult run_subsample_study(const SurvivalData<double>& data, double benchmark, const SubsampleConfig& config,
                                    const Progress& progress = {});

/// Full-data Cox with every covariate, robust SE.
InferenceReport benchmark_fit(const SurvivalData<double>& data, const PipelineConfig& config);

void write_grid_csv(std::ostream& out, const GridResult& result);
/// Long format: method, b, g, rate, mc_se.
void write_plot_csv(std::ostream& out, const GridResult& result);
void write_replications_csv(std::ostream& out, const GridResult& result);
/// n, method, bias, sd, mean_se, coverage (plus counts).
void write_coverage_csv(std::ostream& out, const SubsampleResult& result);

}  // namespace coxsel
