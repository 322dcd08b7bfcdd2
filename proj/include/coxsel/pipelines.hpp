#pragma once

#include "coxsel/cox_engine.hpp"
#include "coxsel/penalized.hpp"
#include "coxsel/survival_data.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace coxsel {

enum class Method { post_lasso, poor_mans, triple, double_selection, fang, full, oracle };

std::string to_string(Method m);
/// Accepts the tags printed by to_string; ConfigError otherwise.
Method parse_method(const std::string& tag);
/// post-lasso, poor-mans, triple, fang.
const std::vector<Method>& comparison_methods();

enum class ExposureFamily { automatic, linear, logistic };

std::string to_string(ExposureFamily f);
ExposureFamily parse_exposure_family(const std::string& tag);

struct PipelineConfig {
    int folds = 20;
    LambdaRule rule = LambdaRule::one_se;
    ExposureFamily exposure_family = ExposureFamily::automatic;
    ColumnSet forced_in;        // covariate indices, 0-based
    ColumnSet oracle_support;   // adjustment set of Method::oracle
    std::uint64_t seed = 1;
    double level = 0.05;
    int n_lambda = 100;
    LassoOptions lasso;
};

/// ConfigError if the configuration cannot apply to p covariates.
void validate(const PipelineConfig& config, Index p);

struct SelectionReport {
    std::optional<ColumnSet> outcome;    // Step 1
    std::optional<ColumnSet> censoring;  // Step 2
    std::optional<ColumnSet> exposure;   // Step 3
    ColumnSet union_b;                   // covariates in the final refit
    std::optional<double> lambda_outcome, lambda_censoring, lambda_exposure;
};

struct InferenceReport {
    Method method = Method::post_lasso;
    double estimate = 0;
    double se = 0;
    double z = 0;
    double p_value = 1;
    double ci_lower = 0;
    double ci_upper = 0;
    double level = 0.05;
    SelectionReport selection;

    bool converged = true;
    std::optional<double> score_mean;  // |E_n U-hat| at the reported estimate
    std::optional<double> sigma2_hat;
    std::optional<double> v_hat;
    Index s_beta = 0, s_eta = 0, s_gamma = 0;
    double sparsity_ratio = 0;  // max(s) * log(max(p, n)) / sqrt(n)
    Index n = 0, p = 0, events = 0;
    std::vector<std::string> notes;
};

/// Runs the requested methods on one dataset; shared selection steps are
/// computed once, so each report equals the one from a single-method run.
std::vector<InferenceReport> run_methods(const SurvivalData<double>& data, const PipelineConfig& config,
                                         const std::vector<Method>& methods);

InferenceReport run_method(const SurvivalData<double>& data, const PipelineConfig& config, Method method);

inline InferenceReport run_post_lasso(const SurvivalData<double>& d, const PipelineConfig& c) {
    return run_method(d, c, Method::post_lasso);
}
inline InferenceReport run_poor_mans(const SurvivalData<double>& d, const PipelineConfig& c) {
    return run_method(d, c, Method::poor_mans);
}
inline InferenceReport run_triple_selection(const SurvivalData<double>& d, const PipelineConfig& c) {
    return run_method(d, c, Method::triple);
}
inline InferenceReport run_double_selection(const SurvivalData<double>& d, const PipelineConfig& c) {
    return run_method(d, c, Method::double_selection);
}
inline InferenceReport run_fang(const SurvivalData<double>& d, const PipelineConfig& c) {
    return run_method(d, c, Method::fang);
}

/// Censoring-as-event indicator: 1 - delta, except that subjects still
/// under follow-up at a finite tau count as censored for C.
Eigen::VectorXi censoring_status(const SurvivalData<double>& data);

}  // namespace coxsel
