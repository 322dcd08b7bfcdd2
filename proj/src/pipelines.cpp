#include "coxsel/pipelines.hpp"

#include "coxsel/decorrelated_score.hpp"
#include "coxsel/seeding.hpp"
#include "coxsel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace coxsel {

namespace {

struct MethodTag {
    Method method;
    const char* tag;
};

constexpr MethodTag kMethodTags[] = {
    {Method::post_lasso, "post-lasso"}, {Method::poor_mans, "poor-mans"},
    {Method::triple, "triple"},         {Method::double_selection, "double"},
    {Method::fang, "fang"},             {Method::full, "full"},
    {Method::oracle, "oracle"},
};

// Stream ids of the selection steps.
enum Step : std::uint64_t { step_outcome = 1, step_censoring = 2, step_exposure = 3, step_residual = 4, step_fang = 5 };

ColumnSet sorted_union(std::initializer_list<const ColumnSet*> sets) {
    ColumnSet out;
    for (const ColumnSet* s : sets)
        if (s) out.insert(out.end(), s->begin(), s->end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool is_binary(const Vec<double>& a) {
    return (a.array() == 0.0 || a.array() == 1.0).all() && (a.array() == 0.0).any() && (a.array() == 1.0).any();
}

// Lazily evaluated steps shared by every method run on one dataset.
class SharedSteps {
  public:
    SharedSteps(const SurvivalData<double>& data, const PipelineConfig& config)
        : data_(data), cfg_(config), idx_(build_risk_index(data)) {}

    const RiskIndex& index() const { return idx_; }

    // Standardized [A, L] used by both Cox selection steps.
    const std::pair<Mat<double>, ScalingRecord<double>>& design() {
        if (!design_) {
            Mat<double> raw(data_.n(), data_.p() + 1);
            raw.col(0) = data_.exposure;
            raw.rightCols(data_.p()) = data_.covariates;
            design_ = std::make_unique<std::pair<Mat<double>, ScalingRecord<double>>>(standardize_columns(raw));
        }
        return *design_;
    }

    const LassoSelection<double>& outcome_lasso() {
        if (!outcome_) {
            const auto pr = make_cox_problem(design().first, data_.time, data_.status, data_.tau);
            outcome_ = std::make_unique<LassoSelection<double>>(select(pr, step_outcome));
        }
        return *outcome_;
    }

    const ColumnSet& outcome_set() {
        if (!outcome_set_) outcome_set_ = covariates_of(outcome_lasso().support);
        return *outcome_set_;
    }

    const ColumnSet& censoring_set() {
        if (!censoring_set_) {
            const auto pr = make_cox_problem(design().first, data_.time, censoring_status(data_));
            censoring_ = std::make_unique<LassoSelection<double>>(select(pr, step_censoring));
            censoring_set_ = covariates_of(censoring_->support);
        }
        return *censoring_set_;
    }
    double censoring_lambda() {
        censoring_set();
        return censoring_->lambda;
    }

    const ColumnSet& exposure_set() {
        if (!exposure_set_) {
            if (data_.p() == 0) {
                exposure_set_ = ColumnSet{};
                exposure_lambda_ = 0;
            } else {
                const Mat<double> x = design().first.rightCols(data_.p());
                bool logistic = cfg_.exposure_family == ExposureFamily::logistic;
                if (cfg_.exposure_family == ExposureFamily::automatic) logistic = is_binary(data_.exposure);
                const auto pr = logistic ? make_binomial_problem(x, data_.exposure)
                                         : make_gaussian_problem(x, data_.exposure);
                const auto sel = select(pr, step_exposure);
                exposure_set_ = sel.support;
                exposure_lambda_ = sel.lambda;
            }
        }
        return *exposure_set_;
    }
    double exposure_lambda() {
        exposure_set();
        return exposure_lambda_;
    }

    const CoxFit<double>& post_lasso_fit() {
        if (!post_lasso_) post_lasso_ = std::make_unique<CoxFit<double>>(fit_cox(data_, idx_, outcome_set()));
        return *post_lasso_;
    }

    // Schoenfeld-residual lasso at the Step-1 post-Lasso estimates.
    const GammaEstimate<double>& residual_gamma() {
        if (!residual_) {
            const auto& fit = post_lasso_fit();
            const auto ctx = build_score_context(data_, idx_, fit.alpha_hat, fit.beta_hat);
            residual_ = std::make_unique<GammaEstimate<double>>(
                estimate_gamma_lasso_cv(ctx, cfg_.folds, derive_seed(cfg_.seed, {step_residual}), cfg_.rule,
                                        cfg_.lasso));
        }
        return *residual_;
    }

    // Lasso estimates of Step 1 on the original scale.
    std::pair<double, Vec<double>> lasso_estimates() {
        const auto& sel = outcome_lasso();
        const Vec<double> orig = design().second.to_original(sel.coef);
        return {orig(0), orig.tail(data_.p())};
    }

    const SurvivalData<double>& data() const { return data_; }
    const PipelineConfig& config() const { return cfg_; }

  private:
    template <class Problem>
    LassoSelection<double> select(const Problem& pr, Step step) const {
        return select_by_cv(pr, cfg_.folds, derive_seed(cfg_.seed, {step}), cfg_.rule, cfg_.n_lambda, cfg_.lasso);
    }

    // Support over [A, L] -> covariate indices.
    static ColumnSet covariates_of(const std::vector<Index>& support) {
        ColumnSet s;
        for (Index j : support)
            if (j > 0) s.push_back(j - 1);
        return s;
    }

    const SurvivalData<double>& data_;
    const PipelineConfig& cfg_;
    RiskIndex idx_;
    std::unique_ptr<std::pair<Mat<double>, ScalingRecord<double>>> design_;
    std::unique_ptr<LassoSelection<double>> outcome_, censoring_;
    std::optional<ColumnSet> outcome_set_, censoring_set_, exposure_set_;
    double exposure_lambda_ = 0;
    std::unique_ptr<CoxFit<double>> post_lasso_;
    std::unique_ptr<GammaEstimate<double>> residual_;
};

void finish(InferenceReport& r, const SurvivalData<double>& data, const RiskIndex& idx, double level) {
    const auto w = wald_test(r.estimate, r.se, 0.0, level);
    r.z = w.z;
    r.p_value = w.p_value;
    r.ci_lower = w.ci_lower;
    r.ci_upper = w.ci_upper;
    r.level = level;
    r.n = data.n();
    r.p = data.p();
    r.events = idx.n_events();
    const double s = static_cast<double>(std::max({r.s_beta, r.s_eta, r.s_gamma}));
    const double np = static_cast<double>(std::max(data.p(), data.n()));
    r.sparsity_ratio = s * std::log(np) / std::sqrt(static_cast<double>(data.n()));
}

InferenceReport refit_report(Method m, const SurvivalData<double>& data, const RiskIndex& idx, const ColumnSet& b) {
    const auto fit = fit_cox(data, idx, b);
    InferenceReport r;
    r.method = m;
    r.estimate = fit.alpha_hat;
    r.se = fit.alpha_se_robust();
    r.converged = fit.converged;
    r.selection.union_b = b;
    return r;
}

InferenceReport run_one(SharedSteps& steps, Method m) {
    const auto& data = steps.data();
    const auto& cfg = steps.config();
    const auto& idx = steps.index();
    InferenceReport r;
    switch (m) {
        case Method::post_lasso: {
            const ColumnSet& s1 = steps.outcome_set();
            r = refit_report(m, data, idx, s1);
            r.selection.outcome = s1;
            r.selection.lambda_outcome = steps.outcome_lasso().lambda;
            r.s_beta = static_cast<Index>(s1.size());
            break;
        }
        case Method::poor_mans: {
            const ColumnSet& s1 = steps.outcome_set();
            const ColumnSet& s2 = steps.censoring_set();
            const ColumnSet& s3 = steps.exposure_set();
            r = refit_report(m, data, idx, sorted_union({&s1, &s2, &s3, &cfg.forced_in}));
            r.selection.outcome = s1;
            r.selection.censoring = s2;
            r.selection.exposure = s3;
            r.selection.lambda_outcome = steps.outcome_lasso().lambda;
            r.selection.lambda_censoring = steps.censoring_lambda();
            r.selection.lambda_exposure = steps.exposure_lambda();
            r.s_beta = static_cast<Index>(s1.size());
            r.s_eta = static_cast<Index>(s2.size());
            r.s_gamma = static_cast<Index>(s3.size());
            break;
        }
        case Method::triple:
        case Method::double_selection: {
            const bool with_censoring = m == Method::triple;
            const ColumnSet& s1 = steps.outcome_set();
            const auto& gamma_hat = steps.residual_gamma();
            const ColumnSet& s3 = gamma_hat.support;
            const ColumnSet* s2 = with_censoring ? &steps.censoring_set() : nullptr;
            const ColumnSet b = sorted_union({&s1, s2, &s3, &cfg.forced_in});
            const auto fit = fit_cox(data, idx, b);
            const auto ctx = build_score_context(data, idx, fit.alpha_hat, fit.beta_hat);
            const auto gamma_check = constrained_gamma(ctx, b);
            const auto var = theorem1_variance(ctx, gamma_check.gamma);
            r.method = m;
            r.estimate = fit.alpha_hat;
            r.se = var.se;
            r.converged = fit.converged;
            r.score_mean = std::abs(var.score_mean);
            r.sigma2_hat = var.sigma2_hat;
            r.v_hat = var.v_hat;
            if (gamma_check.rank_deficient) r.notes.push_back(gamma_check.diagnostic);
            r.selection.outcome = s1;
            if (s2) r.selection.censoring = *s2;
            r.selection.exposure = s3;
            r.selection.union_b = b;
            r.selection.lambda_outcome = steps.outcome_lasso().lambda;
            if (s2) r.selection.lambda_censoring = steps.censoring_lambda();
            r.selection.lambda_exposure = gamma_hat.lambda;
            r.s_beta = static_cast<Index>(s1.size());
            r.s_eta = s2 ? static_cast<Index>(s2->size()) : 0;
            r.s_gamma = static_cast<Index>(s3.size());
            break;
        }
        case Method::fang: {
            const auto [alpha_l, beta_l] = steps.lasso_estimates();
            const auto ctx = build_score_context(data, idx, alpha_l, beta_l);
            const auto gamma = estimate_gamma_lasso_cv(ctx, cfg.folds, derive_seed(cfg.seed, {step_fang}), cfg.rule,
                                                       cfg.lasso);
            const auto one = fang_one_step(ctx, gamma.gamma);
            r.method = m;
            r.estimate = one.alpha_check;
            r.se = one.se;
            r.score_mean = std::abs(one.score_at_solution);
            r.sigma2_hat = one.sigma2_hat;
            r.v_hat = one.v_hat;
            r.selection.outcome = steps.outcome_set();
            r.selection.exposure = gamma.support;
            r.selection.lambda_outcome = steps.outcome_lasso().lambda;
            r.selection.lambda_exposure = gamma.lambda;
            r.s_beta = one.s_beta;
            r.s_gamma = one.s_gamma;
            break;
        }
        case Method::full: {
            ColumnSet all(static_cast<std::size_t>(data.p()));
            for (Index j = 0; j < data.p(); ++j) all[static_cast<std::size_t>(j)] = j;
            r = refit_report(m, data, idx, all);
            r.s_beta = data.p();
            break;
        }
        case Method::oracle: {
            r = refit_report(m, data, idx, sorted_union({&cfg.oracle_support}));
            r.s_beta = static_cast<Index>(r.selection.union_b.size());
            break;
        }
    }
    finish(r, data, idx, cfg.level);
    return r;
}

}  // namespace

std::string to_string(Method m) {
    for (const auto& t : kMethodTags)
        if (t.method == m) return t.tag;
    return "unknown";
}

Method parse_method(const std::string& tag) {
    for (const auto& t : kMethodTags)
        if (tag == t.tag) return t.method;
    throw ConfigError("unknown method '" + tag + "' (expected post-lasso, poor-mans, triple, double, fang, full or oracle)");
}

const std::vector<Method>& comparison_methods() {
    static const std::vector<Method> m{Method::post_lasso, Method::poor_mans, Method::triple, Method::fang};
    return m;
}

std::string to_string(ExposureFamily f) {
    switch (f) {
        case ExposureFamily::linear: return "linear";
        case ExposureFamily::logistic: return "logistic";
        case ExposureFamily::automatic: break;
    }
    return "auto";
}

ExposureFamily parse_exposure_family(const std::string& tag) {
    if (tag == "auto") return ExposureFamily::automatic;
    if (tag == "linear") return ExposureFamily::linear;
    if (tag == "logistic") return ExposureFamily::logistic;
    throw ConfigError("unknown exposure family '" + tag + "' (expected auto, linear or logistic)");
}

void validate(const PipelineConfig& config, Index p) {
    if (config.folds < 2) throw ConfigError("folds must be at least 2");
    if (!(config.level > 0 && config.level < 1)) throw ConfigError("level must lie in (0, 1)");
    if (config.n_lambda < 2) throw ConfigError("n_lambda must be at least 2");
    for (const ColumnSet* s : {&config.forced_in, &config.oracle_support})
        for (Index j : *s)
            if (j < 0 || j >= p)
                throw ConfigError("covariate index " + std::to_string(j) + " out of range for " + std::to_string(p) +
                                  " covariates");
}

Eigen::VectorXi censoring_status(const SurvivalData<double>& data) {
    Eigen::VectorXi c(data.n());
    const bool finite_tau = std::isfinite(data.tau);
    for (Index i = 0; i < data.n(); ++i)
        c(i) = data.status(i) == 0 && (!finite_tau || data.time(i) < data.tau) ? 1 : 0;
    return c;
}

std::vector<InferenceReport> run_methods(const SurvivalData<double>& data, const PipelineConfig& config,
                                         const std::vector<Method>& methods) {
    if (methods.empty()) throw ConfigError("no methods requested");
    validate(data);
    validate(config, data.p());
    SharedSteps steps(data, config);
    std::vector<InferenceReport> out;
    out.reserve(methods.size());
    for (Method m : methods) out.push_back(run_one(steps, m));
    return out;
}

InferenceReport run_method(const SurvivalData<double>& data, const PipelineConfig& config, Method method) {
    return run_methods(data, config, {method}).front();
}

}  // namespace coxsel
