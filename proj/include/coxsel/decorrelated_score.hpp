#pragma once

#include "coxsel/cox_engine.hpp"
#include "coxsel/penalized.hpp"

#include <Eigen/QR>

#include <string>
#include <vector>

namespace coxsel {

/// Risk-set functionals at a fixed (alpha, beta). Holds pointers to the
/// dataset and index, which must outlive the context.
template <class Scalar>
struct ScoreContext {
    const SurvivalData<Scalar>* data = nullptr;
    const RiskIndex* index = nullptr;
    Scalar alpha = 0;
    Vec<Scalar> beta;

    Vec<Scalar> expo;       // exp(eta - shift) per row
    Scalar shift = 0;
    Vec<Scalar> increment;  // Breslow increment per group, on the shifted scale
    Vec<Scalar> events;     // tied events per group
    Vec<Scalar> a_bar;      // per group
    Mat<Scalar> l_bar;      // p x K
    Vec<Scalar> var_a;      // risk-set weighted variance of A per group
    Mat<Scalar> cov_la;     // p x K weighted covariance of L with A

    Vec<Scalar> resid_a;    // exposure Schoenfeld residual per event
    Mat<Scalar> resid_l;    // events x p

    Index n() const { return data->n(); }
    Index p() const { return data->p(); }
    Index n_groups() const { return index->n_groups(); }
    /// Breslow hazard increments on the original scale.
    Vec<Scalar> baseline_increments() const { return increment * std::exp(-shift); }
};

template <class Scalar>
ScoreContext<Scalar> build_score_context(const SurvivalData<Scalar>& data, const RiskIndex& idx, Scalar alpha,
                                         const Vec<Scalar>& beta) {
    detail::require_events(idx);
    const Index n = data.n();
    const Index p = data.p();
    const Index groups = idx.n_groups();
    ScoreContext<Scalar> ctx;
    ctx.data = &data;
    ctx.index = &idx;
    ctx.alpha = alpha;
    ctx.beta = beta;

    const Vec<Scalar> eta = linear_predictor(data, alpha, beta);
    ctx.shift = eta.maxCoeff();
    ctx.expo = (eta.array() - ctx.shift).exp().matrix();

    // Running sums on values centered at the sample means.
    const Scalar a_center = data.exposure.mean();
    const Vec<Scalar> l_center = p > 0 ? Vec<Scalar>(data.covariates.colwise().mean().transpose()) : Vec<Scalar>();
    ctx.increment.resize(groups);
    ctx.events.resize(groups);
    ctx.a_bar.resize(groups);
    ctx.l_bar.resize(p, groups);
    ctx.var_a.resize(groups);
    ctx.cov_la.resize(p, groups);
    Scalar s0 = 0, sa = 0, saa = 0;
    Vec<Scalar> sl = Vec<Scalar>::Zero(p), sla = Vec<Scalar>::Zero(p);
    Index pos = n;
    for (Index k = groups - 1; k >= 0; --k) {
        const Index start = idx.risk_set_start[static_cast<std::size_t>(k)];
        while (pos > start) {
            const Index row = idx.event_order[static_cast<std::size_t>(--pos)];
            const Scalar w = ctx.expo(row);
            const Scalar a = data.exposure(row) - a_center;
            s0 += w;
            sa += w * a;
            saa += w * a * a;
            if (p > 0) {
                const Vec<Scalar> l = data.covariates.row(row).transpose() - l_center;
                sl.noalias() += w * l;
                sla.noalias() += (w * a) * l;
            }
        }
        const Scalar abar_c = sa / s0;
        ctx.events(k) = static_cast<Scalar>(idx.group_size(k));
        ctx.increment(k) = ctx.events(k) / s0;
        ctx.a_bar(k) = abar_c + a_center;
        ctx.var_a(k) = std::max(Scalar(0), saa / s0 - abar_c * abar_c);
        if (p > 0) {
            const Vec<Scalar> lbar_c = sl / s0;
            ctx.l_bar.col(k) = lbar_c + l_center;
            ctx.cov_la.col(k) = sla / s0 - abar_c * lbar_c;
        }
    }

    const Index m = idx.n_events();
    ctx.resid_a.resize(m);
    ctx.resid_l.resize(m, p);
    for (Index e = 0; e < m; ++e) {
        const Index row = idx.event_rows[static_cast<std::size_t>(e)];
        const Index g = idx.row_group[static_cast<std::size_t>(row)];
        ctx.resid_a(e) = data.exposure(row) - ctx.a_bar(g);
        if (p > 0) ctx.resid_l.row(e) = data.covariates.row(row) - ctx.l_bar.col(g).transpose();
    }
    return ctx;
}

template <class Scalar>
struct UHat {
    Vec<Scalar> values;  // per subject
    Scalar mean = 0;
};

/// Decorrelated score contributions. The compensator is a sum over the
/// atoms of the Breslow measure up to each subject's exit.
template <class Scalar>
UHat<Scalar> u_hat(const ScoreContext<Scalar>& ctx, const Vec<Scalar>& gamma) {
    const SurvivalData<Scalar>& data = *ctx.data;
    const RiskIndex& idx = *ctx.index;
    const Index n = data.n();
    const Index groups = idx.n_groups();
    if (gamma.size() != data.p()) throw ConfigError("u_hat: gamma has the wrong length");

    Vec<Scalar> cbar(groups);
    for (Index k = 0; k < groups; ++k)
        cbar(k) = ctx.a_bar(k) - (data.p() > 0 ? gamma.dot(ctx.l_bar.col(k)) : Scalar(0));

    UHat<Scalar> out;
    out.values.resize(n);
    Index seen = 0;
    Scalar cum_incr = 0, cum_mean = 0;
    for (Index pos = 0; pos < n; ++pos) {
        while (seen < groups && idx.risk_set_start[static_cast<std::size_t>(seen)] <= pos) {
            cum_incr += ctx.increment(seen);
            cum_mean += ctx.increment(seen) * cbar(seen);
            ++seen;
        }
        const Index row = idx.event_order[static_cast<std::size_t>(pos)];
        const Scalar c = data.exposure(row) - (data.p() > 0 ? data.covariates.row(row).dot(gamma) : Scalar(0));
        Scalar u = -ctx.expo(row) * (cum_incr * c - cum_mean);
        const Index g = idx.row_group[static_cast<std::size_t>(row)];
        if (g >= 0) u += c - cbar(g);
        out.values(row) = u;
    }
    out.mean = out.values.mean();
    return out;
}

/// V-hat = (1/n) sum_k d_k [Var_w(A) - gamma' Cov_w(L, A)]; the derivative of
/// E_n{U-hat} in alpha is -V-hat.
template <class Scalar>
Scalar v_hat(const ScoreContext<Scalar>& ctx, const Vec<Scalar>& gamma) {
    Scalar acc = 0;
    for (Index k = 0; k < ctx.n_groups(); ++k) {
        Scalar term = ctx.var_a(k);
        if (ctx.p() > 0) term -= gamma.dot(ctx.cov_la.col(k));
        acc += ctx.events(k) * term;
    }
    return acc / static_cast<Scalar>(ctx.n());
}

template <class Scalar>
Scalar score_alpha_derivative(const ScoreContext<Scalar>& ctx, const Vec<Scalar>& gamma) {
    return -v_hat(ctx, gamma);
}

template <class Scalar>
struct GammaEstimate {
    Vec<Scalar> gamma;
    std::vector<Index> support;
    ColumnSet constrained_to;     // B when constrained
    bool constrained = false;
    Scalar lambda = 0;
    bool rank_deficient = false;
    std::string diagnostic;
};

namespace detail {

template <class Scalar>
std::vector<Index> nonzero(const Vec<Scalar>& v) {
    std::vector<Index> s;
    for (Index j = 0; j < v.size(); ++j)
        if (v(j) != Scalar(0)) s.push_back(j);
    return s;
}

}  // namespace detail

/// Lasso of the exposure residuals on the covariate residuals over events,
/// loss normalized by the number of events.
template <class Scalar>
GammaEstimate<Scalar> estimate_gamma_lasso(const ScoreContext<Scalar>& ctx, Scalar lambda,
                                           const LassoOptions& options = {}) {
    GammaEstimate<Scalar> est;
    est.lambda = lambda;
    if (ctx.p() == 0) {
        est.gamma.resize(0);
        return est;
    }
    est.gamma = weighted_linear_lasso(ctx.resid_a, ctx.resid_l, lambda, options);
    est.support = detail::nonzero(est.gamma);
    return est;
}

/// Same regression with lambda chosen by K-fold CV over events.
template <class Scalar>
GammaEstimate<Scalar> estimate_gamma_lasso_cv(const ScoreContext<Scalar>& ctx, int folds, std::uint64_t seed,
                                              LambdaRule rule = LambdaRule::one_se,
                                              const LassoOptions& options = {}) {
    GammaEstimate<Scalar> est;
    if (ctx.p() == 0) {
        est.gamma.resize(0);
        return est;
    }
    auto [xs, rec] = standardize_columns(ctx.resid_l, false);
    const auto pr = make_gaussian_problem(xs, ctx.resid_a, false);
    const auto sel = select_by_cv(pr, folds, seed, rule, 100, options);
    est.lambda = sel.lambda;
    est.gamma = rec.to_original(sel.coef);
    est.support = detail::nonzero(est.gamma);
    return est;
}

/// Least squares of the exposure residuals on the covariate residuals in B,
/// zero outside B; minimum-norm solution when B is rank deficient.
template <class Scalar>
GammaEstimate<Scalar> constrained_gamma(const ScoreContext<Scalar>& ctx, const ColumnSet& support_b) {
    GammaEstimate<Scalar> est;
    est.constrained = true;
    est.constrained_to = support_b;
    est.gamma = Vec<Scalar>::Zero(ctx.p());
    if (support_b.empty()) return est;
    for (Index j : support_b)
        if (j < 0 || j >= ctx.p()) throw ConfigError("constrained_gamma: column index out of range");
    const Mat<Scalar> xb = ctx.resid_l(Eigen::all, support_b);
    Eigen::CompleteOrthogonalDecomposition<Mat<Scalar>> cod(xb);
    const Vec<Scalar> coef = cod.solve(ctx.resid_a);
    if (cod.rank() < xb.cols()) {
        est.rank_deficient = true;
        est.diagnostic = "covariate residuals rank " + std::to_string(cod.rank()) + " < " +
                         std::to_string(xb.cols()) + "; minimum-norm solution used";
    }
    for (std::size_t c = 0; c < support_b.size(); ++c) est.gamma(support_b[c]) = coef(static_cast<Index>(c));
    est.support = detail::nonzero(est.gamma);
    return est;
}

template <class Scalar>
struct VarianceEstimate {
    Scalar sigma2_hat = 0;
    Scalar v_hat = 0;
    Scalar score_mean = 0;  // E_n{U-hat}
    Scalar se = 0;          // sqrt(sigma2_hat / n)
};

/// Sigma-hat^2 = V-hat^{-1} E_n{U-hat_i^2} V-hat^{-1} at the context's point.
template <class Scalar>
VarianceEstimate<Scalar> theorem1_variance(const ScoreContext<Scalar>& ctx, const Vec<Scalar>& gamma) {
    VarianceEstimate<Scalar> out;
    out.v_hat = v_hat(ctx, gamma);
    if (!(std::abs(out.v_hat) >= Scalar(1e-12))) throw NumericalError("degenerate information");
    const UHat<Scalar> u = u_hat(ctx, gamma);
    out.score_mean = u.mean;
    out.sigma2_hat = u.values.squaredNorm() / static_cast<Scalar>(ctx.n()) / (out.v_hat * out.v_hat);
    out.se = std::sqrt(out.sigma2_hat / static_cast<Scalar>(ctx.n()));
    return out;
}

template <class Scalar>
struct DecorrelatedInference {
    Scalar alpha_check = 0;
    Scalar sigma2_hat = 0;
    Scalar v_hat = 0;
    Scalar score_at_solution = 0;
    Scalar se = 0;
    Index s_beta = 0;
    Index s_gamma = 0;
    Index s_eta = 0;
};

/// One Newton correction of the Lasso exposure estimate along the
/// decorrelated score, with the variance evaluated at the Lasso point.
template <class Scalar>
DecorrelatedInference<Scalar> fang_one_step(const ScoreContext<Scalar>& ctx, const Vec<Scalar>& gamma) {
    const Scalar deriv = score_alpha_derivative(ctx, gamma);
    if (!(std::abs(deriv) >= Scalar(1e-12))) throw NumericalError("degenerate information");
    const auto var = theorem1_variance(ctx, gamma);
    DecorrelatedInference<Scalar> out;
    out.alpha_check = ctx.alpha - var.score_mean / deriv;
    out.sigma2_hat = var.sigma2_hat;
    out.v_hat = var.v_hat;
    out.score_at_solution = var.score_mean;
    out.se = var.se;
    out.s_gamma = static_cast<Index>(detail::nonzero(gamma).size());
    out.s_beta = static_cast<Index>(detail::nonzero(ctx.beta).size());
    return out;
}

}  // namespace coxsel
