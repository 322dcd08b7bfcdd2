#pragma once

// Unpenalized Cox partial-likelihood machinery.
//
// Sign convention: the log partial likelihood is the plain sum over events
// of eta_i - log sum_{risk set} exp(eta_j); the score is its gradient (the sum
// of Schoenfeld residuals) and the information is minus its Hessian. The
// normalized profile score -(1/n) * score is available as profile_score().

#include "coxsel/stats.hpp"
#include "coxsel/survival_data.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace coxsel {

/// Design [A, L(:, columns)] used by the unpenalized engine.
template <class Scalar>
Mat<Scalar> cox_design(const SurvivalData<Scalar>& data, const ColumnSet& columns) {
    Mat<Scalar> x(data.n(), 1 + static_cast<Index>(columns.size()));
    x.col(0) = data.exposure;
    for (std::size_t c = 0; c < columns.size(); ++c) x.col(static_cast<Index>(c) + 1) = data.covariates.col(columns[c]);
    return x;
}

/// alpha * A + L * beta, beta being a full p-vector.
template <class Scalar>
Vec<Scalar> linear_predictor(const SurvivalData<Scalar>& data, Scalar alpha, const Vec<Scalar>& beta) {
    Vec<Scalar> eta = alpha * data.exposure;
    if (data.p() > 0) eta.noalias() += data.covariates * beta;
    return eta;
}

namespace detail {

inline void require_events(const RiskIndex& idx) {
    if (idx.n_events() == 0) throw NumericalError("no events in data");
}

/// Risk-set sums at every event time, accumulated from the last event time
/// backwards. Exponentials are shifted by max(eta); ratios are unaffected.
template <class Scalar>
struct CoxSums {
    Scalar shift = 0;
    Vec<Scalar> expo;   // exp(eta - shift), per row
    Vec<Scalar> s0;     // per group
    Vec<Scalar> events; // tied events per group
    Mat<Scalar> xbar;   // q x K weighted risk-set means
    Mat<Scalar> information;

    Scalar increment(Index k) const { return events(k) / s0(k); }  // on the shifted scale
};

template <class Scalar, class Derived>
CoxSums<Scalar> risk_set_sums(const RiskIndex& idx, const Vec<Scalar>& eta,
                              const Eigen::MatrixBase<Derived>& x, bool with_information) {
    const Index n = idx.n();
    const Index q = x.cols();
    const Index groups = idx.n_groups();
    CoxSums<Scalar> out;
    out.shift = n > 0 ? eta.maxCoeff() : Scalar(0);
    out.expo = (eta.array() - out.shift).exp().matrix();
    out.s0.resize(groups);
    out.events.resize(groups);
    out.xbar.resize(q, groups);
    if (with_information) out.information = Mat<Scalar>::Zero(q, q);

    Scalar s0 = 0;
    Vec<Scalar> s1 = Vec<Scalar>::Zero(q);
    Mat<Scalar> s2;
    if (with_information) s2 = Mat<Scalar>::Zero(q, q);
    Index pos = n;
    for (Index k = groups - 1; k >= 0; --k) {
        const Index start = idx.risk_set_start[static_cast<std::size_t>(k)];
        while (pos > start) {
            --pos;
            const Index row = idx.event_order[static_cast<std::size_t>(pos)];
            const Scalar e = out.expo(row);
            s0 += e;
            s1.noalias() += e * x.row(row).transpose();
            if (with_information)
                s2.template selfadjointView<Eigen::Lower>().rankUpdate(x.row(row).transpose(), e);
        }
        const Scalar d = static_cast<Scalar>(idx.group_size(k));
        out.s0(k) = s0;
        out.events(k) = d;
        out.xbar.col(k) = s1 / s0;
        if (with_information) {
            Mat<Scalar> cov = s2.template selfadjointView<Eigen::Lower>();
            cov /= s0;
            cov.noalias() -= out.xbar.col(k) * out.xbar.col(k).transpose();
            out.information += d * cov;
        }
    }
    return out;
}

template <class Scalar>
Scalar loglik_from_sums(const RiskIndex& idx, const Vec<Scalar>& eta, const CoxSums<Scalar>& sums) {
    Scalar ll = 0;
    for (Index k = 0; k < idx.n_groups(); ++k) {
        for (Index e = idx.group_begin[static_cast<std::size_t>(k)]; e < idx.group_begin[static_cast<std::size_t>(k) + 1]; ++e)
            ll += eta(idx.event_rows[static_cast<std::size_t>(e)]);
        ll -= sums.events(k) * (std::log(sums.s0(k)) + sums.shift);
    }
    return ll;
}

template <class Scalar, class Derived>
Vec<Scalar> score_from_sums(const RiskIndex& idx, const Eigen::MatrixBase<Derived>& x,
                            const CoxSums<Scalar>& sums) {
    Vec<Scalar> score = Vec<Scalar>::Zero(x.cols());
    for (Index k = 0; k < idx.n_groups(); ++k) {
        for (Index e = idx.group_begin[static_cast<std::size_t>(k)]; e < idx.group_begin[static_cast<std::size_t>(k) + 1]; ++e)
            score += x.row(idx.event_rows[static_cast<std::size_t>(e)]).transpose();
        score -= sums.events(k) * sums.xbar.col(k);
    }
    return score;
}

}  // namespace detail

template <class Scalar>
Scalar partial_loglik(const SurvivalData<Scalar>& data, const RiskIndex& idx, Scalar alpha,
                      const Vec<Scalar>& beta) {
    detail::require_events(idx);
    const Vec<Scalar> eta = linear_predictor(data, alpha, beta);
    const Mat<Scalar> none(data.n(), 0);
    return detail::loglik_from_sums(idx, eta, detail::risk_set_sums(idx, eta, none, false));
}

/// Gradient of partial_loglik over (alpha, beta(columns)).
template <class Scalar>
Vec<Scalar> partial_score(const SurvivalData<Scalar>& data, const RiskIndex& idx, Scalar alpha,
                          const Vec<Scalar>& beta, const ColumnSet& columns) {
    detail::require_events(idx);
    const Vec<Scalar> eta = linear_predictor(data, alpha, beta);
    const Mat<Scalar> x = cox_design(data, columns);
    return detail::score_from_sums(idx, x, detail::risk_set_sums(idx, eta, x, false));
}

/// Observed information (minus the Hessian of partial_loglik).
template <class Scalar>
Mat<Scalar> partial_information(const SurvivalData<Scalar>& data, const RiskIndex& idx, Scalar alpha,
                                const Vec<Scalar>& beta, const ColumnSet& columns) {
    detail::require_events(idx);
    const Vec<Scalar> eta = linear_predictor(data, alpha, beta);
    const Mat<Scalar> x = cox_design(data, columns);
    return detail::risk_set_sums(idx, eta, x, true).information;
}

/// The normalized profile score -(1/n) * sum of exposure Schoenfeld residuals.
template <class Scalar>
Scalar profile_score(const SurvivalData<Scalar>& data, const RiskIndex& idx, Scalar alpha,
                     const Vec<Scalar>& beta) {
    return -partial_score(data, idx, alpha, beta, ColumnSet{})(0) / static_cast<Scalar>(data.n());
}

/// Breslow hazard increments dN-bar(t) / E_n{R(t) exp(eta)} at distinct event times.
template <class Scalar>
struct BaselineHazard {
    Vec<Scalar> times;
    Vec<Scalar> increments;

    Vec<Scalar> cumulative() const {
        Vec<Scalar> c(increments.size());
        Scalar acc = 0;
        for (Index k = 0; k < increments.size(); ++k) c(k) = (acc += increments(k));
        return c;
    }
};

template <class Scalar>
BaselineHazard<Scalar> breslow_baseline(const SurvivalData<Scalar>& data, const RiskIndex& idx,
                                        Scalar alpha, const Vec<Scalar>& beta) {
    detail::require_events(idx);
    const Vec<Scalar> eta = linear_predictor(data, alpha, beta);
    const Mat<Scalar> none(data.n(), 0);
    const auto sums = detail::risk_set_sums(idx, eta, none, false);
    BaselineHazard<Scalar> out;
    out.times.resize(idx.n_groups());
    out.increments.resize(idx.n_groups());
    for (Index k = 0; k < idx.n_groups(); ++k) {
        out.times(k) = data.time(idx.group_row(k));
        out.increments(k) = sums.increment(k) * std::exp(-sums.shift);
    }
    return out;
}

/// Per-subject integrals of (c_i - c-bar(t)) dM_i(t) for each column c of
/// `contrasts`, with dM the Breslow martingale increment at `eta`. With the
/// design as contrasts these are the score contributions of the sandwich;
/// with a single decorrelated contrast they are the Theorem-1 summands.
template <class Scalar, class Derived>
Mat<Scalar> martingale_integrals(const RiskIndex& idx, const Vec<Scalar>& eta,
                                 const Eigen::MatrixBase<Derived>& contrasts) {
    detail::require_events(idx);
    const Index n = idx.n();
    const Index q = contrasts.cols();
    const auto sums = detail::risk_set_sums(idx, eta, contrasts, false);
    const Index groups = idx.n_groups();

    // Prefix sums over groups of the hazard increment and increment * mean.
    Vec<Scalar> cum_incr(groups);
    Mat<Scalar> cum_mean(q, groups);
    Scalar acc = 0;
    Vec<Scalar> acc_mean = Vec<Scalar>::Zero(q);
    for (Index k = 0; k < groups; ++k) {
        acc += sums.increment(k);
        acc_mean += sums.increment(k) * sums.xbar.col(k);
        cum_incr(k) = acc;
        cum_mean.col(k) = acc_mean;
    }

    Mat<Scalar> out = Mat<Scalar>::Zero(n, q);
    Index seen = 0;  // groups whose risk set contains the current position
    for (Index pos = 0; pos < n; ++pos) {
        while (seen < groups && idx.risk_set_start[static_cast<std::size_t>(seen)] <= pos) ++seen;
        const Index row = idx.event_order[static_cast<std::size_t>(pos)];
        if (seen > 0)
            out.row(row) = -sums.expo(row) *
                           (cum_incr(seen - 1) * contrasts.row(row) - cum_mean.col(seen - 1).transpose());
        const Index g = idx.row_group[static_cast<std::size_t>(row)];
        if (g >= 0) out.row(row) += contrasts.row(row) - sums.xbar.col(g).transpose();
    }
    return out;
}

template <class Scalar>
struct ResidualSet {
    std::vector<Index> event_rows;   // row of each residual
    Vec<Scalar> schoenfeld_a;        // per event
    Mat<Scalar> schoenfeld_l;        // events x p
    Vec<Scalar> martingale;          // per subject
};

/// Schoenfeld residuals of the exposure and every covariate column, and
/// martingale residuals, at the linear predictor alpha * A + L * beta.
template <class Scalar>
ResidualSet<Scalar> schoenfeld_residuals(const SurvivalData<Scalar>& data, const RiskIndex& idx,
                                         Scalar alpha, const Vec<Scalar>& beta) {
    detail::require_events(idx);
    const Vec<Scalar> eta = linear_predictor(data, alpha, beta);
    Mat<Scalar> x(data.n(), 1 + data.p());
    x.col(0) = data.exposure;
    x.rightCols(data.p()) = data.covariates;
    const auto sums = detail::risk_set_sums(idx, eta, x, false);

    ResidualSet<Scalar> out;
    out.event_rows = idx.event_rows;
    const Index m = idx.n_events();
    out.schoenfeld_a.resize(m);
    out.schoenfeld_l.resize(m, data.p());
    for (Index e = 0; e < m; ++e) {
        const Index row = idx.event_rows[static_cast<std::size_t>(e)];
        const Index g = idx.row_group[static_cast<std::size_t>(row)];
        const Vec<Scalar> r = x.row(row).transpose() - sums.xbar.col(g);
        out.schoenfeld_a(e) = r(0);
        out.schoenfeld_l.row(e) = r.tail(data.p()).transpose();
    }
    Vec<Scalar> mart(data.n());
    Index seen = 0;
    Scalar cum = 0;
    for (Index pos = 0; pos < data.n(); ++pos) {
        while (seen < idx.n_groups() && idx.risk_set_start[static_cast<std::size_t>(seen)] <= pos) {
            cum += sums.increment(seen);
            ++seen;
        }
        const Index row = idx.event_order[static_cast<std::size_t>(pos)];
        mart(row) = (idx.row_group[static_cast<std::size_t>(row)] >= 0 ? Scalar(1) : Scalar(0)) -
                    sums.expo(row) * cum;
    }
    out.martingale = std::move(mart);
    return out;
}

template <class Scalar>
struct CoxFit {
    ColumnSet columns;          // covariates in the model, besides the exposure
    Scalar alpha_hat = 0;
    Vec<Scalar> beta_hat;       // full p-vector, zero outside `columns`
    Scalar loglik = 0;
    Vec<Scalar> score;          // at the solution, over (alpha, beta(columns))
    BaselineHazard<Scalar> baseline;
    Mat<Scalar> naive_vcov;     // over (alpha, beta(columns))
    Mat<Scalar> robust_vcov;
    bool converged = false;
    int iterations = 0;

    Scalar alpha_se_robust() const { return std::sqrt(robust_vcov(0, 0)); }
    Scalar alpha_se_naive() const { return std::sqrt(naive_vcov(0, 0)); }
};

struct CoxOptions {
    double score_tolerance = 1e-9;  // on the max-norm of the score
    int max_iterations = 100;
    int max_halvings = 30;
    double divergence_limit = 50.0;  // |coef| * sd(column)
};

/// Sandwich I^{-1} (sum_i s_i s_i') I^{-1} with martingale-form s_i.
template <class Scalar>
Mat<Scalar> robust_variance(const SurvivalData<Scalar>& data, const RiskIndex& idx,
                            const CoxFit<Scalar>& fit) {
    const Mat<Scalar> x = cox_design(data, fit.columns);
    const Vec<Scalar> eta = linear_predictor(data, fit.alpha_hat, fit.beta_hat);
    const Mat<Scalar> info = detail::risk_set_sums(idx, eta, x, true).information;
    Eigen::LLT<Mat<Scalar>> llt(info);
    if (llt.info() != Eigen::Success || llt.rcond() < Scalar(1e-14))
        throw NumericalError("singular information matrix");
    const Mat<Scalar> s = martingale_integrals(idx, eta, x);
    const Mat<Scalar> inv = llt.solve(Mat<Scalar>::Identity(x.cols(), x.cols()));
    Mat<Scalar> v = inv * (s.transpose() * s) * inv;
    return (v + v.transpose()) / Scalar(2);
}

/// Newton-Raphson with step halving for the exposure plus `columns`.
template <class Scalar>
CoxFit<Scalar> fit_cox(const SurvivalData<Scalar>& data, const RiskIndex& idx, const ColumnSet& columns,
                       const CoxOptions& options = {}) {
    detail::require_events(idx);
    for (Index c : columns)
        if (c < 0 || c >= data.p()) throw ConfigError("fit_cox: column index out of range");
    const Index q = 1 + static_cast<Index>(columns.size());
    if (q >= idx.n_events())
        throw NumericalError("singular fit: " + std::to_string(q) + " coefficients but only " +
                             std::to_string(idx.n_events()) + " events");

    const Mat<Scalar> x = cox_design(data, columns);
    Vec<Scalar> sd(q);
    for (Index j = 0; j < q; ++j) {
        const Scalar mean = x.col(j).mean();
        sd(j) = std::sqrt((x.col(j).array() - mean).square().mean());
    }
    auto column_name = [&](Index j) {
        return j == 0 ? data.exposure_name : data.covariate_name(columns[static_cast<std::size_t>(j - 1)]);
    };

    Vec<Scalar> theta = Vec<Scalar>::Zero(q);
    auto evaluate = [&](const Vec<Scalar>& th, bool info) {
        Vec<Scalar> eta = x * th;
        auto sums = detail::risk_set_sums(idx, eta, x, info);
        return std::make_pair(std::move(eta), std::move(sums));
    };

    auto [eta, sums] = evaluate(theta, true);
    Scalar ll = detail::loglik_from_sums(idx, eta, sums);
    Vec<Scalar> score = detail::score_from_sums(idx, x, sums);

    CoxFit<Scalar> fit;
    fit.columns = columns;
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        if (score.template lpNorm<Eigen::Infinity>() <= Scalar(options.score_tolerance)) {
            fit.converged = true;
            break;
        }
        Eigen::LLT<Mat<Scalar>> llt(sums.information);
        if (llt.info() != Eigen::Success || llt.rcond() < Scalar(1e-14))
            throw NumericalError("singular information matrix");
        const Vec<Scalar> step = llt.solve(score);
        Scalar t = 1;
        bool accepted = false;
        Vec<Scalar> cand;
        for (int h = 0; h <= options.max_halvings; ++h, t /= 2) {
            cand = theta + t * step;
            const Vec<Scalar> eta_c = x * cand;
            const Mat<Scalar> none(data.n(), 0);
            const Scalar ll_c = detail::loglik_from_sums(idx, eta_c, detail::risk_set_sums(idx, eta_c, none, false));
            if (std::isfinite(static_cast<double>(ll_c)) && ll_c >= ll - Scalar(1e-12) * (Scalar(1) + std::abs(ll))) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        theta = cand;
        for (Index j = 0; j < q; ++j)
            if (std::abs(theta(j) * sd(j)) > Scalar(options.divergence_limit))
                throw NumericalError("monotone likelihood: coefficient of '" + column_name(j) + "' diverges");
        std::tie(eta, sums) = evaluate(theta, true);
        ll = detail::loglik_from_sums(idx, eta, sums);
        score = detail::score_from_sums(idx, x, sums);
    }
    if (!fit.converged && score.template lpNorm<Eigen::Infinity>() <= Scalar(options.score_tolerance))
        fit.converged = true;
    fit.iterations = iter;
    fit.alpha_hat = theta(0);
    fit.beta_hat = Vec<Scalar>::Zero(data.p());
    for (std::size_t c = 0; c < columns.size(); ++c) fit.beta_hat(columns[c]) = theta(static_cast<Index>(c) + 1);
    fit.loglik = ll;
    fit.score = score;

    Eigen::LLT<Mat<Scalar>> llt(sums.information);
    if (llt.info() != Eigen::Success || llt.rcond() < Scalar(1e-14))
        throw NumericalError("singular information matrix");
    const Mat<Scalar> inv = llt.solve(Mat<Scalar>::Identity(q, q));
    // A Newton step that stays large while the score vanishes means the
    // optimum sits at infinity.
    const Vec<Scalar> last_step = inv * score;
    for (Index j = 0; j < q; ++j)
        if (std::abs(last_step(j)) > Scalar(1e-4) * std::max(Scalar(1), std::abs(theta(j))))
            throw NumericalError("monotone likelihood: coefficient of '" + column_name(j) + "' diverges");
    fit.naive_vcov = (inv + inv.transpose()) / Scalar(2);
    const Mat<Scalar> s = martingale_integrals(idx, eta, x);
    Mat<Scalar> v = inv * (s.transpose() * s) * inv;
    fit.robust_vcov = (v + v.transpose()) / Scalar(2);
    fit.baseline = breslow_baseline(data, idx, fit.alpha_hat, fit.beta_hat);
    return fit;
}

template <class Scalar>
ResidualSet<Scalar> schoenfeld_residuals(const SurvivalData<Scalar>& data, const RiskIndex& idx,
                                         const CoxFit<Scalar>& fit) {
    return schoenfeld_residuals(data, idx, fit.alpha_hat, fit.beta_hat);
}

}  // namespace coxsel
