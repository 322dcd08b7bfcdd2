#pragma once

// l1-penalized Cox, linear and logistic regression.
//
// Objective: loss(eta) + lambda * sum_j pf_j |b_j|, with eta = X b (+ intercept)
// and the loss normalized by the total observation weight W:
//   cox       -(1/W) weighted log partial likelihood (Breslow ties)
//   gaussian  (1/2W) sum w_i (y_i - eta_i)^2
//   binomial  -(1/W) sum w_i [y_i eta_i - log(1 + e^eta_i)]
// Solved by proximal Newton steps with the exact Hessian in eta-space; each
// quadratic model is minimized by cyclic coordinate descent over a working
// set (active columns, strong-rule survivors, unpenalized columns), followed
// by a line search on the objective and a KKT check over all columns.

#include "coxsel/survival_data.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace coxsel {

enum class LossKind { cox, gaussian, binomial };

inline const char* to_string(LossKind kind) {
    switch (kind) {
        case LossKind::cox: return "cox";
        case LossKind::gaussian: return "gaussian";
        case LossKind::binomial: return "binomial";
    }
    return "?";
}

template <class Scalar>
struct LassoProblem {
    LossKind loss = LossKind::gaussian;
    Mat<Scalar> x;
    Vec<Scalar> response;         // gaussian / binomial
    RiskIndex index;              // cox
    Vec<Scalar> penalty_factor;   // 0 = unpenalized
    Vec<Scalar> weights;          // observation weights
    bool intercept = false;       // unpenalized, not part of x

    Index n() const { return x.rows(); }
    Index p() const { return x.cols(); }
};

template <class Scalar>
void check_problem(const LassoProblem<Scalar>& pr) {
    const Index n = pr.n();
    if (n < 1) throw ConfigError("lasso: empty design");
    if (pr.penalty_factor.size() != pr.p()) throw ConfigError("lasso: penalty factor length mismatch");
    if (pr.weights.size() != n) throw ConfigError("lasso: weight length mismatch");
    if ((pr.penalty_factor.array() < Scalar(0)).any()) throw ConfigError("lasso: negative penalty factor");
    if ((pr.weights.array() < Scalar(0)).any()) throw ConfigError("lasso: negative observation weight");
    if (!(pr.weights.sum() > Scalar(0))) throw ConfigError("lasso: observation weights sum to zero");
    if (pr.loss == LossKind::cox) {
        if (pr.intercept) throw ConfigError("lasso: the cox loss has no intercept");
        if (pr.index.n() != n) throw ConfigError("lasso: risk index does not match the design");
        if (pr.index.n_events() == 0) throw NumericalError("no events in data");
    } else {
        if (pr.response.size() != n) throw ConfigError("lasso: response length mismatch");
        if (pr.loss == LossKind::binomial)
            for (Index i = 0; i < n; ++i)
                if (pr.response(i) != Scalar(0) && pr.response(i) != Scalar(1))
                    throw ConfigError("lasso: binomial response must be 0/1");
    }
}

template <class Derived>
LassoProblem<typename Derived::Scalar> make_gaussian_problem(const Eigen::MatrixBase<Derived>& x,
                                                             const Vec<typename Derived::Scalar>& y,
                                                             bool intercept = true) {
    using Scalar = typename Derived::Scalar;
    LassoProblem<Scalar> pr;
    pr.loss = LossKind::gaussian;
    pr.x = x;
    pr.response = y;
    pr.penalty_factor = Vec<Scalar>::Ones(x.cols());
    pr.weights = Vec<Scalar>::Ones(x.rows());
    pr.intercept = intercept;
    check_problem(pr);
    return pr;
}

template <class Derived>
LassoProblem<typename Derived::Scalar> make_binomial_problem(const Eigen::MatrixBase<Derived>& x,
                                                             const Vec<typename Derived::Scalar>& y) {
    auto pr = make_gaussian_problem(x, y, true);
    pr.loss = LossKind::binomial;
    check_problem(pr);
    return pr;
}

template <class Derived>
LassoProblem<typename Derived::Scalar> make_cox_problem(const Eigen::MatrixBase<Derived>& x,
                                                        const Vec<typename Derived::Scalar>& time,
                                                        const Eigen::VectorXi& status,
                                                        typename Derived::Scalar tau =
                                                            infinity<typename Derived::Scalar>) {
    using Scalar = typename Derived::Scalar;
    LassoProblem<Scalar> pr;
    pr.loss = LossKind::cox;
    pr.x = x;
    pr.index = build_risk_index(time, status, tau);
    pr.penalty_factor = Vec<Scalar>::Ones(x.cols());
    pr.weights = Vec<Scalar>::Ones(x.rows());
    check_problem(pr);
    return pr;
}

struct LassoOptions {
    double tolerance = 1e-8;       // max coefficient change per sweep / Newton step
    int max_sweeps = 10000;        // coordinate-descent sweeps per lambda
    int max_newton = 200;
    double kkt_tolerance = 1e-6;
    double eta_clip = 30.0;        // |eta| bound inside the Hessian only
    bool early_stop = true;        // glmnet-style path truncation
    double min_deviance_change = 1e-5;
    double max_deviance_ratio = 0.999;
    bool trace = false;            // record the objective after each Newton step
};

template <class Scalar>
struct LassoSolution {
    Scalar lambda = 0;
    Vec<Scalar> coef;
    Scalar intercept = 0;
    Scalar objective = 0;      // penalized
    Scalar loss = 0;           // smooth part
    Scalar kkt_violation = 0;
    Index active_size = 0;
    int sweeps = 0;
    int newton_steps = 0;
    bool converged = false;
    std::vector<Scalar> objective_trace;
    Vec<Scalar> gradient;      // smooth-part gradient over columns at the solution

    std::vector<Index> support() const {
        std::vector<Index> s;
        for (Index j = 0; j < coef.size(); ++j)
            if (coef(j) != Scalar(0)) s.push_back(j);
        return s;
    }
};

namespace detail {

template <class Scalar>
Scalar soft_threshold(Scalar u, Scalar t) {
    // Ties at the threshold resolve to zero despite rounding in the gradient.
    const Scalar edge = t * (Scalar(1) + Scalar(64) * std::numeric_limits<Scalar>::epsilon());
    if (u > edge) return u - t;
    if (u < -edge) return u + t;
    return Scalar(0);
}

template <class Scalar>
class GaussianLoss {
  public:
    static constexpr bool constant_hessian = true;

    explicit GaussianLoss(const LassoProblem<Scalar>& pr)
        : y_(pr.response), w_(pr.weights), inv_w_(Scalar(1) / pr.weights.sum()) {}

    Scalar value(const Vec<Scalar>& eta) const {
        return Scalar(0.5) * inv_w_ * (w_.array() * (y_ - eta).array().square()).sum();
    }
    Scalar prepare(const Vec<Scalar>& eta, Vec<Scalar>& grad, double) {
        grad = -inv_w_ * w_.cwiseProduct(y_ - eta);
        return value(eta);
    }
    void hess_times(const Eigen::Ref<const Vec<Scalar>>& v, Eigen::Ref<Vec<Scalar>> out) const {
        out = inv_w_ * w_.cwiseProduct(v);
    }
    void hess_columns(const Mat<Scalar>& x, const std::vector<Index>& cols, Mat<Scalar>& out) const {
        for (std::size_t c = 0; c < cols.size(); ++c)
            out.col(static_cast<Index>(c)) = inv_w_ * w_.cwiseProduct(x.col(cols[c]));
    }
    Scalar saturated() const { return 0; }

  private:
    const Vec<Scalar>& y_;
    const Vec<Scalar>& w_;
    Scalar inv_w_;
};

template <class Scalar>
class BinomialLoss {
  public:
    static constexpr bool constant_hessian = false;

    explicit BinomialLoss(const LassoProblem<Scalar>& pr)
        : y_(pr.response), w_(pr.weights), inv_w_(Scalar(1) / pr.weights.sum()) {}

    Scalar value(const Vec<Scalar>& eta) const {
        Scalar acc = 0;
        for (Index i = 0; i < eta.size(); ++i) {
            if (w_(i) == Scalar(0)) continue;
            const Scalar e = eta(i);
            const Scalar softplus = std::max(e, Scalar(0)) + std::log1p(std::exp(-std::abs(e)));
            acc += w_(i) * (softplus - y_(i) * e);
        }
        return inv_w_ * acc;
    }
    Scalar prepare(const Vec<Scalar>& eta, Vec<Scalar>& grad, double clip) {
        const Index n = eta.size();
        grad.resize(n);
        h_.resize(n);
        for (Index i = 0; i < n; ++i) {
            const Scalar mu = Scalar(1) / (Scalar(1) + std::exp(-eta(i)));
            grad(i) = inv_w_ * w_(i) * (mu - y_(i));
            const Scalar ec = std::clamp(eta(i), Scalar(-clip), Scalar(clip));
            const Scalar mc = Scalar(1) / (Scalar(1) + std::exp(-ec));
            h_(i) = inv_w_ * w_(i) * mc * (Scalar(1) - mc);
        }
        return value(eta);
    }
    void hess_times(const Eigen::Ref<const Vec<Scalar>>& v, Eigen::Ref<Vec<Scalar>> out) const { out = h_.cwiseProduct(v); }
    void hess_columns(const Mat<Scalar>& x, const std::vector<Index>& cols, Mat<Scalar>& out) const {
        for (std::size_t c = 0; c < cols.size(); ++c)
            out.col(static_cast<Index>(c)) = h_.cwiseProduct(x.col(cols[c]));
    }
    /// X(:, cols)' H X(:, cols).
    void hess_gram(const Mat<Scalar>& x, const std::vector<Index>& cols, Mat<Scalar>& out) const {
        const Mat<Scalar> y = h_.cwiseSqrt().asDiagonal() * x(Eigen::all, cols);
        const Index m = y.cols();
        out.setZero(m, m);
        out.template selfadjointView<Eigen::Lower>().rankUpdate(y.transpose());
        out = out.template selfadjointView<Eigen::Lower>();
    }
    Scalar saturated() const { return 0; }

  private:
    const Vec<Scalar>& y_;
    const Vec<Scalar>& w_;
    Scalar inv_w_;
    Vec<Scalar> h_;
};

/// Weighted Breslow partial likelihood. The Hessian-vector product runs in
/// O(n + K) from suffix sums over the sorted risk sets.
template <class Scalar>
class CoxLoss {
  public:
    static constexpr bool constant_hessian = false;

    explicit CoxLoss(const LassoProblem<Scalar>& pr) : idx_(pr.index), w_(pr.weights) {
        const Index n = idx_.n();
        const Index groups = idx_.n_groups();
        inv_w_ = Scalar(1) / w_.sum();
        last_group_.assign(static_cast<std::size_t>(n), -1);
        Index seen = 0;
        for (Index pos = 0; pos < n; ++pos) {
            while (seen < groups && idx_.risk_set_start[static_cast<std::size_t>(seen)] <= pos) ++seen;
            last_group_[static_cast<std::size_t>(idx_.event_order[static_cast<std::size_t>(pos)])] = seen - 1;
        }
        d_ = Vec<Scalar>::Zero(groups);
        event_w_ = Vec<Scalar>::Zero(n);
        for (Index k = 0; k < groups; ++k)
            for (Index e = idx_.group_begin[static_cast<std::size_t>(k)]; e < idx_.group_begin[static_cast<std::size_t>(k) + 1]; ++e) {
                const Index row = idx_.event_rows[static_cast<std::size_t>(e)];
                d_(k) += w_(row);
                event_w_(row) = w_(row);
            }
        sorted_ = true;
        for (Index pos = 0; pos < n; ++pos)
            if (idx_.event_order[static_cast<std::size_t>(pos)] != pos) sorted_ = false;
        s0_.resize(groups);
        cache_s0_.resize(groups);
        c1_.resize(groups);
        a_.resize(groups);
        c2_.resize(groups);
        ratio_.resize(groups);
        row_w_.resize(n);
        row_diag_.resize(n);
    }

    // The last evaluation is kept: the line search usually ends where the
    // next prepare() starts.
    Scalar value(const Vec<Scalar>& eta) const {
        if (cached_ && eta.size() == cache_eta_.size() && eta == cache_eta_) return cache_value_;
        const Scalar shift = eta.maxCoeff();
        cache_we_ = w_.array() * (eta.array() - shift).exp();
        suffix_sums(cache_we_, cache_s0_);
        Scalar ll = event_w_.dot(eta);
        for (Index k = 0; k < idx_.n_groups(); ++k)
            if (d_(k) > Scalar(0)) ll -= d_(k) * (std::log(cache_s0_(k)) + shift);
        cache_eta_ = eta;
        cache_value_ = -inv_w_ * ll;
        cached_ = true;
        return cache_value_;
    }

    Scalar prepare(const Vec<Scalar>& eta, Vec<Scalar>& grad, double clip) {
        const Index n = idx_.n();
        const Index groups = idx_.n_groups();
        // Gradient at the exact eta.
        const Scalar value_at_eta = value(eta);
        we_ = cache_we_;
        s0_ = cache_s0_;
        Scalar acc = 0;
        for (Index k = 0; k < groups; ++k) {
            if (d_(k) > Scalar(0)) acc += d_(k) / s0_(k);
            c1_(k) = acc;
        }
        grad.resize(n);
        for (Index i = 0; i < n; ++i) {
            const Index g = last_group_[static_cast<std::size_t>(i)];
            grad(i) = -inv_w_ * (event_w_(i) - (g >= 0 ? we_(i) * c1_(g) : Scalar(0)));
        }
        // Curvature at the clipped eta.
        const Scalar c = static_cast<Scalar>(clip);
        if (eta.cwiseAbs().maxCoeff() > c) {
            const Vec<Scalar> clipped = eta.cwiseMax(-c).cwiseMin(c);
            const Scalar sh = clipped.maxCoeff();
            we_ = w_.array() * (clipped.array() - sh).exp();
            suffix_sums(we_, s0_);
            acc = 0;
            for (Index k = 0; k < groups; ++k) {
                if (d_(k) > Scalar(0)) acc += d_(k) / s0_(k);
                c1_(k) = acc;
            }
        }
        for (Index k = 0; k < groups; ++k) ratio_(k) = d_(k) > Scalar(0) ? d_(k) / (s0_(k) * s0_(k)) : Scalar(0);
        for (Index i = 0; i < n; ++i) {
            const Index g = last_group_[static_cast<std::size_t>(i)];
            row_w_(i) = g >= 0 ? inv_w_ * we_(i) : Scalar(0);
            row_diag_(i) = g >= 0 ? row_w_(i) * c1_(g) : Scalar(0);
        }
        return value_at_eta;
    }

    void hess_times(const Eigen::Ref<const Vec<Scalar>>& v, Eigen::Ref<Vec<Scalar>> out) {
        const Index n = idx_.n();
        const Index groups = idx_.n_groups();
        Scalar acc = 0;
        Index pos = n;
        for (Index k = groups - 1; k >= 0; --k) {
            const Index start = idx_.risk_set_start[static_cast<std::size_t>(k)];
            if (sorted_) {
                const Scalar* we = we_.data();
                const Scalar* vv = v.data();
                while (pos > start) {
                    --pos;
                    acc += we[pos] * vv[pos];
                }
            } else {
                while (pos > start) {
                    --pos;
                    const Index row = idx_.event_order[static_cast<std::size_t>(pos)];
                    acc += we_(row) * v(row);
                }
            }
            a_(k) = acc;
        }
        acc = 0;
        for (Index k = 0; k < groups; ++k) {
            acc += ratio_(k) * a_(k);
            c2_(k) = acc;
        }
        if (sorted_) {
            const Scalar* vv = v.data();
            const Scalar* diag = row_diag_.data();
            const Scalar* rw = row_w_.data();
            Scalar* o = out.data();
            const Index first = groups > 0 ? idx_.risk_set_start[0] : n;
            for (Index i = 0; i < first; ++i) o[i] = Scalar(0);
            for (Index k = 0; k < groups; ++k) {
                const Index end = k + 1 < groups ? idx_.risk_set_start[static_cast<std::size_t>(k) + 1] : n;
                const Scalar c2 = c2_(k);
                for (Index i = idx_.risk_set_start[static_cast<std::size_t>(k)]; i < end; ++i)
                    o[i] = diag[i] * vv[i] - rw[i] * c2;
            }
            return;
        }
        for (Index i = 0; i < n; ++i) {
            const Index g = last_group_[static_cast<std::size_t>(i)];
            out(i) = g >= 0 ? row_diag_(i) * v(i) - row_w_(i) * c2_(g) : Scalar(0);
        }
    }

    void hess_columns(const Mat<Scalar>& x, const std::vector<Index>& cols, Mat<Scalar>& out) {
        for (std::size_t c = 0; c < cols.size(); ++c) hess_times(x.col(cols[c]), out.col(static_cast<Index>(c)));
    }

    /// X(:, cols)' H X(:, cols) = X'DX - (1/W) sum_k d_k / S0_k^2 A_k A_k',
    /// A_k the weighted column sums over risk set k.
    void hess_gram(const Mat<Scalar>& x, const std::vector<Index>& cols, Mat<Scalar>& out) {
        const Index m = static_cast<Index>(cols.size());
        if (!sorted_) {
            Mat<Scalar> hx(x.rows(), m);
            hess_columns(x, cols, hx);
            out.noalias() = x(Eigen::all, cols).transpose() * hx;
            return;
        }
        const Index groups = idx_.n_groups();
        Mat<Scalar> xs = x(Eigen::all, cols);
        Mat<Scalar> risk(groups, m);
        Eigen::Matrix<Scalar, 1, Eigen::Dynamic> acc = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Zero(m);
        Index pos = idx_.n();
        for (Index k = groups - 1; k >= 0; --k) {
            const Index start = idx_.risk_set_start[static_cast<std::size_t>(k)];
            while (pos > start) {
                --pos;
                acc.noalias() += we_(pos) * xs.row(pos);
            }
            risk.row(k) = std::sqrt(inv_w_ * ratio_(k)) * acc;
        }
        xs = row_diag_.cwiseSqrt().asDiagonal() * xs;
        out.setZero(m, m);
        auto lower = out.template selfadjointView<Eigen::Lower>();
        lower.rankUpdate(xs.transpose());
        lower.rankUpdate(risk.transpose(), Scalar(-1));
        out = out.template selfadjointView<Eigen::Lower>();
    }

    Scalar saturated() const {
        Scalar acc = 0;
        for (Index k = 0; k < d_.size(); ++k)
            if (d_(k) > Scalar(0)) acc += d_(k) * std::log(d_(k));
        return inv_w_ * acc;
    }

  private:
    void suffix_sums(const Vec<Scalar>& we, Vec<Scalar>& s0) const {
        Scalar acc = 0;
        Index pos = idx_.n();
        for (Index k = idx_.n_groups() - 1; k >= 0; --k) {
            const Index start = idx_.risk_set_start[static_cast<std::size_t>(k)];
            if (sorted_)
                while (pos > start) acc += we(--pos);
            while (pos > start) acc += we(idx_.event_order[static_cast<std::size_t>(--pos)]);
            s0(k) = acc;
        }
    }

    const RiskIndex& idx_;
    const Vec<Scalar>& w_;
    Scalar inv_w_ = 1;
    std::vector<Index> last_group_;
    bool sorted_ = false;
    Vec<Scalar> d_, event_w_, we_, s0_, c1_, a_, c2_, ratio_, row_w_, row_diag_;
    mutable bool cached_ = false;
    mutable Vec<Scalar> cache_eta_, cache_we_, cache_s0_;
    mutable Scalar cache_value_ = 0;
};

/// Pathwise solver state for one problem. Column p of the working design is
/// the intercept when the problem has one.
template <class Scalar, class Loss>
class LassoSolver {
  public:
    LassoSolver(const LassoProblem<Scalar>& pr, const LassoOptions& options)
        : pr_(pr), opt_(options), loss_(pr) {
        const Index p = pr.p();
        cols_ = p + (pr.intercept ? 1 : 0);
        x_.resize(pr.n(), cols_);
        x_.leftCols(p) = pr.x;
        pf_ = Vec<Scalar>::Zero(cols_);
        pf_.head(p) = pr.penalty_factor;
        if (pr.intercept) x_.col(p).setOnes();
        beta_ = Vec<Scalar>::Zero(cols_);
        eta_ = Vec<Scalar>::Zero(pr.n());
        grad_ = Vec<Scalar>::Zero(cols_);
        for (Index j = 0; j < cols_; ++j)
            if (pf_(j) == Scalar(0)) unpenalized_.push_back(j);
    }

    Index columns() const { return cols_; }
    const Vec<Scalar>& beta() const { return beta_; }
    const Vec<Scalar>& gradient() const { return grad_; }
    Loss& loss() { return loss_; }

    void set_start(const Vec<Scalar>& beta) {
        beta_ = beta;
        eta_ = x_ * beta_;
        prepared_ = false;
    }

    /// Largest KKT residual at the current coefficients.
    Scalar kkt_violation(Scalar lambda) {
        refresh_gradient();
        Scalar worst = 0;
        for (Index j = 0; j < cols_; ++j) worst = std::max(worst, kkt_term(j, lambda));
        return worst;
    }

    Scalar penalty(const Vec<Scalar>& b, Scalar lambda) const {
        return lambda * (pf_.array() * b.array().abs()).sum();
    }

    /// Fit with only the unpenalized columns free; returns the full gradient.
    void fit_null() {
        beta_.setZero();
        eta_.setZero();
        prepared_ = false;
        if (!unpenalized_.empty()) solve_working_set(unpenalized_, Scalar(0), opt_.tolerance);
        refresh_gradient();
        null_loss_ = loss_.value(eta_);
    }

    Scalar null_loss() const { return null_loss_; }

    Scalar lambda_max() const {
        Scalar m = 0;
        for (Index j = 0; j < pr_.p(); ++j)
            if (pf_(j) > Scalar(0)) m = std::max(m, std::abs(grad_(j)) / pf_(j));
        return m;
    }

    /// Solve at lambda from the current state. prev_lambda < 0 disables the
    /// strong rule (all columns start in the working set).
    LassoSolution<Scalar> solve(Scalar lambda, Scalar prev_lambda) {
        sweeps_ = 0;
        newton_ = 0;
        trace_.clear();
        std::vector<char> in_set(static_cast<std::size_t>(cols_), 0);
        for (Index j = 0; j < cols_; ++j) {
            const bool keep = pf_(j) == Scalar(0) || beta_(j) != Scalar(0) || prev_lambda < Scalar(0) ||
                              std::abs(grad_(j)) >= pf_(j) * (Scalar(2) * lambda - prev_lambda);
            in_set[static_cast<std::size_t>(j)] = keep ? 1 : 0;
        }
        Scalar tol = static_cast<Scalar>(opt_.tolerance);
        Scalar violation = 0;
        for (int round = 0;; ++round) {
            std::vector<Index> working;
            for (Index j = 0; j < cols_; ++j)
                if (in_set[static_cast<std::size_t>(j)]) working.push_back(j);
            solve_working_set(working, lambda, tol);
            refresh_gradient();
            bool added = false;
            Scalar inside = 0;
            violation = 0;
            for (Index j = 0; j < cols_; ++j) {
                const Scalar v = kkt_term(j, lambda);
                violation = std::max(violation, v);
                if (in_set[static_cast<std::size_t>(j)]) {
                    inside = std::max(inside, v);
                } else if (std::abs(grad_(j)) > lambda * pf_(j)) {
                    in_set[static_cast<std::size_t>(j)] = 1;
                    added = true;
                }
            }
            if (added) continue;
            if (inside > Scalar(opt_.kkt_tolerance) && tol > Scalar(1e-14) && round < 20) {
                tol /= Scalar(100);
                continue;
            }
            break;
        }
        LassoSolution<Scalar> sol;
        sol.lambda = lambda;
        sol.coef = beta_.head(pr_.p());
        sol.intercept = pr_.intercept ? beta_(pr_.p()) : Scalar(0);
        sol.loss = loss_.value(eta_);
        sol.objective = sol.loss + penalty(beta_, lambda);
        sol.kkt_violation = violation;
        sol.active_size = static_cast<Index>((sol.coef.array() != Scalar(0)).count());
        sol.sweeps = sweeps_;
        sol.newton_steps = newton_;
        sol.converged = violation <= Scalar(opt_.kkt_tolerance);
        sol.objective_trace = trace_;
        sol.gradient = grad_.head(pr_.p());
        return sol;
    }

  private:
    Scalar kkt_term(Index j, Scalar lambda) const {
        const Scalar bound = lambda * pf_(j);
        if (beta_(j) == Scalar(0)) return std::max(Scalar(0), std::abs(grad_(j)) - bound);
        return std::abs(grad_(j) + bound * (beta_(j) > Scalar(0) ? Scalar(1) : Scalar(-1)));
    }

    void refresh_gradient() {
        if (!prepared_) loss_.prepare(eta_, grad_eta_, opt_.eta_clip);
        prepared_ = true;
        grad_.noalias() = x_.transpose() * grad_eta_;
    }

    void solve_working_set(const std::vector<Index>& working, Scalar lambda, Scalar tol) {
        const Index m = static_cast<Index>(working.size());
        if (m == 0) return;
        const Index n = pr_.n();
        constexpr bool gram_mode = Loss::constant_hessian;
        Mat<Scalar> gw;
        if constexpr (gram_mode) {
            if (gram_.size() == 0) {
                Mat<Scalar> h(n, cols_);
                std::vector<Index> all(static_cast<std::size_t>(cols_));
                std::iota(all.begin(), all.end(), Index(0));
                loss_.hess_columns(x_, all, h);
                gram_.noalias() = x_.transpose() * h;
            }
            gw = gram_(working, working);
        }
        Vec<Scalar> g(m), curv(m), d(m), q(m), xd(n);
        Vec<Scalar> cand_beta(cols_), cand_eta(n);
        const Scalar stop_kkt = Scalar(opt_.kkt_tolerance) * Scalar(1e-2);
        Scalar last_inside = 0;
        bool stale = false;    // the last step used a reused Hessian
        bool slowed = false;   // ... and made too little progress
        for (;;) {
            const Scalar f0 = loss_.prepare(eta_, grad_eta_, opt_.eta_clip) + penalty(beta_, lambda);
            prepared_ = true;
            Scalar inside = 0;
            for (Index c = 0; c < m; ++c) {
                const Index j = working[static_cast<std::size_t>(c)];
                g(c) = x_.col(j).dot(grad_eta_);
                grad_(j) = g(c);
                inside = std::max(inside, kkt_term(j, lambda));
            }
            if (inside <= stop_kkt) break;
            if constexpr (!gram_mode) {
                // Reuse the previous working-set Hessian while it stays accurate.
                if (stale && inside > Scalar(0.1) * last_inside) slowed = true;
                const bool reuse = !slowed && hess_cols_ == working &&
                                   (beta_ - hess_beta_).cwiseAbs().maxCoeff() <= Scalar(kHessianDrift);
                if (!reuse) {
                    loss_.hess_gram(x_, working, hess_);
                    hess_cols_ = working;
                    hess_beta_ = beta_;
                }
                stale = reuse;
                gw = hess_;
            }
            last_inside = inside;
            curv = gw.diagonal();
            d.setZero();
            q.setZero();
            for (;;) {
                Scalar max_change = 0;
                for (Index c = 0; c < m; ++c) {
                    if (!(curv(c) > Scalar(1e-300))) continue;
                    const Index j = working[static_cast<std::size_t>(c)];
                    const Scalar gj = g(c) + q(c);
                    const Scalar b = beta_(j) + d(c);
                    const Scalar nb = soft_threshold(curv(c) * b - gj, lambda * pf_(j)) / curv(c);
                    const Scalar delta = nb - b;
                    if (delta != Scalar(0)) {
                        d(c) += delta;
                        q.noalias() += delta * gw.col(c);
                        max_change = std::max(max_change, std::abs(delta));
                    }
                }
                if (++sweeps_ > opt_.max_sweeps) {
                    std::ostringstream msg;
                    msg << "lasso (" << to_string(pr_.loss) << ") did not converge after " << opt_.max_sweeps
                        << " sweeps at lambda=" << lambda << "; working set " << m << ", last change "
                        << max_change;
                    throw NumericalError(msg.str());
                }
                if (max_change <= tol) break;
            }
            // Line search on the penalized objective.
            xd.setZero();
            Scalar decrease = 0;
            for (Index c = 0; c < m; ++c) {
                if (d(c) == Scalar(0)) continue;
                const Index j = working[static_cast<std::size_t>(c)];
                xd.noalias() += d(c) * x_.col(j);
                decrease += g(c) * d(c) + lambda * pf_(j) * (std::abs(beta_(j) + d(c)) - std::abs(beta_(j)));
            }
            const Scalar step_size = d.cwiseAbs().maxCoeff();
            if (step_size == Scalar(0)) break;
            Scalar t = 1;
            Scalar f1 = f0;
            bool accepted = false;
            for (int h = 0; h < 50; ++h, t /= 2) {
                cand_beta = beta_;
                for (Index c = 0; c < m; ++c) cand_beta(working[static_cast<std::size_t>(c)]) += t * d(c);
                cand_eta = eta_ + t * xd;
                f1 = loss_.value(cand_eta) + penalty(cand_beta, lambda);
                if (std::isfinite(static_cast<double>(f1)) && f1 <= f0 + Scalar(1e-4) * t * decrease) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) break;
            if (stale && t < Scalar(1)) slowed = true;
            beta_.swap(cand_beta);
            eta_.swap(cand_eta);
            prepared_ = false;
            ++newton_;
            if (opt_.trace) trace_.push_back(f1);
            if (t * step_size <= tol) break;
            if (newton_ > opt_.max_newton) {
                std::ostringstream msg;
                msg << "lasso (" << to_string(pr_.loss) << ") exceeded " << opt_.max_newton
                    << " Newton steps at lambda=" << lambda;
                throw NumericalError(msg.str());
            }
        }
    }

    const LassoProblem<Scalar>& pr_;
    LassoOptions opt_;
    Loss loss_;
    Index cols_ = 0;
    Mat<Scalar> x_;
    Mat<Scalar> gram_;  // cached X'HX when the Hessian does not depend on eta
    static constexpr double kHessianDrift = 0.05;
    Mat<Scalar> hess_;  // last working-set Hessian, at hess_beta_
    std::vector<Index> hess_cols_;
    Vec<Scalar> hess_beta_;
    Vec<Scalar> pf_;
    Vec<Scalar> beta_, eta_, grad_, grad_eta_;
    std::vector<Index> unpenalized_;
    Scalar null_loss_ = 0;
    bool prepared_ = false;  // grad_eta_ matches eta_
    int sweeps_ = 0;
    int newton_ = 0;
    std::vector<Scalar> trace_;
};

/// Same Cox problem with rows stored in risk-set order, so the suffix sums
/// walk contiguous memory.
template <class Scalar>
LassoProblem<Scalar> time_sorted(const LassoProblem<Scalar>& pr) {
    const RiskIndex& idx = pr.index;
    const Index n = pr.n();
    LassoProblem<Scalar> out;
    out.loss = pr.loss;
    out.intercept = pr.intercept;
    out.penalty_factor = pr.penalty_factor;
    out.x.resize(n, pr.p());
    out.response.resize(pr.response.size());
    out.weights.resize(n);
    for (Index pos = 0; pos < n; ++pos) {
        const Index row = idx.event_order[static_cast<std::size_t>(pos)];
        out.x.row(pos) = pr.x.row(row);
        out.weights(pos) = pr.weights(row);
        if (pr.response.size() == n) out.response(pos) = pr.response(row);
    }
    RiskIndex& sorted = out.index;
    sorted.event_order.resize(static_cast<std::size_t>(n));
    std::iota(sorted.event_order.begin(), sorted.event_order.end(), Index(0));
    sorted.position = sorted.event_order;
    sorted.event_rows.reserve(idx.event_rows.size());
    for (Index row : idx.event_rows) sorted.event_rows.push_back(idx.position[static_cast<std::size_t>(row)]);
    sorted.group_begin = idx.group_begin;
    sorted.risk_set_start = idx.risk_set_start;
    sorted.row_group.assign(static_cast<std::size_t>(n), -1);
    for (Index i = 0; i < n; ++i)
        sorted.row_group[static_cast<std::size_t>(idx.position[static_cast<std::size_t>(i)])] =
            idx.row_group[static_cast<std::size_t>(i)];
    return out;
}

template <class Scalar, class F>
decltype(auto) with_loss(const LassoProblem<Scalar>& pr, const LassoOptions& opt, F&& f) {
    check_problem(pr);
    switch (pr.loss) {
        case LossKind::cox: {
            const LassoProblem<Scalar> sorted = time_sorted(pr);
            LassoSolver<Scalar, CoxLoss<Scalar>> s(sorted, opt);
            return f(s);
        }
        case LossKind::binomial: {
            LassoSolver<Scalar, BinomialLoss<Scalar>> s(pr, opt);
            return f(s);
        }
        case LossKind::gaussian:
        default: {
            LassoSolver<Scalar, GaussianLoss<Scalar>> s(pr, opt);
            return f(s);
        }
    }
}

template <class Scalar>
Vec<Scalar> augmented(const LassoProblem<Scalar>& pr, const Vec<Scalar>& coef, Scalar intercept) {
    Vec<Scalar> b(pr.p() + (pr.intercept ? 1 : 0));
    b.head(pr.p()) = coef;
    if (pr.intercept) b(pr.p()) = intercept;
    return b;
}

}  // namespace detail

/// Smallest lambda at which every penalized coefficient is zero.
template <class Scalar>
Scalar lambda_max(const LassoProblem<Scalar>& pr, const LassoOptions& options = {}) {
    return detail::with_loss(pr, options, [](auto& s) {
        s.fit_null();
        return s.lambda_max();
    });
}

/// Single fit, optionally warm-started from a previous solution.
template <class Scalar>
LassoSolution<Scalar> lasso_fit(const LassoProblem<Scalar>& pr, Scalar lambda, const LassoOptions& options = {},
                                const LassoSolution<Scalar>* warm = nullptr) {
    if (!(lambda >= Scalar(0))) throw ConfigError("lasso: lambda must be non-negative");
    return detail::with_loss(pr, options, [&](auto& s) {
        if (warm) s.set_start(detail::augmented(pr, warm->coef, warm->intercept));
        return s.solve(lambda, Scalar(-1));
    });
}

/// Largest KKT residual of a candidate solution (0 for an exact solution).
template <class Scalar>
Scalar kkt_violation(const LassoProblem<Scalar>& pr, const Vec<Scalar>& coef, Scalar intercept, Scalar lambda) {
    LassoOptions opt;
    return detail::with_loss(pr, opt, [&](auto& s) {
        s.set_start(detail::augmented(pr, coef, intercept));
        return s.kkt_violation(lambda);
    });
}

inline double default_lambda_ratio(Index n, Index p) { return n > p ? 0.01 : 0.05; }

/// Log-spaced descending grid with exact endpoints lambda_max and ratio * lambda_max.
template <class Scalar>
Vec<Scalar> lambda_grid(Scalar lmax, int n_lambda, double ratio) {
    if (n_lambda < 2) throw ConfigError("lambda grid needs at least 2 values");
    if (!(ratio > 0 && ratio < 1)) throw ConfigError("lambda ratio must lie in (0, 1)");
    Vec<Scalar> grid(n_lambda);
    if (!(lmax > Scalar(0))) {
        grid.setZero();
        return grid;
    }
    const Scalar step = std::log(static_cast<Scalar>(ratio)) / static_cast<Scalar>(n_lambda - 1);
    grid(0) = lmax;
    for (int k = 1; k < n_lambda - 1; ++k) grid(k) = lmax * std::exp(step * static_cast<Scalar>(k));
    grid(n_lambda - 1) = lmax * static_cast<Scalar>(ratio);
    return grid;
}

template <class Scalar>
struct LassoPath {
    Vec<Scalar> lambdas;
    Mat<Scalar> coef;               // p x n_lambda
    Vec<Scalar> intercepts;
    std::vector<Index> active_sizes;
    std::vector<bool> converged;
    std::vector<Scalar> kkt_violations;
    std::vector<Scalar> objectives;
    int monotone_violations = 0;    // active-set shrinkage events along the path

    Index size() const { return lambdas.size(); }
    Scalar max_kkt_violation() const {
        return kkt_violations.empty() ? Scalar(0) : *std::max_element(kkt_violations.begin(), kkt_violations.end());
    }
    std::vector<Index> support(Index k) const {
        std::vector<Index> s;
        for (Index j = 0; j < coef.rows(); ++j)
            if (coef(j, k) != Scalar(0)) s.push_back(j);
        return s;
    }
};

namespace detail {

template <class Scalar, class Solver>
LassoPath<Scalar> run_path(Solver& s, const LassoProblem<Scalar>& pr, const Vec<Scalar>& lambdas,
                           const LassoOptions& opt, bool early_stop) {
    const Index n_lambda = lambdas.size();
    LassoPath<Scalar> path;
    path.coef.resize(pr.p(), n_lambda);
    path.intercepts.resize(n_lambda);
    const Scalar sat = s.loss().saturated();
    const Scalar null_dev = s.null_loss() - sat;
    Scalar prev_dev = null_dev;
    Index kept = 0;
    Scalar prev_lambda = -1;
    for (Index k = 0; k < n_lambda; ++k) {
        const auto sol = s.solve(lambdas(k), prev_lambda);
        prev_lambda = lambdas(k);
        path.coef.col(k) = sol.coef;
        path.intercepts(k) = sol.intercept;
        if (!path.active_sizes.empty() && sol.active_size < path.active_sizes.back()) ++path.monotone_violations;
        path.active_sizes.push_back(sol.active_size);
        path.converged.push_back(sol.converged);
        path.kkt_violations.push_back(sol.kkt_violation);
        path.objectives.push_back(sol.objective);
        kept = k + 1;
        if (early_stop && null_dev > Scalar(0)) {
            const Scalar dev = sol.loss - sat;
            const Scalar ratio = Scalar(1) - dev / null_dev;
            const Scalar change = (prev_dev - dev) / null_dev;
            prev_dev = dev;
            if (k >= 4 && (change < Scalar(opt.min_deviance_change) || ratio > Scalar(opt.max_deviance_ratio)))
                break;
        }
    }
    path.lambdas = lambdas.head(kept);
    path.coef.conservativeResize(Eigen::NoChange, kept);
    path.intercepts.conservativeResize(kept);
    return path;
}

}  // namespace detail

/// Warm-started path over an explicit descending grid (no truncation).
template <class Scalar>
LassoPath<Scalar> lasso_path(const LassoProblem<Scalar>& pr, const Vec<Scalar>& lambdas,
                             const LassoOptions& options = {}) {
    for (Index k = 1; k < lambdas.size(); ++k)
        if (lambdas(k) > lambdas(k - 1)) throw ConfigError("lambda grid must be descending");
    return detail::with_loss(pr, options, [&](auto& s) {
        s.fit_null();
        return detail::run_path(s, pr, lambdas, options, false);
    });
}

/// Path over the default log grid from lambda_max; ratio <= 0 picks the
/// conventional default for the problem shape.
template <class Scalar>
LassoPath<Scalar> lasso_path(const LassoProblem<Scalar>& pr, int n_lambda = 100, double ratio = -1,
                             const LassoOptions& options = {}) {
    if (ratio <= 0) ratio = default_lambda_ratio(pr.n(), pr.p());
    return detail::with_loss(pr, options, [&](auto& s) {
        s.fit_null();
        const Vec<Scalar> grid = lambda_grid(s.lambda_max(), n_lambda, ratio);
        return detail::run_path(s, pr, grid, options, options.early_stop);
    });
}

enum class LambdaRule { one_se, min };

template <class Scalar>
struct CvResult {
    Vec<Scalar> lambdas;
    Vec<Scalar> cvm;            // mean CV loss per lambda
    Vec<Scalar> cvsd;           // its standard error
    Mat<Scalar> fold_loss;      // folds x lambdas
    Vec<Scalar> fold_weight;
    Index index_min = 0;
    Index index_1se = 0;
    Scalar lambda_min = 0;
    Scalar lambda_1se = 0;
    std::uint64_t seed = 0;
    std::vector<int> fold_of;

    Scalar lambda(LambdaRule rule) const { return rule == LambdaRule::one_se ? lambda_1se : lambda_min; }
    Index index(LambdaRule rule) const { return rule == LambdaRule::one_se ? index_1se : index_min; }
};

/// Seeded fold assignment: a uniform permutation, fold = position mod k.
inline std::vector<int> assign_folds(Index n, int k, std::mt19937_64& rng) {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index(0));
    for (Index i = n - 1; i > 0; --i) {
        std::uniform_int_distribution<Index> pick(0, i);
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
    }
    std::vector<int> fold(static_cast<std::size_t>(n));
    for (Index pos = 0; pos < n; ++pos) fold[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos)])] = static_cast<int>(pos % k);
    return fold;
}

/// Permutes each stratum separately and deals its rows round-robin, the
/// second stratum continuing where the first stopped.
inline std::vector<int> assign_folds_stratified(const std::vector<char>& stratum, int k, std::mt19937_64& rng) {
    std::vector<int> fold(stratum.size());
    int next = 0;
    for (char level : {char(1), char(0)}) {
        std::vector<Index> rows;
        for (std::size_t i = 0; i < stratum.size(); ++i)
            if (stratum[i] == level) rows.push_back(static_cast<Index>(i));
        for (std::size_t i = rows.size(); i > 1; --i) {
            std::uniform_int_distribution<std::size_t> pick(0, i - 1);
            std::swap(rows[i - 1], rows[pick(rng)]);
        }
        for (Index r : rows) {
            fold[static_cast<std::size_t>(r)] = next;
            next = (next + 1) % k;
        }
    }
    return fold;
}

/// Cross-validation with a given fold assignment.
template <class Scalar>
CvResult<Scalar> cross_validate(const LassoProblem<Scalar>& pr, const Vec<Scalar>& lambdas,
                                const std::vector<int>& fold_of, const LassoOptions& options = {}) {
    check_problem(pr);
    const Index n = pr.n();
    if (static_cast<Index>(fold_of.size()) != n) throw ConfigError("cross-validation: fold vector length mismatch");
    const int k = fold_of.empty() ? 0 : *std::max_element(fold_of.begin(), fold_of.end()) + 1;
    if (k < 2) throw ConfigError("cross-validation needs at least 2 folds");
    const Index n_lambda = lambdas.size();
    if (n_lambda < 1) throw ConfigError("cross-validation: empty lambda grid");

    CvResult<Scalar> cv;
    cv.lambdas = lambdas;
    cv.fold_of = fold_of;
    cv.fold_loss = Mat<Scalar>::Zero(k, n_lambda);
    cv.fold_weight = Vec<Scalar>::Zero(k);

    std::vector<char> is_event(static_cast<std::size_t>(n), 0);
    if (pr.loss == LossKind::cox)
        for (Index row : pr.index.event_rows) is_event[static_cast<std::size_t>(row)] = 1;

    std::unique_ptr<detail::CoxLoss<Scalar>> full_cox;
    if (pr.loss == LossKind::cox) full_cox = std::make_unique<detail::CoxLoss<Scalar>>(pr);

    for (int f = 0; f < k; ++f) {
        LassoProblem<Scalar> train = pr;
        Scalar held = 0;
        for (Index i = 0; i < n; ++i) {
            if (fold_of[static_cast<std::size_t>(i)] != f) continue;
            held += pr.loss == LossKind::cox ? (is_event[static_cast<std::size_t>(i)] ? pr.weights(i) : Scalar(0))
                                             : pr.weights(i);
            train.weights(i) = 0;
        }
        if (!(held > Scalar(0)))
            throw NumericalError(pr.loss == LossKind::cox ? "cross-validation: a fold has no events"
                                                          : "cross-validation: a fold has zero weight");
        cv.fold_weight(f) = held;
        const LassoPath<Scalar> path = lasso_path(train, lambdas, options);
        std::unique_ptr<detail::CoxLoss<Scalar>> train_cox;
        if (pr.loss == LossKind::cox) train_cox = std::make_unique<detail::CoxLoss<Scalar>>(train);
        const Scalar w_full = pr.weights.sum();
        const Scalar w_train = train.weights.sum();
        for (Index l = 0; l < n_lambda; ++l) {
            Vec<Scalar> eta = pr.x * path.coef.col(l);
            if (pr.intercept) eta.array() += path.intercepts(l);
            Scalar loss = 0;
            switch (pr.loss) {
                case LossKind::cox: {
                    const Scalar ll_full = -w_full * full_cox->value(eta);
                    const Scalar ll_train = -w_train * train_cox->value(eta);
                    loss = Scalar(-2) * (ll_full - ll_train) / held;
                    break;
                }
                case LossKind::gaussian: {
                    for (Index i = 0; i < n; ++i)
                        if (fold_of[static_cast<std::size_t>(i)] == f) loss += pr.weights(i) * (pr.response(i) - eta(i)) * (pr.response(i) - eta(i));
                    loss /= held;
                    break;
                }
                case LossKind::binomial: {
                    for (Index i = 0; i < n; ++i) {
                        if (fold_of[static_cast<std::size_t>(i)] != f) continue;
                        const Scalar mu = std::clamp(Scalar(1) / (Scalar(1) + std::exp(-eta(i))), Scalar(1e-5), Scalar(1 - 1e-5));
                        const Scalar y = pr.response(i);
                        loss -= Scalar(2) * pr.weights(i) * (y * std::log(mu) + (Scalar(1) - y) * std::log(Scalar(1) - mu));
                    }
                    loss /= held;
                    break;
                }
            }
            cv.fold_loss(f, l) = loss;
        }
    }

    const Scalar total = cv.fold_weight.sum();
    cv.cvm.resize(n_lambda);
    cv.cvsd.resize(n_lambda);
    for (Index l = 0; l < n_lambda; ++l) {
        Scalar mean = 0;
        for (int f = 0; f < k; ++f) mean += cv.fold_weight(f) * cv.fold_loss(f, l);
        mean /= total;
        Scalar ss = 0;
        for (int f = 0; f < k; ++f) {
            const Scalar dev = cv.fold_loss(f, l) - mean;
            ss += cv.fold_weight(f) * dev * dev;
        }
        cv.cvm(l) = mean;
        cv.cvsd(l) = std::sqrt(ss / total / Scalar(k - 1));
    }
    Index best = 0;
    for (Index l = 1; l < n_lambda; ++l)
        if (cv.cvm(l) < cv.cvm(best)) best = l;
    cv.index_min = best;
    cv.lambda_min = lambdas(best);
    const Scalar bound = cv.cvm(best) + cv.cvsd(best);
    Index one_se = best;
    for (Index l = 0; l < n_lambda; ++l)
        if (cv.cvm(l) <= bound) {
            one_se = l;
            break;
        }
    cv.index_1se = one_se;
    cv.lambda_1se = lambdas(one_se);
    return cv;
}

/// Seeded k-fold cross-validation over the path's grid. Cox folds are
/// stratified by event status so that every fold holds events.
template <class Scalar>
CvResult<Scalar> cross_validate(const LassoProblem<Scalar>& pr, const LassoPath<Scalar>& path, int k,
                                std::uint64_t seed, const LassoOptions& options = {}) {
    if (k < 2) throw ConfigError("cross-validation needs at least 2 folds");
    if (pr.n() < k) throw ConfigError("cross-validation needs at least as many rows as folds");
    std::mt19937_64 rng(seed);
    std::vector<int> folds;
    if (pr.loss == LossKind::cox) {
        std::vector<char> strata(static_cast<std::size_t>(pr.n()), 0);
        Index events = 0;
        for (Index row : pr.index.event_rows)
            if (pr.weights(row) > Scalar(0)) {
                strata[static_cast<std::size_t>(row)] = 1;
                ++events;
            }
        if (events < k)
            throw NumericalError("cross-validation: " + std::to_string(events) + " events for " + std::to_string(k) +
                                 " folds");
        folds = assign_folds_stratified(strata, k, rng);
    } else {
        folds = assign_folds(pr.n(), k, rng);
    }
    CvResult<Scalar> cv = cross_validate(pr, path.lambdas, folds, options);
    cv.seed = seed;
    return cv;
}

/// Path + CV + refit-free selection at the chosen lambda.
template <class Scalar>
struct LassoSelection {
    LassoPath<Scalar> path;
    CvResult<Scalar> cv;
    Index chosen = 0;
    Scalar lambda = 0;
    Vec<Scalar> coef;
    Scalar intercept = 0;
    std::vector<Index> support;
};

template <class Scalar>
LassoSelection<Scalar> select_by_cv(const LassoProblem<Scalar>& pr, int folds, std::uint64_t seed,
                                    LambdaRule rule = LambdaRule::one_se, int n_lambda = 100,
                                    const LassoOptions& options = {}) {
    LassoSelection<Scalar> out;
    out.path = lasso_path(pr, n_lambda, -1.0, options);
    out.cv = cross_validate(pr, out.path, folds, seed, options);
    out.chosen = out.cv.index(rule);
    out.lambda = out.path.lambdas(out.chosen);
    out.coef = out.path.coef.col(out.chosen);
    out.intercept = out.path.intercepts(out.chosen);
    out.support = out.path.support(out.chosen);
    return out;
}

/// Least-squares lasso without intercept on column-RMS-scaled x; the result
/// is on the original scale of x. Used for event-level residual regressions.
template <class Scalar>
Vec<Scalar> weighted_linear_lasso(const Vec<Scalar>& y, const Mat<Scalar>& x, Scalar lambda,
                                  const LassoOptions& options = {}) {
    if (y.size() == 0) throw NumericalError("no events in data");
    auto [xs, rec] = standardize_columns(x, false);
    const auto pr = make_gaussian_problem(xs, y, false);
    const auto sol = lasso_fit(pr, lambda, options);
    return rec.to_original(sol.coef);
}

}  // namespace coxsel
