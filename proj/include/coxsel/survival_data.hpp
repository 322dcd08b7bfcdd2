#pragma once

#include "coxsel/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace coxsel {

/// Right-censored survival sample with a scalar exposure and a block of
/// baseline covariates. Rows are subjects.
template <class Scalar>
struct SurvivalData {
    Vec<Scalar> time;               // observed time min(T, C)
    Eigen::VectorXi status;         // 1 = event observed, 0 = censored
    Vec<Scalar> exposure;
    Mat<Scalar> covariates;         // n x p
    Scalar tau = infinity<Scalar>;  // administrative end of study

    std::string exposure_name = "exposure";
    std::vector<std::string> covariate_names;

    Index n() const { return time.size(); }
    Index p() const { return covariates.cols(); }

    const std::string& covariate_name(Index j) const {
        return covariate_names.at(static_cast<std::size_t>(j));
    }
};

template <class Scalar>
std::vector<std::string> default_covariate_names(Index p) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) names.push_back("L" + std::to_string(j + 1));
    return names;
}

/// Throws ValidationError when the dataset breaks an invariant.
template <class Scalar>
void validate(const SurvivalData<Scalar>& data) {
    const Index n = data.time.size();
    if (n < 2) throw ValidationError("dataset needs at least 2 rows");
    if (data.status.size() != n || data.exposure.size() != n || data.covariates.rows() != n)
        throw ValidationError("dataset columns have inconsistent lengths");
    if (static_cast<Index>(data.covariate_names.size()) != data.p())
        throw ValidationError("covariate name count does not match covariate columns");
    if (!(data.tau > Scalar(0))) throw ValidationError("tau must be positive");
    for (Index i = 0; i < n; ++i) {
        std::ostringstream where;
        where << " at row " << i;
        if (!std::isfinite(static_cast<double>(data.time(i))))
            throw ValidationError("non-finite time" + where.str());
        if (data.time(i) < Scalar(0)) throw ValidationError("negative time" + where.str());
        if (data.status(i) != 0 && data.status(i) != 1)
            throw ValidationError("status must be 0 or 1" + where.str());
        if (!std::isfinite(static_cast<double>(data.exposure(i))))
            throw ValidationError("missing or non-finite exposure" + where.str());
        for (Index j = 0; j < data.p(); ++j)
            if (!std::isfinite(static_cast<double>(data.covariates(i, j))))
                throw ValidationError("missing or non-finite covariate " +
                                      data.covariate_names[static_cast<std::size_t>(j)] +
                                      where.str());
    }
}

/// Convenience constructor; fills default names and validates.
template <class Scalar>
SurvivalData<Scalar> make_survival_data(Vec<Scalar> time, Eigen::VectorXi status,
                                        Vec<Scalar> exposure, Mat<Scalar> covariates,
                                        Scalar tau = infinity<Scalar>) {
    SurvivalData<Scalar> data;
    data.time = std::move(time);
    data.status = std::move(status);
    data.exposure = std::move(exposure);
    data.covariates = std::move(covariates);
    if (data.covariates.rows() == 0 && data.covariates.cols() == 0)
        data.covariates.resize(data.time.size(), 0);
    data.tau = tau;
    data.covariate_names = default_covariate_names<Scalar>(data.covariates.cols());
    validate(data);
    return data;
}

/// Same data in another scalar type.
template <class To, class From>
SurvivalData<To> cast_scalar(const SurvivalData<From>& data) {
    SurvivalData<To> out;
    out.time = data.time.template cast<To>();
    out.status = data.status;
    out.exposure = data.exposure.template cast<To>();
    out.covariates = data.covariates.template cast<To>();
    out.tau = static_cast<To>(data.tau);
    out.exposure_name = data.exposure_name;
    out.covariate_names = data.covariate_names;
    return out;
}

/// Row subset in the given order (used by CV and sub-sampling).
template <class Scalar>
SurvivalData<Scalar> subset_rows(const SurvivalData<Scalar>& data, const std::vector<Index>& rows) {
    SurvivalData<Scalar> out;
    const Index m = static_cast<Index>(rows.size());
    out.time.resize(m);
    out.status.resize(m);
    out.exposure.resize(m);
    out.covariates.resize(m, data.p());
    for (Index r = 0; r < m; ++r) {
        const Index i = rows[static_cast<std::size_t>(r)];
        out.time(r) = data.time(i);
        out.status(r) = data.status(i);
        out.exposure(r) = data.exposure(i);
        out.covariates.row(r) = data.covariates.row(i);
    }
    out.tau = data.tau;
    out.exposure_name = data.exposure_name;
    out.covariate_names = data.covariate_names;
    return out;
}

/// Sorted-time view of a dataset. Distinct event times are numbered
/// k = 0..K-1; the risk set of time k is the suffix
/// event_order[risk_set_start[k] ..].
struct RiskIndex {
    std::vector<Index> event_order;     // rows by ascending time, ties by row index
    std::vector<Index> position;        // inverse permutation of event_order
    std::vector<Index> event_rows;      // status 1 and time <= tau, in event-time order
    std::vector<Index> group_begin;     // K + 1 offsets into event_rows
    std::vector<Index> risk_set_start;  // K offsets into event_order
    std::vector<Index> row_group;       // event group of each row, -1 if none

    Index n() const { return static_cast<Index>(event_order.size()); }
    Index n_groups() const { return static_cast<Index>(risk_set_start.size()); }
    Index n_events() const { return static_cast<Index>(event_rows.size()); }
    Index risk_set_size(Index k) const { return n() - risk_set_start[static_cast<std::size_t>(k)]; }
    Index group_size(Index k) const {
        const auto kk = static_cast<std::size_t>(k);
        return group_begin[kk + 1] - group_begin[kk];
    }
    /// First row of group k, useful to read off the group's time.
    Index group_row(Index k) const {
        return event_rows[static_cast<std::size_t>(group_begin[static_cast<std::size_t>(k)])];
    }
    std::vector<Index> risk_set(Index k) const {
        return {event_order.begin() + risk_set_start[static_cast<std::size_t>(k)], event_order.end()};
    }
    bool operator==(const RiskIndex&) const = default;
};

/// Builds the index from observed times and event indicators. Ties among
/// events share one risk set (Breslow); a censored subject whose time equals an
/// event time is in that event's risk set.
template <class Scalar>
RiskIndex build_risk_index(const Vec<Scalar>& time, const Eigen::VectorXi& status,
                           Scalar tau = infinity<Scalar>) {
    const Index n = time.size();
    RiskIndex idx;
    idx.event_order.resize(static_cast<std::size_t>(n));
    std::iota(idx.event_order.begin(), idx.event_order.end(), Index(0));
    std::stable_sort(idx.event_order.begin(), idx.event_order.end(),
                     [&](Index a, Index b) { return time(a) < time(b); });
    idx.position.assign(static_cast<std::size_t>(n), 0);
    for (Index q = 0; q < n; ++q) idx.position[static_cast<std::size_t>(idx.event_order[static_cast<std::size_t>(q)])] = q;
    idx.row_group.assign(static_cast<std::size_t>(n), -1);

    Index q = 0;
    while (q < n) {
        const Scalar t = time(idx.event_order[static_cast<std::size_t>(q)]);
        Index end = q;
        while (end < n && time(idx.event_order[static_cast<std::size_t>(end)]) == t) ++end;
        if (t <= tau) {
            bool any = false;
            for (Index r = q; r < end; ++r) {
                const Index row = idx.event_order[static_cast<std::size_t>(r)];
                if (status(row) != 1) continue;
                if (!any) {
                    idx.group_begin.push_back(static_cast<Index>(idx.event_rows.size()));
                    idx.risk_set_start.push_back(q);
                    any = true;
                }
                idx.row_group[static_cast<std::size_t>(row)] = static_cast<Index>(idx.risk_set_start.size()) - 1;
                idx.event_rows.push_back(row);
            }
        }
        q = end;
    }
    idx.group_begin.push_back(static_cast<Index>(idx.event_rows.size()));
    return idx;
}

template <class Scalar>
RiskIndex build_risk_index(const SurvivalData<Scalar>& data) {
    return build_risk_index(data.time, data.status, data.tau);
}

/// Affine map used to standardize design columns. Constant columns get
/// scale 0 (the sentinel) and are set to zero in the standardized design.
template <class Scalar>
struct ScalingRecord {
    Vec<Scalar> center;
    Vec<Scalar> scale;
    std::vector<bool> constant;

    /// Coefficients on the standardized scale -> original scale.
    Vec<Scalar> to_original(const Vec<Scalar>& coef) const {
        Vec<Scalar> out(coef.size());
        for (Index j = 0; j < coef.size(); ++j)
            out(j) = constant[static_cast<std::size_t>(j)] ? Scalar(0) : coef(j) / scale(j);
        return out;
    }
    Vec<Scalar> to_standardized(const Vec<Scalar>& coef) const {
        Vec<Scalar> out(coef.size());
        for (Index j = 0; j < coef.size(); ++j)
            out(j) = constant[static_cast<std::size_t>(j)] ? Scalar(0) : coef(j) * scale(j);
        return out;
    }
    bool any_constant() const { return std::find(constant.begin(), constant.end(), true) != constant.end(); }
};

/// Column-wise (x - mean) / sd with the 1/n variance. When `center` is
/// false the scale is the root mean square instead (no-intercept problems).
template <class Derived>
auto standardize_columns(const Eigen::MatrixBase<Derived>& x, bool center = true) {
    using Scalar = typename Derived::Scalar;
    const Index n = x.rows();
    const Index p = x.cols();
    ScalingRecord<Scalar> rec;
    rec.center = Vec<Scalar>::Zero(p);
    rec.scale = Vec<Scalar>::Zero(p);
    rec.constant.assign(static_cast<std::size_t>(p), false);
    Mat<Scalar> out(n, p);
    for (Index j = 0; j < p; ++j) {
        const Scalar mean = center ? x.col(j).mean() : Scalar(0);
        Scalar ss = 0;
        Scalar amax = 0;
        for (Index i = 0; i < n; ++i) {
            const Scalar d = x(i, j) - mean;
            ss += d * d;
            amax = std::max(amax, std::abs(x(i, j)));
        }
        const Scalar sd = std::sqrt(ss / Scalar(n));
        rec.center(j) = mean;
        if (!(sd > Scalar(1e-13) * std::max(amax, Scalar(1e-300)))) {
            rec.constant[static_cast<std::size_t>(j)] = true;
            out.col(j).setZero();
        } else {
            rec.scale(j) = sd;
            out.col(j) = (x.col(j).array() - mean) / sd;
        }
    }
    return std::make_pair(std::move(out), std::move(rec));
}

/// Standardizes the covariate block of a dataset; exposure untouched.
template <class Scalar>
std::pair<SurvivalData<Scalar>, ScalingRecord<Scalar>> standardize_covariates(
    const SurvivalData<Scalar>& data) {
    auto [x, rec] = standardize_columns(data.covariates);
    SurvivalData<Scalar> out = data;
    out.covariates = std::move(x);
    return {std::move(out), std::move(rec)};
}

}  // namespace coxsel
