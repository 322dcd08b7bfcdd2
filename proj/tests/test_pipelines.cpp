#include <catch2/catch_amalgamated.hpp>

#include "coxsel/decorrelated_score.hpp"
#include "coxsel/pipelines.hpp"
#include "coxsel/sim_lab.hpp"

#include <algorithm>

using namespace coxsel;

namespace {

SurvivalData<double> simulated(std::uint64_t seed, Index n = 200, Index p = 12, double b = 1.0, double g = 1.0) {
    DgpConfig c;
    c.n = n;
    c.p = p;
    c.mechanism = Mechanism::b;
    c.c_a = 1.0;
    c.b_scale = b;
    c.g_scale = g;
    c.seed = seed;
    return generate_dataset(c);
}

PipelineConfig quick_config(std::uint64_t seed = 3) {
    PipelineConfig cfg;
    cfg.folds = 5;
    cfg.seed = seed;
    return cfg;
}

bool contains(const ColumnSet& big, const ColumnSet& small) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

const std::vector<Method> all_methods{Method::post_lasso, Method::poor_mans, Method::triple,
                                      Method::double_selection, Method::fang, Method::full};

}  // namespace

TEST_CASE("method tags round-trip") {
    for (Method m : all_methods) CHECK(parse_method(to_string(m)) == m);
    CHECK(parse_method("oracle") == Method::oracle);
    CHECK_THROWS_AS(parse_method("ridge"), ConfigError);
    CHECK(parse_exposure_family("logistic") == ExposureFamily::logistic);
    CHECK_THROWS_AS(parse_exposure_family("probit"), ConfigError);
}

TEST_CASE("configuration errors") {
    const auto data = simulated(1, 60, 10);
    auto cfg = quick_config();
    CHECK_THROWS_AS(run_methods(data, cfg, {}), ConfigError);
    cfg.folds = 1;
    CHECK_THROWS_AS(run_post_lasso(data, cfg), ConfigError);
    cfg = quick_config();
    cfg.forced_in = {10};
    CHECK_THROWS_AS(run_poor_mans(data, cfg), ConfigError);
    cfg = quick_config();
    cfg.level = 1.5;
    CHECK_THROWS_AS(run_triple_selection(data, cfg), ConfigError);
}

TEST_CASE("reports are internally consistent") {
    const auto data = simulated(11);
    const auto reports = run_methods(data, quick_config(), all_methods);
    REQUIRE(reports.size() == all_methods.size());
    for (const auto& r : reports) {
        INFO(to_string(r.method));
        CHECK(r.se > 0);
        CHECK(r.z == Catch::Approx(r.estimate / r.se).epsilon(1e-12).margin(1e-12));
        CHECK(std::abs(r.z - r.estimate / r.se) <= 1e-12 * std::max(1.0, std::abs(r.z)));
        CHECK(r.p_value >= 0);
        CHECK(r.p_value <= 1);
        CHECK(r.ci_lower <= r.estimate);
        CHECK(r.ci_upper >= r.estimate);
        CHECK(r.n == data.n());
        CHECK(r.p == data.p());
        CHECK(r.events == data.status.sum());
        CHECK(std::is_sorted(r.selection.union_b.begin(), r.selection.union_b.end()));
    }
}

TEST_CASE("batched and single runs agree exactly") {
    const auto data = simulated(12);
    const auto cfg = quick_config();
    const auto batch = run_methods(data, cfg, all_methods);
    for (std::size_t k = 0; k < all_methods.size(); ++k) {
        const auto single = run_method(data, cfg, all_methods[k]);
        CHECK(single.estimate == batch[k].estimate);
        CHECK(single.se == batch[k].se);
        CHECK(single.selection.union_b == batch[k].selection.union_b);
    }
    const auto again = run_methods(data, cfg, all_methods);
    for (std::size_t k = 0; k < all_methods.size(); ++k) CHECK(again[k].estimate == batch[k].estimate);
}

TEST_CASE("selection sets nest as the unions prescribe") {
    for (std::uint64_t seed = 20; seed < 26; ++seed) {
        const auto data = simulated(seed);
        auto cfg = quick_config(seed);
        cfg.forced_in = {11};
        const auto r = run_methods(data, cfg, {Method::post_lasso, Method::poor_mans, Method::triple,
                                               Method::double_selection});
        const auto& post = r[0].selection;
        const auto& pm = r[1].selection;
        const auto& triple = r[2].selection;
        const auto& dbl = r[3].selection;
        CHECK(contains(pm.union_b, post.union_b));
        CHECK(contains(pm.union_b, *pm.outcome));
        CHECK(contains(pm.union_b, *pm.censoring));
        CHECK(contains(pm.union_b, *pm.exposure));
        CHECK(contains(dbl.union_b, *dbl.outcome));
        CHECK(contains(triple.union_b, dbl.union_b));
        CHECK_FALSE(dbl.censoring.has_value());
        for (const auto* s : {&pm, &triple, &dbl}) CHECK(std::binary_search(s->union_b.begin(), s->union_b.end(), 11));
        CHECK(r[1].s_beta == static_cast<Index>(pm.outcome->size()));
        CHECK(r[1].s_eta == static_cast<Index>(pm.censoring->size()));
        CHECK(r[1].s_gamma == static_cast<Index>(pm.exposure->size()));
    }
}

TEST_CASE("poor man's approach is the robust Wald test of the union refit") {
    const auto data = simulated(30);
    const auto r = run_poor_mans(data, quick_config());
    const auto fit = fit_cox(data, build_risk_index(data), r.selection.union_b);
    CHECK(r.estimate == fit.alpha_hat);
    CHECK(r.se == fit.alpha_se_robust());
}

TEST_CASE("triple selection solves the decorrelated score equation at the refit") {
    for (std::uint64_t seed = 40; seed < 44; ++seed) {
        const auto data = simulated(seed);
        const auto r = run_triple_selection(data, quick_config(seed));
        REQUIRE(r.score_mean.has_value());
        CHECK(*r.score_mean <= 1e-8);
        const auto idx = build_risk_index(data);
        const auto fit = fit_cox(data, idx, r.selection.union_b);
        const auto ctx = build_score_context(data, idx, fit.alpha_hat, fit.beta_hat);
        const auto var = theorem1_variance(ctx, constrained_gamma(ctx, r.selection.union_b).gamma);
        CHECK(r.se == Catch::Approx(var.se).epsilon(1e-12));
    }
}

TEST_CASE("without covariates every method reduces to the classical analysis") {
    const auto full = simulated(50, 150, 10);
    auto data = full;
    data.covariates.resize(data.n(), 0);
    data.covariate_names.clear();
    const auto idx = build_risk_index(data);
    const auto classical = fit_cox(data, idx, {});
    const auto r = run_methods(data, quick_config(), all_methods);
    for (std::size_t k = 0; k < 4; ++k) {
        INFO(to_string(r[k].method));
        CHECK(r[k].selection.union_b.empty());
        CHECK(r[k].estimate == Catch::Approx(classical.alpha_hat).epsilon(1e-12));
    }
    CHECK(r[0].se == Catch::Approx(classical.alpha_se_robust()).epsilon(1e-12));
    CHECK(r[1].se == Catch::Approx(classical.alpha_se_robust()).epsilon(1e-12));
    // Theorem-1 variance at p = 0 collapses to the sandwich.
    CHECK(r[2].se == Catch::Approx(classical.alpha_se_robust()).epsilon(1e-8));
    // Fang: one Newton step from the (possibly shrunken) Lasso estimate.
    CHECK(std::abs(r[4].estimate - classical.alpha_hat) < 0.05);
}

TEST_CASE("pure-noise covariates give the unadjusted analysis") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(0.0, 1.0);
    std::exponential_distribution<double> ex(1.0);
    const Index n = 300, p = 8;
    Vec<double> u(n), a(n);
    Eigen::VectorXi d(n);
    Mat<double> l(n, p);
    for (Index i = 0; i < n; ++i) {
        a(i) = z(rng);
        for (Index j = 0; j < p; ++j) l(i, j) = z(rng);
        const double t = ex(rng), c = ex(rng);
        u(i) = std::min(t, c);
        d(i) = t <= c;
    }
    const auto data = make_survival_data<double>(u, d, a, l);
    auto cfg = quick_config();
    const auto r = run_post_lasso(data, cfg);
    CHECK(r.selection.outcome->empty());
    CHECK(r.estimate == fit_cox(data, build_risk_index(data), {}).alpha_hat);
}

TEST_CASE("permuting covariate columns leaves the estimates unchanged") {
    const auto data = simulated(60);
    const std::vector<Index> perm{3, 0, 7, 11, 1, 9, 2, 10, 4, 8, 6, 5};
    auto shuffled = data;
    for (Index j = 0; j < data.p(); ++j) {
        shuffled.covariates.col(j) = data.covariates.col(perm[static_cast<std::size_t>(j)]);
        shuffled.covariate_names[static_cast<std::size_t>(j)] = data.covariate_names[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
    }
    const std::vector<Method> methods{Method::post_lasso, Method::poor_mans, Method::triple, Method::fang};
    const auto a = run_methods(data, quick_config(), methods);
    const auto b = run_methods(shuffled, quick_config(), methods);
    for (std::size_t k = 0; k < methods.size(); ++k) {
        INFO(to_string(methods[k]));
        CHECK(std::abs(a[k].estimate - b[k].estimate) <= 1e-8);
        ColumnSet mapped;
        for (Index j : b[k].selection.union_b) mapped.push_back(perm[static_cast<std::size_t>(j)]);
        std::sort(mapped.begin(), mapped.end());
        CHECK(mapped == a[k].selection.union_b);
    }
}

TEST_CASE("binary exposure uses the logistic exposure model") {
    auto data = simulated(70);
    for (Index i = 0; i < data.n(); ++i) data.exposure(i) = data.exposure(i) > 0 ? 1.0 : 0.0;
    auto cfg = quick_config();
    const auto automatic = run_poor_mans(data, cfg);
    cfg.exposure_family = ExposureFamily::logistic;
    const auto logistic = run_poor_mans(data, cfg);
    cfg.exposure_family = ExposureFamily::linear;
    const auto linear = run_poor_mans(data, cfg);
    CHECK(automatic.selection.exposure == logistic.selection.exposure);
    CHECK(*automatic.selection.lambda_exposure == *logistic.selection.lambda_exposure);
    CHECK(*linear.selection.lambda_exposure != *logistic.selection.lambda_exposure);
}

TEST_CASE("censoring indicator") {
    Vec<double> u(4), a = Vec<double>::Zero(4);
    u << 1, 2, 3, 4;
    Eigen::VectorXi d(4);
    d << 1, 0, 0, 1;
    auto data = make_survival_data<double>(u, d, a, Mat<double>(4, 0));
    Eigen::VectorXi expected(4);
    expected << 0, 1, 1, 0;
    CHECK(censoring_status(data) == expected);
    data.tau = 2.5;
    expected << 0, 1, 0, 0;
    CHECK(censoring_status(data) == expected);
}

TEST_CASE("oracle adjusts for the given support") {
    const auto data = simulated(80);
    auto cfg = quick_config();
    cfg.oracle_support = {2, 0, 5};
    const auto r = run_method(data, cfg, Method::oracle);
    CHECK(r.selection.union_b == ColumnSet{0, 2, 5});
    CHECK(r.estimate == fit_cox(data, build_risk_index(data), ColumnSet{0, 2, 5}).alpha_hat);
}
