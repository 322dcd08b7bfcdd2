#include "coxsel/sim_lab.hpp"

#include "coxsel/csv.hpp"
#include "coxsel/seeding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

namespace coxsel {

namespace {

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Runs job(i) for i in [0, total) on `threads` workers. The exception of the
// lowest failing index is rethrown after every job has run.
template <class Job>
void parallel_for(std::size_t total, int threads, const Job& job, const Progress& progress) {
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex mutex;
    std::exception_ptr error;
    std::size_t error_index = total;
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            try {
                job(i);
            } catch (...) {
                const std::lock_guard lock(mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
                continue;
            }
            const std::size_t d = ++done;
            if (progress) {
                const std::lock_guard lock(mutex);
                progress(d, total);
            }
        }
    };
    const int k = std::min<int>(resolve_threads(threads), static_cast<int>(std::max<std::size_t>(total, 1)));
    if (k <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(k));
        for (int t = 0; t < k; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
}

double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Results per method for one dataset; a failing method does not discard the others.
std::vector<std::optional<InferenceReport>> run_guarded(const SurvivalData<double>& data, const PipelineConfig& cfg,
                                                        const std::vector<Method>& methods,
                                                        std::vector<std::string>& errors) {
    std::vector<std::optional<InferenceReport>> out(methods.size());
    errors.assign(methods.size(), {});
    try {
        auto reports = run_methods(data, cfg, methods);
        for (std::size_t k = 0; k < methods.size(); ++k) out[k] = std::move(reports[k]);
        return out;
    } catch (const Error&) {
    }
    for (std::size_t k = 0; k < methods.size(); ++k) {
        try {
            out[k] = run_method(data, cfg, methods[k]);
        } catch (const Error& e) {
            errors[k] = e.what();
        }
    }
    return out;
}

}  // namespace

std::string to_string(Mechanism m) { return m == Mechanism::a ? "a" : "b"; }

Mechanism parse_mechanism(const std::string& tag) {
    if (tag == "a") return Mechanism::a;
    if (tag == "b") return Mechanism::b;
    throw ConfigError("unknown mechanism '" + tag + "' (expected a or b)");
}

void validate(const DgpConfig& c) {
    if (c.n < 2) throw ConfigError("n must be at least 2");
    if (c.p < 1) throw ConfigError("p must be at least 1");
    if (!(c.rho > -1 && c.rho < 1)) throw ConfigError("rho must lie in (-1, 1)");
    if (c.mechanism == Mechanism::b && c.p < 10) throw ConfigError("mechanism b needs p >= 10");
    if (c.setting != 1 && c.setting != 2) throw ConfigError("setting must be 1 or 2");
    if (c.setting == 2 && c.p < 15) throw ConfigError("setting 2 needs p >= 15");
    for (double v : {c.c_a, c.b_scale, c.g_scale, c.alpha, c.eta1, c.beta0, c.eta0})
        if (!std::isfinite(v)) throw ConfigError("DGP parameters must be finite");
}

Vec<double> nu_t(Index p) {
    Vec<double> v = Vec<double>::Zero(p);
    for (Index j = 0; j < std::min<Index>(p, 10); ++j) v(j) = 1.0 / static_cast<double>(j + 1);
    return v;
}

Vec<double> nu_c(Index p, int setting) {
    Vec<double> v = Vec<double>::Zero(p);
    const Index second = setting == 1 ? 5 : 10;
    for (Index j = 0; j < 5; ++j) {
        const double w = 1.0 / static_cast<double>(j + 1);
        if (j < p) v(j) = w;
        if (second + j < p) v(second + j) = w;
    }
    return v;
}

Vec<double> nu_a(Index p, double c_a) { return c_a * nu_t(p); }

ColumnSet true_support(const DgpConfig& c) {
    const Vec<double> beta = c.b_scale * nu_t(c.p);
    const Vec<double> eta2 = c.g_scale * nu_c(c.p, c.setting);
    ColumnSet s;
    for (Index j = 0; j < c.p; ++j)
        if (beta(j) != 0.0 || eta2(j) != 0.0) s.push_back(j);
    return s;
}

SurvivalData<double> generate_dataset(const DgpConfig& c) {
    validate(c);
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::exponential_distribution<double> unit_exp(1.0);

    const Index n = c.n;
    const Index p = c.p;
    Vec<double> a(n);
    Mat<double> l(n, p);
    if (c.mechanism == Mechanism::a) {
        Mat<double> sigma(p + 1, p + 1);
        for (Index j = 0; j <= p; ++j)
            for (Index k = 0; k <= p; ++k) sigma(j, k) = std::pow(c.rho, static_cast<double>(std::abs(j - k)));
        const Mat<double> chol = sigma.llt().matrixL();
        Vec<double> e(p + 1);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j <= p; ++j) e(j) = z(rng);
            const Vec<double> x = chol.triangularView<Eigen::Lower>() * e;
            a(i) = x(0);
            l.row(i) = x.tail(p).transpose();
        }
    } else {
        const Vec<double> nu = nu_a(p, c.c_a);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < p; ++j) l(i, j) = z(rng);
            a(i) = l.row(i).dot(nu) + z(rng);
        }
    }

    const Vec<double> beta = c.b_scale * nu_t(p);
    const Vec<double> eta2 = c.g_scale * nu_c(p, c.setting);
    Vec<double> u(n);
    Eigen::VectorXi d(n);
    for (Index i = 0; i < n; ++i) {
        const double rate_t = std::exp(c.beta0 + c.alpha * a(i) + l.row(i).dot(beta));
        const double rate_c = std::exp(c.eta0 + c.eta1 * a(i) + l.row(i).dot(eta2));
        const double t = unit_exp(rng) / rate_t;
        const double cens = unit_exp(rng) / rate_c;
        u(i) = std::min(t, cens);
        d(i) = t <= cens ? 1 : 0;
    }
    auto data = make_survival_data<double>(std::move(u), std::move(d), std::move(a), std::move(l));
    data.exposure_name = "A";
    return data;
}

SurvivalData<double> generate_rotterdam_surrogate(Index n, std::uint64_t seed) {
    if (n < 2) throw ConfigError("n must be at least 2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> unit_exp(1.0);
    auto bernoulli = [&](double prob) { return unif(rng) < prob ? 1.0 : 0.0; };

    const Index p = 10;
    Vec<double> u(n), chemo(n);
    Eigen::VectorXi d(n);
    Mat<double> l(n, p);
    for (Index i = 0; i < n; ++i) {
        const double year = 1978.0 + std::floor(16.0 * unif(rng));
        const double age = std::clamp(55.0 + 12.0 * z(rng), 25.0, 90.0);
        const double meno = bernoulli(expit((age - 50.0) / 3.0));
        const double zs = z(rng);
        const double size1 = zs > -0.1 && zs <= 1.3 ? 1.0 : 0.0;  // 20-50
        const double size2 = zs > 1.3 ? 1.0 : 0.0;                // >50
        const double grade = 2.0 + bernoulli(expit(0.8 + 0.5 * zs));
        std::poisson_distribution<int> nodes_dist(std::exp(0.2 + 0.6 * zs));
        const double nodes = std::min(nodes_dist(rng), 30);
        const double hormon = bernoulli(expit(-2.0 + 0.25 * nodes - 0.02 * (age - 55.0)));
        const double pgr = std::exp(3.5 + 1.0 * z(rng));
        const double er = std::exp(4.0 + 1.0 * z(rng) + 0.01 * (age - 55.0));

        chemo(i) = bernoulli(expit(-1.0 - 0.15 * (age - 55.0) - 0.4 * meno + 0.15 * (year - 1985.0) +
                                   0.15 * std::min(nodes, 8.0)));

        const double lp = -0.1 * chemo(i) + 0.35 * size1 + 0.7 * size2 + 0.35 * (grade - 2.0) + 0.07 * nodes -
                          0.010 * (age - 55.0) - 0.05 * meno + 0.02 * (year - 1985.0) + 0.1 * hormon -
                          0.0015 * pgr - 0.0005 * er;
        const double t = unit_exp(rng) / (0.006 * std::exp(lp));
        const double follow_up = (1994.0 - year + 6.0 * unif(rng)) * 12.0;
        const double dropout = unit_exp(rng) / 0.002;
        const double c = std::min(follow_up, dropout);
        u(i) = std::min(t, c);
        d(i) = t <= c ? 1 : 0;
        l.row(i) << year, age, meno, size1, size2, grade, nodes, hormon, pgr, er;
    }
    auto data = make_survival_data<double>(std::move(u), std::move(d), std::move(chemo), std::move(l));
    data.exposure_name = "chemo";
    data.covariate_names = {"year", "age", "meno", "size=20-50", "size=>50", "grade", "nodes", "hormon", "pgr", "er"};
    return data;
}

void validate(const ExperimentGrid& g) {
    if (g.b_values.empty() || g.g_values.empty()) throw ConfigError("grid needs at least one b and one g value");
    if (g.replications < 1) throw ConfigError("replications must be at least 1");
    if (g.methods.empty()) throw ConfigError("no methods requested");
    if (!(g.level > 0 && g.level < 1)) throw ConfigError("level must lie in (0, 1)");
    if (!(g.failure_cap >= 0 && g.failure_cap <= 1)) throw ConfigError("failure cap must lie in [0, 1]");
    if (g.threads < 0) throw ConfigError("threads must be non-negative");
    DgpConfig probe = g.dgp;
    for (double b : g.b_values)
        for (double gg : g.g_values) {
            probe.b_scale = b;
            probe.g_scale = gg;
            validate(probe);
        }
    PipelineConfig pc = g.pipeline;
    pc.level = g.level;
    validate(pc, g.dgp.p);
}

const CellResult& GridResult::cell(Method m, double b, double g) const {
    for (const auto& c : cells)
        if (c.method == m && c.b == b && c.g == g) return c;
    throw ConfigError("no grid cell for method " + to_string(m));
}

GridResult run_grid(const ExperimentGrid& grid, const Progress& progress) {
    validate(grid);
    const std::size_t n_cells = grid.b_values.size() * grid.g_values.size();
    const auto reps = static_cast<std::size_t>(grid.replications);
    const std::size_t n_methods = grid.methods.size();
    std::vector<ReplicationRecord> records(n_cells * reps * n_methods);

    auto job = [&](std::size_t i) {
        const std::size_t cell = i / reps;
        const std::size_t rep = i % reps;
        DgpConfig dgp = grid.dgp;
        dgp.b_scale = grid.b_values[cell / grid.g_values.size()];
        dgp.g_scale = grid.g_values[cell % grid.g_values.size()];
        dgp.seed = derive_seed(grid.seed, {cell, rep, 0});
        PipelineConfig pc = grid.pipeline;
        pc.level = grid.level;
        pc.seed = derive_seed(grid.seed, {cell, rep, 1});
        if (pc.oracle_support.empty()) pc.oracle_support = true_support(dgp);

        std::vector<std::optional<InferenceReport>> reports;
        std::vector<std::string> errors(n_methods);
        try {
            const auto data = generate_dataset(dgp);
            reports = run_guarded(data, pc, grid.methods, errors);
        } catch (const Error& e) {
            reports.assign(n_methods, std::nullopt);
            errors.assign(n_methods, e.what());
        }
        for (std::size_t k = 0; k < n_methods; ++k) {
            ReplicationRecord& r = records[i * n_methods + k];
            r.cell = static_cast<Index>(cell);
            r.replication = static_cast<int>(rep);
            r.method = grid.methods[k];
            if (!reports[k]) {
                r.failed = true;
                r.error = errors[k];
                continue;
            }
            r.estimate = reports[k]->estimate;
            r.se = reports[k]->se;
            r.rejected = reports[k]->p_value < grid.level;
        }
    };
    parallel_for(n_cells * reps, grid.threads, job, progress);

    GridResult out;
    out.replications = std::move(records);
    for (std::size_t cell = 0; cell < n_cells; ++cell)
        for (std::size_t k = 0; k < n_methods; ++k) {
            CellResult c;
            c.method = grid.methods[k];
            c.b = grid.b_values[cell / grid.g_values.size()];
            c.g = grid.g_values[cell % grid.g_values.size()];
            double sum_est = 0, sum_se = 0;
            for (std::size_t rep = 0; rep < reps; ++rep) {
                const auto& r = out.replications[(cell * reps + rep) * n_methods + k];
                if (r.failed) {
                    ++c.failures;
                    continue;
                }
                ++c.reps;
                c.rejections += r.rejected ? 1 : 0;
                sum_est += r.estimate;
                sum_se += r.se;
            }
            if (c.reps > 0) {
                c.rate = static_cast<double>(c.rejections) / c.reps;
                c.mc_se = std::sqrt(c.rate * (1 - c.rate) / c.reps);
                c.mean_estimate = sum_est / c.reps;
                c.mean_se = sum_se / c.reps;
            }
            c.unreliable = c.reps == 0 || static_cast<double>(c.failures) > grid.failure_cap * grid.replications;
            out.cells.push_back(c);
        }
    return out;
}

void validate(const SubsampleConfig& c, Index n, Index p) {
    if (c.sizes.empty()) throw ConfigError("no subsample sizes given");
    for (Index s : c.sizes)
        if (s < 2 || s > n)
            throw ConfigError("subsample size " + std::to_string(s) + " outside [2, " + std::to_string(n) + "]");
    if (c.n_subsamples < 1) throw ConfigError("n_subsamples must be at least 1");
    if (c.methods.empty()) throw ConfigError("no methods requested");
    if (c.threads < 0) throw ConfigError("threads must be non-negative");
    if (c.max_redraws < 0) throw ConfigError("max_redraws must be non-negative");
    validate(c.pipeline, p);
}

const CoverageRow& SubsampleResult::row(Index size, Method m) const {
    for (const auto& r : rows)
        if (r.size == size && r.method == m) return r;
    throw ConfigError("no coverage row for method " + to_string(m));
}

InferenceReport benchmark_fit(const SurvivalData<double>& data, const PipelineConfig& config) {
    return run_method(data, config, Method::full);
}

SubsampleResult run_subsample_study(const SurvivalData<double>& data, double benchmark, const SubsampleConfig& cfg,
                                    const Progress& progress) {
    validate(data);
    validate(cfg, data.n(), data.p());
    const std::size_t n_sizes = cfg.sizes.size();
    const auto draws = static_cast<std::size_t>(cfg.n_subsamples);
    const std::size_t n_methods = cfg.methods.size();

    struct Draw {
        std::vector<std::optional<InferenceReport>> reports;
        int redraws = 0;
    };
    std::vector<Draw> results(n_sizes * draws);

    auto job = [&](std::size_t i) {
        const std::size_t si = i / draws;
        const std::size_t s = i % draws;
        const auto m = static_cast<std::size_t>(cfg.sizes[si]);
        Draw& out = results[i];
        std::vector<Index> rows;
        for (int attempt = 0;; ++attempt) {
            std::mt19937_64 rng(derive_seed(cfg.seed, {0, si, s, static_cast<std::uint64_t>(attempt)}));
            std::vector<Index> perm(static_cast<std::size_t>(data.n()));
            std::iota(perm.begin(), perm.end(), Index(0));
            for (std::size_t k = 0; k < m; ++k) {
                std::uniform_int_distribution<std::size_t> pick(k, perm.size() - 1);
                std::swap(perm[k], perm[pick(rng)]);
            }
            rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
            std::sort(rows.begin(), rows.end());
            Index events = 0;
            for (Index r : rows) events += data.status(r) == 1 && data.time(r) <= data.tau ? 1 : 0;
            if (events >= cfg.min_events) break;
            if (attempt >= cfg.max_redraws)
                throw NumericalError("subsample of size " + std::to_string(m) + " has too few events after " +
                                     std::to_string(cfg.max_redraws) + " redraws");
            ++out.redraws;
        }
        const auto sub = subset_rows(data, rows);
        PipelineConfig pc = cfg.pipeline;
        pc.seed = derive_seed(cfg.seed, {1, si, s});
        std::vector<std::string> errors;
        out.reports = run_guarded(sub, pc, cfg.methods, errors);
    };
    parallel_for(n_sizes * draws, cfg.threads, job, progress);

    SubsampleResult res;
    res.benchmark = benchmark;
    for (const auto& d : results) res.redraws += d.redraws;
    for (std::size_t si = 0; si < n_sizes; ++si)
        for (std::size_t k = 0; k < n_methods; ++k) {
            CoverageRow row;
            row.size = cfg.sizes[si];
            row.method = cfg.methods[k];
            std::vector<double> est;
            double sum_se = 0;
            int covered = 0;
            for (std::size_t s = 0; s < draws; ++s) {
                const auto& r = results[si * draws + s].reports[k];
                if (!r) {
                    ++row.failures;
                    continue;
                }
                est.push_back(r->estimate);
                sum_se += r->se;
                covered += r->ci_lower <= benchmark && benchmark <= r->ci_upper ? 1 : 0;
            }
            row.subsamples = static_cast<int>(est.size());
            if (!est.empty()) {
                const double cnt = static_cast<double>(est.size());
                const double mean = std::accumulate(est.begin(), est.end(), 0.0) / cnt;
                double ss = 0;
                for (double e : est) ss += (e - mean) * (e - mean);
                row.bias = mean - benchmark;
                row.sd = est.size() > 1 ? std::sqrt(ss / (cnt - 1)) : 0.0;
                row.mean_se = sum_se / cnt;
                row.coverage = covered / cnt;
            }
            res.rows.push_back(row);
        }
    return res;
}

void write_grid_csv(std::ostream& out, const GridResult& result) {
    out << "method,b,g,reps,rejections,rate,mc_se,failures,mean_estimate,mean_se,unreliable\n";
    for (const auto& c : result.cells)
        out << to_string(c.method) << ',' << format_double(c.b) << ',' << format_double(c.g) << ',' << c.reps << ','
            << c.rejections << ',' << format_double(c.rate) << ',' << format_double(c.mc_se) << ',' << c.failures
            << ',' << format_double(c.mean_estimate) << ',' << format_double(c.mean_se) << ','
            << (c.unreliable ? 1 : 0) << '\n';
}

void write_plot_csv(std::ostream& out, const GridResult& result) {
    out << "method,b,g,rate,mc_se\n";
    for (const auto& c : result.cells)
        out << to_string(c.method) << ',' << format_double(c.b) << ',' << format_double(c.g) << ','
            << format_double(c.rate) << ',' << format_double(c.mc_se) << '\n';
}

void write_replications_csv(std::ostream& out, const GridResult& result) {
    out << "cell,replication,method,failed,estimate,se,rejected,error\n";
    for (const auto& r : result.replications) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), '"', '\'');
        out << r.cell << ',' << r.replication << ',' << to_string(r.method) << ',' << (r.failed ? 1 : 0) << ','
            << format_double(r.estimate) << ',' << format_double(r.se) << ',' << (r.rejected ? 1 : 0) << ",\""
            << err << "\"\n";
    }
}

void write_coverage_csv(std::ostream& out, const SubsampleResult& result) {
    out << "n,method,bias,sd,mean_se,coverage,subsamples,failures\n";
    for (const auto& r : result.rows)
        out << r.size << ',' << to_string(r.method) << ',' << format_double(r.bias) << ',' << format_double(r.sd)
            << ',' << format_double(r.mean_se) << ',' << format_double(r.coverage) << ',' << r.subsamples << ','
            << r.failures << '\n';
}

}  // namespace coxsel
