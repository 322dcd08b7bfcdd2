#include <catch2/catch_amalgamated.hpp>

#include "coxsel/cli.hpp"
#include "coxsel/csv.hpp"
#include "coxsel/sim_lab.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace coxsel;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

// Fresh scratch directory with a small surrogate CSV.
struct Scratch {
    fs::path dir;
    fs::path csv;

    explicit Scratch(const std::string& name) {
        dir = fs::temp_directory_path() / ("coxsel_cli_" + name);
        fs::remove_all(dir);
        fs::create_directories(dir);
        csv = dir / "data.csv";
        std::ofstream f(csv);
        write_csv(f, generate_rotterdam_surrogate(250, 3), "t", "d");
    }
    ~Scratch() { fs::remove_all(dir); }

    std::vector<std::string> fit_args(const std::string& out_name) const {
        return {"fit",    csv.string(), "--time",   "t",          "--status", "d", "--exposure", "chemo",
                "--all-other-columns", "--folds", "5", "--output-dir", (dir / out_name).string()};
    }
};

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST_CASE("fit writes reports, trace and manifest") {
    Scratch s("fit");
    const auto r = cli(s.fit_args("out"));
    REQUIRE(r.code == 0);
    for (const char* f : {"report.csv", "report.json", "selection_trace.csv", "manifest.json"})
        CHECK(fs::exists(s.dir / "out" / f));
    const auto manifest = nlohmann::json::parse(slurp(s.dir / "out" / "manifest.json"));
    const std::string hash = manifest["config_hash"];
    CHECK(hash.size() == 16);
    const std::string csv = slurp(s.dir / "out" / "report.csv");
    CHECK(csv.rfind("# config_hash=" + hash + "\n", 0) == 0);
    // default "all": the four comparison methods
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + 4);
    CHECK(r.out.find("poor-mans") != std::string::npos);
    const std::string trace = slurp(s.dir / "out" / "selection_trace.csv");
    CHECK(trace.find("poor-mans,censoring,") != std::string::npos);
    const auto record = nlohmann::json::parse(slurp(s.dir / "out" / "report.json"));
    CHECK(record["config_hash"] == hash);
    CHECK(record["reports"].size() == 4);
}

TEST_CASE("stdout formats come from the same record") {
    Scratch s("formats");
    auto args = concat(s.fit_args("out"), {"--method", "triple", "--format", "csv"});
    const auto csv = cli(args);
    REQUIRE(csv.code == 0);
    const std::string file = slurp(s.dir / "out" / "report.csv");
    CHECK(file.substr(file.find('\n') + 1) == csv.out);
    args.back() = "json";
    const auto js = cli(args);
    REQUIRE(js.code == 0);
    const auto parsed = nlohmann::json::parse(js.out);
    const std::string estimate = parsed["reports"][0]["estimate"];
    CHECK(csv.out.find("," + estimate + ",") != std::string::npos);
    args.back() = "table";
    const auto table = cli(args);
    CHECK(table.out.find(estimate) != std::string::npos);
}

TEST_CASE("repeated fit with the same seed is byte identical") {
    Scratch s("determinism");
    REQUIRE(cli(concat(s.fit_args("a"), {"--seed", "7"})).code == 0);
    REQUIRE(cli(concat(s.fit_args("b"), {"--seed", "7"})).code == 0);
    for (const char* f : {"report.csv", "report.json", "selection_trace.csv"})
        CHECK(slurp(s.dir / "a" / f) == slurp(s.dir / "b" / f));
}

TEST_CASE("config file values apply unless a flag overrides them") {
    Scratch s("config");
    const fs::path cfg = s.dir / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "# analysis settings\n"
          << "time = t\nstatus = d\nexposure = chemo\n"
          << "all-other-columns = true\n"
          << "method = post-lasso,triple\n"
          << "folds = 5\n"
          << "input = " << s.csv.string() << "\n";
    }
    const auto out = (s.dir / "out").string();
    const auto r = cli({"fit", "--config", cfg.string(), "--output-dir", out, "--format", "csv"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("post-lasso,") != std::string::npos);
    CHECK(r.out.find("triple,") != std::string::npos);
    const auto m1 = nlohmann::json::parse(slurp(fs::path(out) / "manifest.json"));
    CHECK(m1["config"]["pipeline"]["folds"] == 5);

    const auto o = cli({"fit", "--config", cfg.string(), "--output-dir", out, "--method", "fang", "--folds", "4",
                        "--format", "csv"});
    REQUIRE(o.code == 0);
    CHECK(o.out.find("triple,") == std::string::npos);
    CHECK(o.out.find("fang,") != std::string::npos);
    const auto m2 = nlohmann::json::parse(slurp(fs::path(out) / "manifest.json"));
    CHECK(m2["config"]["pipeline"]["folds"] == 4);

    std::ofstream(s.dir / "bad.cfg") << "colour = blue\n";
    CHECK(cli({"fit", "--config", (s.dir / "bad.cfg").string()}).code == 2);
    std::ofstream(s.dir / "malformed.cfg") << "just words\n";
    CHECK(cli({"fit", "--config", (s.dir / "malformed.cfg").string()}).code == 2);
}

TEST_CASE("configuration errors exit with code 2") {
    Scratch s("errors");
    CHECK(cli(concat(s.fit_args("o"), {"--method", ""})).code == 2);
    CHECK(cli(concat(s.fit_args("o"), {"--method", "ridge"})).code == 2);
    CHECK(cli(concat(s.fit_args("o"), {"--forced-in", "height"})).code == 2);
    CHECK(cli(concat(s.fit_args("o"), {"--rule", "2se"})).code == 2);
    CHECK(cli({"fit", s.csv.string(), "--time", "t", "--status", "x", "--exposure", "chemo"}).code == 2);
    CHECK(cli({"fit", (s.dir / "missing.csv").string(), "--time", "t", "--status", "d", "--exposure", "chemo"}).code ==
          2);
    CHECK(cli({"fit", s.csv.string(), "--time", "t", "--status", "d", "--exposure", "chemo", "--covariates", "age",
               "--all-other-columns"})
              .code == 2);
    CHECK(cli({"simulate", "--methods", ""}).code == 2);
    CHECK(cli({"simulate", "--preset", "paper-9z"}).code == 2);
    CHECK(cli({"simulate", "--desk", "--full"}).code == 2);
    CHECK(cli({"simulate", "--rho", "1.5"}).code == 2);
    CHECK(cli({"subsample", "--surrogate", "100", "--sizes", "500"}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({}).code == 2);
    const auto e = cli({"simulate", "--methods", ""});
    CHECK(e.err.find("no methods") != std::string::npos);
}

TEST_CASE("numerical failures exit with code 3") {
    Scratch s("numerical");
    const fs::path csv = s.dir / "censored.csv";
    std::ofstream(csv) << "t,d,a,x\n1,0,1,0.5\n2,0,0,0.1\n3,0,1,0.7\n4,0,0,0.2\n";
    const auto r = cli({"fit", csv.string(), "--time", "t", "--status", "d", "--exposure", "a", "--all-other-columns",
                        "--method", "full", "--output-dir", (s.dir / "o").string()});
    CHECK(r.code == 3);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("help and version exit cleanly") {
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({"fit", "--help"}).code == 0);
    CHECK(cli({"--version"}).code == 0);
}

TEST_CASE("simulate output does not depend on threads") {
    Scratch s("simulate");
    const std::vector<std::string> base{"simulate", "--preset", "paper-1b", "--n", "120", "--p", "12", "--reps", "2",
                                        "--b", "0.5,1", "--g", "1", "--folds", "5", "--seed", "5"};
    REQUIRE(cli(concat(base, {"--threads", "1", "--output-dir", (s.dir / "t1").string()})).code == 0);
    REQUIRE(cli(concat(base, {"--threads", "4", "--output-dir", (s.dir / "t4").string()})).code == 0);
    for (const char* f : {"grid.csv", "plot_data.csv", "replications.csv"})
        CHECK(slurp(s.dir / "t1" / f) == slurp(s.dir / "t4" / f));
    const std::string plot = slurp(s.dir / "t1" / "plot_data.csv");
    CHECK(plot.find("method,b,g,rate,mc_se\n") != std::string::npos);
    const auto manifest = nlohmann::json::parse(slurp(s.dir / "t1" / "manifest.json"));
    CHECK(manifest["config"]["dgp"]["mechanism"] == "b");
    CHECK(manifest["config"]["dgp"]["c_a"] == 1.0);
    CHECK(manifest["runtime"]["threads"] == 1);
}

TEST_CASE("subsample of full size covers the benchmark") {
    Scratch s("subsample");
    const auto r = cli({"subsample", s.csv.string(), "--time", "t", "--status", "d", "--exposure", "chemo",
                        "--all-other-columns", "--sizes", "250", "--subsamples", "2", "--methods", "full",
                        "--output-dir", (s.dir / "o").string(), "--format", "csv"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    const auto table = read_csv_table(in);
    REQUIRE(table.rows.size() == 1);
    CHECK(parse_number(table.rows[0][table.column("coverage")], 1, 1) == 1.0);
    CHECK(std::abs(parse_number(table.rows[0][table.column("bias")], 1, 1)) <= 1e-12);
}

TEST_CASE("output directory defaults to the environment variable") {
    Scratch s("env");
    const auto target = s.dir / "from_env";
    ::setenv("COXSEL_OUTPUT_DIR", target.string().c_str(), 1);
    const auto r = cli({"fit", s.csv.string(), "--time", "t", "--status", "d", "--exposure", "chemo",
                        "--all-other-columns", "--method", "full"});
    ::unsetenv("COXSEL_OUTPUT_DIR");
    REQUIRE(r.code == 0);
    CHECK(fs::exists(target / "report.csv"));
}
