#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "svl/config.hpp"
#include "svl/ensemble.hpp"
#include "svl/equilibrium.hpp"
#include "svl/recipes.hpp"
#include "svl/sweep.hpp"

using namespace svl;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Scratch directory removed on scope exit.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("svl_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

json small_config() {
    return json::parse(R"({
        "format_version": 1,
        "graph": {"n": 21, "r": 1},
        "schedule": {"j0": 1.0, "h0": "auto_2r", "tau_q": 5.0},
        "physics": {"mass": 1.0, "gamma": 1.0, "temperature": 0.001},
        "integration": {"dt": "auto", "scheme": "weak2", "samples": 4},
        "ensemble": {"n_trajectories": 6, "base_seed": 7},
        "outputs": {"series": true, "correlator": true}
    })");
}

json exploding_config() {
    json j = small_config();
    j["physics"]["mass"] = 1e-308;
    j["physics"]["gamma"] = 0.0;
    j["integration"]["dt"] = 1.0;
    j["schedule"]["tau_q"] = 50.0;
    j["outputs"] = {{"series", false}, {"correlator", false}};
    return j;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SVL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string error_of(const json& j) {
    try {
        config_from_json(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("config defaults, resolution and round trip") {
    const ExperimentConfig raw = config_from_json(json::object());
    CHECK(raw.graph.n == 101);
    CHECK_FALSE(raw.resolved());
    const ExperimentConfig cfg = resolve(config_from_json(small_config()));
    CHECK(cfg.resolved());
    CHECK(*cfg.schedule.h0 == 2.0);
    CHECK(*cfg.integration.dt == doctest::Approx(0.005));
    CHECK(cfg.make_schedule().critical_time(cfg.make_graph()) == doctest::Approx(2.5));

    const ExperimentConfig back = config_from_json(to_json(cfg));
    CHECK(to_json(back) == to_json(cfg));
    CHECK(config_fingerprint(back) == config_fingerprint(cfg));
    CHECK(config_fingerprint(cfg).size() == 16);

    ExperimentConfig other = cfg;
    other.ensemble.base_seed = 8;
    CHECK(config_fingerprint(other) != config_fingerprint(cfg));
    other = cfg;
    other.outputs.directory = "elsewhere";
    other.ensemble.max_parallelism = 3;
    CHECK(config_digest(other) == config_digest(cfg));
}

TEST_CASE("config errors name the offending field") {
    json j = small_config();
    j["graph"]["radius"] = 2;
    CHECK(error_of(j).find("radius") != std::string::npos);

    j = small_config();
    j["physics"]["gamma"] = "fast";
    CHECK(error_of(j).find("gamma") != std::string::npos);

    j = small_config();
    j["format_version"] = 2;
    CHECK(error_of(j).find("format_version") != std::string::npos);

    j = small_config();
    j["graph"]["r"] = 11;
    CHECK_THROWS_AS(resolve(config_from_json(j)), ConfigError);

    j = small_config();
    j["ensemble"]["n_trajectories"] = 2;
    CHECK_THROWS_AS(resolve(config_from_json(j)), ConfigError);

    j = small_config();
    j["integration"]["scheme"] = "rk4";
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
}

TEST_CASE("thread count resolution order") {
    ExperimentConfig cfg;
    cfg.ensemble.max_parallelism = 3;
    ::unsetenv(kThreadsEnvVar);
    CHECK(resolve_thread_count(std::nullopt, cfg) == 3);
    ::setenv(kThreadsEnvVar, "5", 1);
    CHECK(resolve_thread_count(std::nullopt, cfg) == 5);
    CHECK(resolve_thread_count(2u, cfg) == 2);
    ::unsetenv(kThreadsEnvVar);
    cfg.ensemble.max_parallelism = 0;
    CHECK(resolve_thread_count(std::nullopt, cfg) >= 1);
}

TEST_SUITE("properties") {
TEST_CASE("outputs are byte-identical across thread counts") {
    TempDir tmp("threads");
    const ExperimentConfig cfg = resolve(config_from_json(small_config()));
    RunOptions one, four;
    one.threads = 1;
    four.threads = 4;
    const RunOutcome a = execute_run(cfg, tmp.path / "a", one, false);
    const RunOutcome b = execute_run(cfg, tmp.path / "b", four, false);
    CHECK_FALSE(a.skipped);
    for (const char* name : {"trajectories.ndjson", "summary.csv", "series.csv", "correlator.json"}) {
        INFO(name);
        REQUIRE(fs::exists(tmp.path / "a" / name));
        CHECK(slurp(tmp.path / "a" / name) == slurp(tmp.path / "b" / name));
    }
    for (std::size_t i = 0; i < a.result.records.size(); ++i) {
        CHECK(a.result.records[i].seed == derive_seed(7, i));
        CHECK(a.result.records[i].rho_e_final == b.result.records[i].rho_e_final);
    }

    // The NDJSON header and the manifest carry the format version.
    std::ifstream nd(tmp.path / "a" / "trajectories.ndjson");
    std::string first;
    std::getline(nd, first);
    CHECK(json::parse(first).at("format_version") == kOutputFormatVersion);
    const json manifest = json::parse(slurp(tmp.path / "a" / "manifest.json"));
    CHECK(manifest.at("format_version") == kOutputFormatVersion);
    CHECK(manifest.at("complete") == true);
    CHECK(manifest.contains("rng_algorithm"));

    // A complete run is skipped; --force recomputes the same bytes.
    const std::string before = slurp(tmp.path / "a" / "trajectories.ndjson");
    CHECK(execute_run(cfg, tmp.path / "a", one, false).skipped);
    CHECK_FALSE(execute_run(cfg, tmp.path / "a", one, true).skipped);
    CHECK(slurp(tmp.path / "a" / "trajectories.ndjson") == before);
}
}

TEST_CASE("sweep shape and restart idempotence") {
    TempDir tmp("sweep");
    json spec_json{{"base", small_config()}, {"grid", {{"graph.r", {1, 2}}, {"schedule.tau_q", {5.0, 10.0}}}}};
    spec_json["base"]["outputs"] = {{"series", false}, {"correlator", false}};
    const SweepSpec spec = sweep_from_json(spec_json);
    REQUIRE(spec.cells.size() == 4);
    CHECK(spec.cell_config(3).graph.r == 2);
    CHECK(spec.cell_config(3).schedule.tau_q == 10.0);

    RunOptions opts;
    const SweepReport first = run_sweep(spec, tmp.path, opts, false);
    CHECK_FALSE(first.any_error());
    const std::vector<SummaryRow> rows = read_summary_csv(first.summary_csv);
    CHECK(rows.size() == 2 * 2 * 4);

    const std::string cell1 = slurp(tmp.path / cell_name(1) / "trajectories.ndjson");
    const std::string table = slurp(first.summary_csv);
    fs::remove_all(tmp.path / cell_name(1));
    const SweepReport second = run_sweep(spec, tmp.path, opts, false);
    CHECK(second.cells[0].skipped);
    CHECK_FALSE(second.cells[1].skipped);
    CHECK(second.cells[2].skipped);
    CHECK(second.cells[3].skipped);
    CHECK(slurp(tmp.path / cell_name(1) / "trajectories.ndjson") == cell1);
    CHECK(slurp(second.summary_csv) == table);

    CHECK_THROWS_AS(sweep_from_json(json{{"base", small_config()}, {"grid", {{"graph.r", json::array()}}}}), ConfigError);
}

TEST_CASE("failure threshold aborts the run after writing outputs") {
    TempDir tmp("fail");
    const ExperimentConfig cfg = resolve(config_from_json(exploding_config()));
    RunOptions opts;
    CHECK_THROWS_AS(execute_run(cfg, tmp.path / "run", opts, false), FailureThresholdExceeded);
    const EnsembleResult r = run_ensemble(cfg, opts);
    CHECK(r.n_failed == cfg.ensemble.n_trajectories);
    CHECK(r.records[0].failure.has_value());
    CHECK(r.records[0].failure->find("seed") != std::string::npos);
}

TEST_CASE("summary parsing rejects unknown versions and bad columns") {
    const std::string header = summary_csv_header();
    const std::string good = header + "1,101,1,0.02,40,0.5,n1,100,0.1,0.01,0.001,0.001,0.0001,0.00001,0,abcd\n";
    CHECK(parse_summary_csv(good).size() == 1);
    CHECK(parse_summary_csv(good)[0].observable == Observable::N1);

    std::string v2 = good;
    v2[header.size()] = '2';
    CHECK_THROWS_AS(parse_summary_csv(v2), FormatError);
    try {
        parse_summary_csv(v2);
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("format_version") != std::string::npos);
    }
    std::string bad_obs = good;
    bad_obs.replace(bad_obs.find(",n1,"), 4, ",n9,");
    CHECK_THROWS_AS(parse_summary_csv(bad_obs), FormatError);
    CHECK_THROWS_AS(parse_summary_csv("N,r\n1,2\n"), FormatError);
}

TEST_CASE("predict recipe reports the breakdown connectance") {
    AnalyzeOptions opt;
    opt.z_nu = 1.0;
    opt.nu = 0.5;
    opt.n = 401;
    opt.r = 30;
    const Report rep = analyze_predict(opt);
    CHECK(rep.result.at("connectance").get<double>() == doctest::Approx(0.15));
    CHECK(rep.result.at("regime") == "intermediate");
    CHECK(rep.result.at("prediction").at("n1_tau_exponent").get<double>() == doctest::Approx(-0.25));
    CHECK(rep.result.at("format_version") == kReportFormatVersion);
}

TEST_CASE("kz_fit recipe excludes flagged points") {
    // Synthetic sweep: n1 = 0.5 tau^-1/4 inside the window, a plateau below
    // tau_fast and an adiabatic tail.
    std::ostringstream csv;
    csv.precision(17);
    csv << summary_csv_header();
    const std::vector<double> taus{2, 4, 10, 20, 40, 80, 160, 100000};
    for (double tau : taus) {
        const double n1 = tau < 5 ? 0.3 : (tau > 1000 ? 0.001 : 0.5 * std::pow(tau, -0.25));
        const double mz = tau < 3 ? 0.2 : 0.9;
        csv << "1,101,1,0.02," << tau << ",0.5,n1,100," << n1 << ",0.01,0.001,0.001,0.0001,0.00001,0,x\n";
        csv << "1,101,1,0.02," << tau << ",0.5,mz,100," << mz << ",0.01,0.001,0.001,0.0001,0.00001,0,x\n";
    }
    AnalyzeOptions opt;
    const Report rep = analyze_kz_fit(parse_summary_csv(csv.str()), opt);
    const json& group = rep.result.at("groups").at(0);
    CHECK(group.at("fit").at("exponent_or_rate").get<double>() == doctest::Approx(-0.25).epsilon(1e-9));
    CHECK(group.at("fit").at("n_points") == 5);
}

TEST_CASE("command-line exit codes") {
    TempDir tmp("cli");
    spit(tmp.path / "good.json", small_config().dump());
    spit(tmp.path / "bad.json", R"({"graph": {"n": 10, "radius": 2}})");
    spit(tmp.path / "boom.json", exploding_config().dump());
    spit(tmp.path / "v9.csv", "format_version,N\n9,101\n");
    const std::string out = " --out " + (tmp.path / "o").string();

    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("run --config " + (tmp.path / "good.json").string() + out + " --threads 2") == 0);
    CHECK(run_cli("run --config " + (tmp.path / "good.json").string() + out) == 0);
    CHECK(run_cli("run --config " + (tmp.path / "bad.json").string() + out) == 1);
    CHECK(run_cli("run --config " + (tmp.path / "missing.json").string() + out) == 1);
    CHECK(run_cli("frobnicate") == 1);
    CHECK(run_cli("run --config " + (tmp.path / "boom.json").string() + " --out " + (tmp.path / "b").string()) == 2);
    CHECK(run_cli("analyze kz_fit --input " + (tmp.path / "v9.csv").string() + " --out " + tmp.path.string()) == 3);
    CHECK(run_cli("analyze kz_fit --input " + (tmp.path / "o" / "summary.csv").string() + " --out " + tmp.path.string()) == 3);
    CHECK(run_cli("predict --preset underdamped --n 401 --r 30 --out " + tmp.path.string()) == 0);
    CHECK(fs::exists(tmp.path / "report_predict.json"));
}

TEST_CASE("shipped presets parse and resolve") {
    std::size_t seen = 0;
    for (const auto& entry : fs::directory_iterator(fs::path(SVL_SOURCE_DIR) / "presets")) {
        if (entry.path().extension() != ".json") continue;
        INFO(entry.path().string());
        json j = load_json(entry.path().string());
        if (j.contains("grid") || j.contains("cells")) {
            CHECK_NOTHROW(sweep_from_json(j));
        } else {
            if (j.contains("equilibrium")) {
                CHECK_NOTHROW(equilibrium_from_json(j.at("equilibrium")));
                j.erase("equilibrium");
            }
            CHECK_NOTHROW(resolve(config_from_json(j)));
        }
        ++seen;
    }
    CHECK(seen >= 5);
}
