#include "svl/ensemble.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "svl/integrator.hpp"
#include "svl/rng.hpp"

namespace svl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr Observable kObservables[] = {Observable::N1, Observable::N2, Observable::RhoE, Observable::Mz};

double final_value(const TrajectoryRecord& r, Observable o) {
    switch (o) {
        case Observable::N1: return r.n1_final;
        case Observable::N2: return r.n2_final;
        case Observable::RhoE: return r.rho_e_final;
        case Observable::Mz: return r.mz_final;
    }
    return 0.0;
}

void write_file_atomically(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, path);
}

std::pair<double, double> mean_and_se(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / n;
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

const EnsembleSummary& EnsembleResult::summary(Observable o) const {
    for (const auto& s : summaries) {
        if (s.observable == o) return s;
    }
    throw InsufficientData("no summary for observable " + std::string(to_string(o)));
}

std::vector<double> EnsembleResult::finals(Observable o) const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        if (r.ok()) out.push_back(final_value(r, o));
    }
    return out;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto work = [&] {
        while (!stop.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                stop = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

EnsembleResult run_ensemble(const ExperimentConfig& resolved, const RunOptions& options) {
    if (!resolved.resolved()) throw ConfigError("run_ensemble: config must be resolved");
    const CirculantGraph g = resolved.make_graph();
    const AnnealSchedule s = resolved.make_schedule();
    const PhysicalParams p = resolved.physics;
    const IntegrationConfig base = resolved.make_integration();
    const std::size_t n = resolved.ensemble.n_trajectories;
    const bool correlator = resolved.outputs.correlator;
    const Index d_max = g.size() / 2;
    const std::size_t n_samples = base.sample_times.size();

    EnsembleResult result;
    result.config = resolved;
    result.fingerprint = config_fingerprint(resolved);
    result.records.resize(n);
    // Per-trajectory correlators are reduced afterwards in index order, so
    // the floating-point sums do not depend on scheduling.
    std::vector<std::vector<Eigen::VectorXd>> corr(correlator ? n : 0);

    parallel_for(n, options.threads, [&](std::size_t i) {
        IntegrationConfig ic = base;
        ic.seed = derive_seed(resolved.ensemble.base_seed, i);
        SampleObserver observer;
        if (correlator) {
            corr[i].reserve(n_samples);
            observer = [&corr, i, d_max](std::size_t, const RotorState& st) {
                corr[i].push_back(spatial_correlation(st.angles, d_max));
            };
        }
        TrajectoryRecord rec;
        try {
            rec = run_trajectory(g, s, p, ic, observer);
        } catch (const IntegrationFailure& e) {
            rec = TrajectoryRecord{};
            rec.seed = ic.seed;
            rec.failure = e.what();
            if (correlator) corr[i].clear();
        }
        rec.index = i;
        result.records[i] = std::move(rec);
    });

    for (const auto& r : result.records) result.n_failed += r.ok() ? 0 : 1;

    if (result.records.size() - result.n_failed >= 3) {
        for (std::size_t k = 0; k < std::size(kObservables); ++k) {
            const Observable o = kObservables[k];
            const std::vector<double> values = result.finals(o);
            result.summaries.push_back(summarize(o, values, result.fingerprint, options.bootstrap_resamples,
                                                 derive_seed(resolved.ensemble.base_seed ^ 0xb0075742ULL, k)));
        }
    }

    if (resolved.outputs.series) {
        SeriesSummary ss;
        for (std::size_t k = 0; k < n_samples; ++k) {
            std::vector<double> rho, mz;
            for (const auto& r : result.records) {
                if (!r.ok()) continue;
                rho.push_back(r.series[k].rho_e);
                mz.push_back(r.series[k].mz);
            }
            if (rho.empty()) break;
            ss.time.push_back(base.sample_times[k]);
            const auto [rm, rs] = mean_and_se(rho);
            const auto [mm, ms] = mean_and_se(mz);
            ss.rho_e_mean.push_back(rm);
            ss.rho_e_se.push_back(rs);
            ss.mz_mean.push_back(mm);
            ss.mz_se.push_back(ms);
        }
        result.series = std::move(ss);
    }

    if (correlator) {
        result.correlator_times = base.sample_times;
        for (std::size_t k = 0; k < n_samples; ++k) {
            const double t = base.sample_times[k];
            CorrelationProfile prof(g.size(), d_max, control_parameter(s, g, t));
            for (std::size_t i = 0; i < n; ++i) {
                if (result.records[i].ok()) prof.add_sample(corr[i][k]);
            }
            result.correlators.push_back(std::move(prof));
        }
    }
    return result;
}

json trajectory_to_json(const TrajectoryRecord& r) {
    json j;
    j["index"] = r.index;
    j["seed"] = r.seed;
    if (!r.ok()) {
        j["failure"] = *r.failure;
        return j;
    }
    j["n1"] = r.n1_final;
    j["n2"] = r.n2_final;
    j["rho_e"] = r.rho_e_final;
    j["mz"] = r.mz_final;
    if (!r.series.empty()) {
        json series = json::array();
        for (const auto& smp : r.series) series.push_back({smp.time, smp.rho_e, smp.mz});
        j["series"] = std::move(series);
    }
    return j;
}

std::string summary_csv_header() {
    return "format_version,N,r,c,tau_q,gamma,observable,count,kappa1,kappa2,kappa3,se_kappa1,se_kappa2,se_kappa3,"
           "n_fail,fingerprint\n";
}

std::string summary_csv_row(const ExperimentConfig& c, const EnsembleSummary& s, std::size_t n_fail) {
    std::ostringstream o;
    o << kOutputFormatVersion << ',' << c.graph.n << ',' << c.graph.r << ','
      << format_double(connectance(c.make_graph())) << ',' << format_double(c.schedule.tau_q) << ','
      << format_double(c.physics.damping) << ',' << to_string(s.observable) << ',' << s.count << ','
      << format_double(s.kappa1) << ',' << format_double(s.kappa2) << ',' << format_double(s.kappa3) << ','
      << format_double(s.se_kappa1) << ',' << format_double(s.se_kappa2) << ',' << format_double(s.se_kappa3) << ','
      << n_fail << ',' << s.config_fingerprint << '\n';
    return o.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_run_outputs(const EnsembleResult& result, const fs::path& dir, const std::string& started,
                       const std::string& finished) {
    fs::create_directories(dir);
    const ExperimentConfig& cfg = result.config;

    if (cfg.outputs.finals || cfg.outputs.series) {
        std::string nd = json{{"format", "svl.trajectories"}, {"format_version", kOutputFormatVersion}}.dump() + "\n";
        for (const auto& r : result.records) nd += trajectory_to_json(r).dump() + "\n";
        write_file_atomically(dir / "trajectories.ndjson", nd);
    }

    std::string csv = summary_csv_header();
    for (const auto& s : result.summaries) csv += summary_csv_row(cfg, s, result.n_failed);
    write_file_atomically(dir / "summary.csv", csv);

    if (result.series) {
        const SeriesSummary& ss = *result.series;
        std::string out = "format_version,time,rho_e_mean,rho_e_se,mz_mean,mz_se\n";
        for (std::size_t k = 0; k < ss.time.size(); ++k) {
            out += std::to_string(kOutputFormatVersion) + ',' + format_double(ss.time[k]) + ',' +
                   format_double(ss.rho_e_mean[k]) + ',' + format_double(ss.rho_e_se[k]) + ',' +
                   format_double(ss.mz_mean[k]) + ',' + format_double(ss.mz_se[k]) + '\n';
        }
        write_file_atomically(dir / "series.csv", out);
    }

    if (!result.correlators.empty()) {
        json profiles = json::array();
        for (std::size_t k = 0; k < result.correlators.size(); ++k) {
            const CorrelationProfile& p = result.correlators[k];
            const Eigen::VectorXd& sum = p.sums();
            const Eigen::VectorXd& sq = p.sums_of_squares();
            profiles.push_back({{"time", result.correlator_times[k]},
                                {"epsilon", p.epsilon()},
                                {"n_trajectories", p.n_trajectories()},
                                {"sum", std::vector<double>(sum.data(), sum.data() + sum.size())},
                                {"sum_sq", std::vector<double>(sq.data(), sq.data() + sq.size())}});
        }
        json j{{"format", "svl.correlator"}, {"format_version", kOutputFormatVersion}, {"n_sites", cfg.graph.n},
               {"profiles", std::move(profiles)}};
        write_file_atomically(dir / "correlator.json", j.dump(1) + "\n");
    }

    json manifest{{"format", "svl.manifest"},
                  {"format_version", kOutputFormatVersion},
                  {"code_version", kCodeVersion},
                  {"rng_algorithm", kRngAlgorithm},
                  {"seed_rule", kSeedRule},
                  {"config_resolved", to_json(cfg)},
                  {"config_digest", config_digest(cfg)},
                  {"fingerprint", result.fingerprint},
                  {"n_trajectories", result.records.size()},
                  {"n_failed", result.n_failed},
                  {"started", started},
                  {"finished", finished},
                  {"complete", true}};
    write_file_atomically(dir / "manifest.json", manifest.dump(2) + "\n");
}

bool run_is_complete(const fs::path& dir, const ExperimentConfig& resolved) {
    const fs::path path = dir / "manifest.json";
    if (!fs::exists(path) || !fs::exists(dir / "summary.csv")) return false;
    try {
        const json m = load_json(path.string());
        return m.value("format_version", 0) == kOutputFormatVersion && m.value("complete", false) &&
               m.value("config_digest", std::string()) == config_digest(resolved);
    } catch (const std::exception&) {
        return false;
    }
}

RunOutcome execute_run(const ExperimentConfig& cfg, const fs::path& dir, const RunOptions& options, bool force) {
    const ExperimentConfig resolved = resolve(cfg);
    RunOutcome outcome;
    if (!force && run_is_complete(dir, resolved)) {
        outcome.skipped = true;
        outcome.result.config = resolved;
        return outcome;
    }
    // Stale outputs of a different config must not survive a partial rerun.
    fs::remove(dir / "manifest.json");
    const std::string started = utc_timestamp();
    outcome.result = run_ensemble(resolved, options);
    write_run_outputs(outcome.result, dir, started, utc_timestamp());
    const std::size_t n = outcome.result.records.size();
    if (outcome.result.n_failed * 100 > n) throw FailureThresholdExceeded(outcome.result.n_failed, n);
    return outcome;
}

}  // namespace svl
