#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "svl/config.hpp"
#include "svl/observables.hpp"
#include "svl/stats.hpp"

namespace svl {

inline constexpr int kOutputFormatVersion = 1;
inline constexpr const char* kSeedRule =
    "seed_i = splitmix64(splitmix64(base_seed) ^ splitmix64(i + 0x632be59bd9b4e019))";

/// More than 1% of the trajectories failed to integrate.
class FailureThresholdExceeded : public std::runtime_error {
public:
    FailureThresholdExceeded(std::size_t failed, std::size_t total)
        : std::runtime_error(std::to_string(failed) + " of " + std::to_string(total) +
                             " trajectories failed (limit 1%)"),
          failed_(failed), total_(total) {}
    std::size_t failed() const noexcept { return failed_; }
    std::size_t total() const noexcept { return total_; }

private:
    std::size_t failed_;
    std::size_t total_;
};

/// Ensemble mean and standard error of the recorded series at each sample instant.
struct SeriesSummary {
    std::vector<double> time;
    std::vector<double> rho_e_mean, rho_e_se;
    std::vector<double> mz_mean, mz_se;
};

struct EnsembleResult {
    ExperimentConfig config;  ///< resolved
    std::string fingerprint;
    std::vector<TrajectoryRecord> records;  ///< ordered by index
    std::vector<EnsembleSummary> summaries;  ///< one per observable, successful trajectories only
    std::size_t n_failed = 0;
    std::optional<SeriesSummary> series;
    /// One profile per sample instant when correlators are recorded.
    std::vector<CorrelationProfile> correlators;
    std::vector<double> correlator_times;

    const EnsembleSummary& summary(Observable o) const;
    /// Final values of one observable over the successful trajectories.
    std::vector<double> finals(Observable o) const;
};

/// Calls fn(i) for i in [0, count) on `threads` workers. Exceptions from fn are
/// rethrown on the calling thread after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

struct RunOptions {
    unsigned threads = 1;
    int bootstrap_resamples = 1000;
};

/// Runs every trajectory of a resolved config; results do not depend on
/// `threads`. Integration failures are recorded, not thrown.
EnsembleResult run_ensemble(const ExperimentConfig& resolved, const RunOptions& options);

/// Writes trajectories.ndjson, summary.csv, manifest.json and, when recorded,
/// series.csv and correlator.json into `dir`. Files are written to temporary
/// names and renamed, and the manifest goes last, so a present manifest marks
/// a complete run.
void write_run_outputs(const EnsembleResult& result, const std::filesystem::path& dir, const std::string& started,
                       const std::string& finished);

/// True when `dir` holds a complete run of exactly this resolved config.
bool run_is_complete(const std::filesystem::path& dir, const ExperimentConfig& resolved);

/// ISO-8601 UTC wall clock.
std::string utc_timestamp();

nlohmann::json trajectory_to_json(const TrajectoryRecord& r);

std::string summary_csv_header();
std::string summary_csv_row(const ExperimentConfig& resolved, const EnsembleSummary& s, std::size_t n_fail);

struct RunOutcome {
    EnsembleResult result;
    bool skipped = false;  ///< complete outputs already existed
};

/// resolve + run + write, skipping complete runs unless `force`. Throws
/// FailureThresholdExceeded after writing outputs when too many trajectories failed.
RunOutcome execute_run(const ExperimentConfig& cfg, const std::filesystem::path& dir, const RunOptions& options,
                       bool force);

}  // namespace svl
