#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "svl/errors.hpp"
#include "svl/rng.hpp"

namespace svl {

/// k-statistics: unbiased estimators of the first three cumulants.
struct Cumulants {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double kappa3 = 0.0;
};

/// Two-pass k-statistics, invariant under sample permutation. Requires at least 3 samples.
Cumulants cumulants(std::span<const double> samples);

/// Streaming central-moment accumulator (count, mean, M2, M3) with an exact
/// pairwise merge, so shards can be reduced in any order.
class MomentAccumulator {
public:
    void add(double x) noexcept;
    void merge(const MomentAccumulator& other) noexcept;

    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    /// k-statistics from the accumulated moments.
    Cumulants cumulants() const;

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;  // sum of squared deviations
    double m3_ = 0.0;  // sum of cubed deviations
};

struct CumulantRatios {
    double r21 = 0.0;
    double r31 = 0.0;
    double se_r21 = 0.0;
    double se_r31 = 0.0;
};

enum class Observable { N1, N2, RhoE, Mz };

std::string_view to_string(Observable o) noexcept;
Observable observable_from_string(std::string_view name);

struct EnsembleSummary {
    Observable observable = Observable::N1;
    std::uint64_t count = 0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double kappa3 = 0.0;
    double se_kappa1 = 0.0;
    double se_kappa2 = 0.0;
    double se_kappa3 = 0.0;
    std::string config_fingerprint;
    /// kappa2 fell below zero by more than rounding; reported, not clamped.
    bool negative_variance = false;
};

/// (kappa2/kappa1, kappa3/kappa1) with first-order propagated errors.
/// Throws DomainError when kappa1 == 0.
CumulantRatios cumulant_ratios(const EnsembleSummary& summary);

struct BootstrapResult {
    double point = 0.0;
    double se = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

using Statistic = std::function<double(std::span<const double>)>;

/// Nonparametric bootstrap, resampling with replacement, percentile 95% interval.
BootstrapResult bootstrap(std::span<const double> samples, const Statistic& statistic, int n_resamples, Rng& rng);

/// Bootstrap standard errors of all three cumulants from one set of resamples.
struct CumulantErrors {
    double se_kappa1 = 0.0;
    double se_kappa2 = 0.0;
    double se_kappa3 = 0.0;
};
CumulantErrors bootstrap_cumulant_errors(std::span<const double> samples, int n_resamples, Rng& rng);

/// Cumulants plus bootstrap errors for one observable column.
EnsembleSummary summarize(Observable observable, std::span<const double> samples, std::string fingerprint,
                          int n_resamples, std::uint64_t bootstrap_seed);

}  // namespace svl
