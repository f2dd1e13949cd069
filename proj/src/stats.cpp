#include "svl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace svl {

Cumulants cumulants(std::span<const double> samples) {
    const std::size_t count = samples.size();
    if (count < 3) throw InsufficientData("cumulants: need at least 3 samples (got " + std::to_string(count) + ")");
    // Summing in sorted order makes the result independent of sample order.
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(count);
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    double s2 = 0.0;
    double s3 = 0.0;
    for (double x : sorted) {
        const double d = x - mean;
        s2 += d * d;
        s3 += d * d * d;
    }
    const double m2 = s2 / n;
    const double m3 = s3 / n;
    return {mean, n / (n - 1.0) * m2, n * n / ((n - 1.0) * (n - 2.0)) * m3};
}

void MomentAccumulator::add(double x) noexcept {
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double term = delta * delta_n * n1;
    mean_ += delta_n;
    m3_ += term * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
    m2_ += term;
}

void MomentAccumulator::merge(const MomentAccumulator& other) noexcept {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    const double m2 = m2_ + other.m2_ + delta * delta * na * nb / n;
    const double m3 = m3_ + other.m3_ + delta * delta * delta * na * nb * (na - nb) / (n * n) +
                      3.0 * delta * (na * other.m2_ - nb * m2_) / n;
    mean_ += delta * nb / n;
    m2_ = m2;
    m3_ = m3;
    n_ += other.n_;
}

Cumulants MomentAccumulator::cumulants() const {
    if (n_ < 3) throw InsufficientData("cumulants: need at least 3 samples (got " + std::to_string(n_) + ")");
    const double n = static_cast<double>(n_);
    return {mean_, m2_ / (n - 1.0), n * m3_ / ((n - 1.0) * (n - 2.0))};
}

std::string_view to_string(Observable o) noexcept {
    switch (o) {
        case Observable::N1: return "n1";
        case Observable::N2: return "n2";
        case Observable::RhoE: return "rho_e";
        case Observable::Mz: return "mz";
    }
    return "?";
}

Observable observable_from_string(std::string_view name) {
    if (name == "n1") return Observable::N1;
    if (name == "n2") return Observable::N2;
    if (name == "rho_e") return Observable::RhoE;
    if (name == "mz") return Observable::Mz;
    throw InvalidParameter("unknown observable '" + std::string(name) + "'");
}

CumulantRatios cumulant_ratios(const EnsembleSummary& s) {
    if (s.kappa1 == 0.0) throw DomainError("cumulant_ratios: kappa1 is zero");
    const double k1 = s.kappa1;
    CumulantRatios out;
    out.r21 = s.kappa2 / k1;
    out.r31 = s.kappa3 / k1;
    out.se_r21 = std::hypot(s.se_kappa2 / k1, s.kappa2 * s.se_kappa1 / (k1 * k1));
    out.se_r31 = std::hypot(s.se_kappa3 / k1, s.kappa3 * s.se_kappa1 / (k1 * k1));
    return out;
}

namespace {

/// Two-pass k-statistics in storage order; resamples are already in random order.
Cumulants unsorted_cumulants(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double s2 = 0.0;
    double s3 = 0.0;
    for (double x : v) {
        const double d = x - mean;
        s2 += d * d;
        s3 += d * d * d;
    }
    return {mean, s2 / (n - 1.0), n * s3 / ((n - 1.0) * (n - 2.0))};
}

double sample_sd(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1.0));
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

BootstrapResult bootstrap(std::span<const double> samples, const Statistic& statistic, int n_resamples, Rng& rng) {
    if (samples.empty()) throw InsufficientData("bootstrap: no samples");
    if (n_resamples < 100) throw InvalidParameter("bootstrap: n_resamples must be >= 100");
    const std::size_t n = samples.size();
    std::vector<double> resample(n);
    std::vector<double> values(static_cast<std::size_t>(n_resamples));
    for (auto& value : values) {
        for (auto& x : resample) x = samples[rng.below(n)];
        value = statistic(resample);
    }
    BootstrapResult out;
    out.point = statistic(samples);
    out.se = sample_sd(values);
    std::sort(values.begin(), values.end());
    out.ci_low = quantile_sorted(values, 0.025);
    out.ci_high = quantile_sorted(values, 0.975);
    return out;
}

CumulantErrors bootstrap_cumulant_errors(std::span<const double> samples, int n_resamples, Rng& rng) {
    if (samples.size() < 3) throw InsufficientData("bootstrap: need at least 3 samples for cumulant errors");
    if (n_resamples < 100) throw InvalidParameter("bootstrap: n_resamples must be >= 100");
    const std::size_t n = samples.size();
    std::vector<double> resample(n);
    std::vector<double> k1(static_cast<std::size_t>(n_resamples));
    std::vector<double> k2(k1.size());
    std::vector<double> k3(k1.size());
    for (std::size_t b = 0; b < k1.size(); ++b) {
        for (auto& x : resample) x = samples[rng.below(n)];
        const Cumulants c = unsorted_cumulants(resample);
        k1[b] = c.kappa1;
        k2[b] = c.kappa2;
        k3[b] = c.kappa3;
    }
    return {sample_sd(k1), sample_sd(k2), sample_sd(k3)};
}

EnsembleSummary summarize(Observable observable, std::span<const double> samples, std::string fingerprint,
                          int n_resamples, std::uint64_t bootstrap_seed) {
    EnsembleSummary s;
    s.observable = observable;
    s.count = samples.size();
    s.config_fingerprint = std::move(fingerprint);
    const Cumulants c = cumulants(samples);
    s.kappa1 = c.kappa1;
    s.kappa2 = c.kappa2;
    s.kappa3 = c.kappa3;
    Rng rng(bootstrap_seed);
    const CumulantErrors e = bootstrap_cumulant_errors(samples, n_resamples, rng);
    s.se_kappa1 = e.se_kappa1;
    s.se_kappa2 = e.se_kappa2;
    s.se_kappa3 = e.se_kappa3;
    s.negative_variance = c.kappa2 < -1e-12 * std::max(1.0, c.kappa1 * c.kappa1);
    return s;
}

}  // namespace svl
