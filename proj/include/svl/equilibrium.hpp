#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "svl/analysis.hpp"
#include "svl/config.hpp"
#include "svl/ensemble.hpp"

namespace svl {

/// Correlator measurements during a slow anneal, taken where
/// epsilon(t) / 2r hits each requested value on the way to the critical point.
struct EquilibriumSpec {
    std::vector<double> epsilon_over_2r{0.1, 0.05, 0.025};
    /// Unset: auto-slow, tau_q = t_hat_factor * t_hat(tau_q) for the exponent preset.
    std::optional<double> tau_q;
    double t_hat_factor = 40.0;
    std::string exponents = "overdamped";
    double tau0 = 1.0;
    /// Unset: N/2.
    std::optional<Index> d_max;
    double noise_factor = 5.0;
};

EquilibriumSpec equilibrium_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EquilibriumSpec& spec);

/// tau_q solving tau_q = factor * t_hat(tau_q):  factor^(z nu + 1) tau0 r^(-z nu).
double auto_slow_tau_q(const EquilibriumSpec& spec, Index r);

struct EquilibriumPoint {
    double requested = 0.0;  ///< epsilon / 2r as requested
    double epsilon = 0.0;    ///< epsilon actually measured
    double time = 0.0;
    CorrelationProfile profile;
    std::optional<CorrelationFit> fit;
    std::string fit_error;
};

struct EquilibriumResult {
    ExperimentConfig config;  ///< resolved, with the tau_q actually used
    EquilibriumSpec spec;
    std::vector<EquilibriumPoint> points;  ///< in the requested order
    std::vector<std::string> warnings;
    std::size_t n_failed = 0;
};

/// Runs the ensemble, stopping each trajectory after the last measurement instant.
EquilibriumResult equilibrium_scan(const ExperimentConfig& cfg, const EquilibriumSpec& spec, const RunOptions& options);

nlohmann::json to_json(const EquilibriumResult& r);

/// Writes equilibrium.json (profiles + fits) and manifest.json into `dir`.
void write_equilibrium_outputs(const EquilibriumResult& r, const std::filesystem::path& dir, const std::string& started,
                               const std::string& finished);

}  // namespace svl
