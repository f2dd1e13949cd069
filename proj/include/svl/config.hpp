#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "svl/errors.hpp"
#include "svl/graph.hpp"
#include "svl/integrator.hpp"
#include "svl/model.hpp"

namespace svl {

inline constexpr int kConfigFormatVersion = 1;
inline constexpr std::string_view kCodeVersion = "svl 1.0.0";

/// Malformed or inconsistent experiment configuration.
class ConfigError : public InvalidParameter {
public:
    using InvalidParameter::InvalidParameter;
};

struct GraphSpec {
    Index n = 101;
    Index r = 1;
};

struct ScheduleSpec {
    double j0 = 1.0;
    /// Unset means h0 = 2 r j0, which puts the critical point at tau_q / 2.
    std::optional<double> h0;
    double tau_q = 40.0;
};

struct IntegrationSpec {
    /// Unset means default_time_step().
    std::optional<double> dt;
    Scheme scheme = Scheme::Weak2;
    /// Number of equally spaced sample instants ending at tau_q.
    std::size_t samples = 1;
    KinkConvention kink_convention = KinkConvention::Open;
};

struct EnsembleSpec {
    std::size_t n_trajectories = 100;
    std::uint64_t base_seed = 1;
    /// 0 lets the runner decide.
    unsigned max_parallelism = 0;
};

struct OutputSpec {
    std::string directory = "out";
    bool finals = true;
    bool series = false;
    bool correlator = false;
};

struct ExperimentConfig {
    GraphSpec graph;
    ScheduleSpec schedule;
    PhysicalParams physics;
    IntegrationSpec integration;
    EnsembleSpec ensemble;
    OutputSpec outputs;

    bool resolved() const noexcept { return schedule.h0.has_value() && integration.dt.has_value(); }

    CirculantGraph make_graph() const { return CirculantGraph(graph.n, graph.r); }
    /// Requires a resolved config.
    AnnealSchedule make_schedule() const;
    /// Per-trajectory integration settings (seed left at 0).
    IntegrationConfig make_integration() const;
};

/// Fills every auto field and validates all component invariants.
ExperimentConfig resolve(const ExperimentConfig& cfg);

/// Strict parse: unknown keys and wrong types are ConfigErrors naming the field.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);

ExperimentConfig load_config(const std::string& path);
nlohmann::json load_json(const std::string& path);

/// 16 hex digits hashing (N, r, tau_q, gamma, T, dt, scheme, base_seed).
std::string config_fingerprint(const ExperimentConfig& resolved);

/// 16 hex digits hashing the full resolved configuration.
std::string config_digest(const ExperimentConfig& resolved);

/// FNV-1a, 64-bit.
std::uint64_t fnv1a(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t v);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Worker count: explicit request, else SVL_THREADS, else the config cap, else
/// the hardware concurrency. Always >= 1.
unsigned resolve_thread_count(std::optional<unsigned> requested, const ExperimentConfig& cfg);

inline constexpr const char* kThreadsEnvVar = "SVL_THREADS";

}  // namespace svl
