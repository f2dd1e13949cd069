#include "svl/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace svl {

std::string_view to_string(Scheme s) noexcept {
    return s == Scheme::Weak2 ? "weak2" : "euler_maruyama";
}

Scheme scheme_from_string(std::string_view name) {
    if (name == "weak2") return Scheme::Weak2;
    if (name == "euler_maruyama" || name == "em") return Scheme::EulerMaruyama;
    throw InvalidParameter("unknown integration scheme '" + std::string(name) + "' (expected weak2 or euler_maruyama)");
}

void IntegrationConfig::validate(double tau_q) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("integration: dt must be finite and > 0");
    if (dt > tau_q) throw InvalidParameter("integration: dt must not exceed tau_q");
    if (!std::isfinite(std::ceil(tau_q / dt))) throw InvalidParameter("integration: step count is not finite");
    if (sample_times.empty()) throw InvalidParameter("integration: sample_times must contain tau_q");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        const double t = sample_times[i];
        if (!(t >= 0.0 && t <= tau_q * (1.0 + 1e-12))) throw InvalidParameter("integration: sample time outside [0, tau_q]");
        if (i > 0 && !(t > sample_times[i - 1])) throw InvalidParameter("integration: sample_times must be strictly increasing");
    }
    if (std::abs(sample_times.back() - tau_q) > 1e-12 * tau_q) {
        throw InvalidParameter("integration: last sample time must equal tau_q");
    }
}

double default_time_step(const PhysicalParams& p, double tau_q) {
    const double dt = 0.01 * std::min(1.0, 1.0 / std::max(p.damping, 1e-300));
    return std::min(dt, tau_q / 1000.0);
}

std::vector<double> uniform_sample_times(double tau_q, std::size_t count) {
    if (count == 0) throw InvalidParameter("uniform_sample_times: count must be >= 1");
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = tau_q * static_cast<double>(k + 1) / static_cast<double>(count);
    out.back() = tau_q;
    return out;
}

RotorState thermal_init(const CirculantGraph& g, const AnnealSchedule& s, const PhysicalParams& p, Rng& rng) {
    p.validate();
    const Index n = g.size();
    RotorState state(n);
    if (p.temperature == 0.0) return state;
    const double angle_sd = std::sqrt(p.temperature / s.h0());
    const double velocity_sd = std::sqrt(p.temperature / p.mass);
    for (Index i = 0; i < n; ++i) state.angles[i] = angle_sd * rng.normal();
    for (Index i = 0; i < n; ++i) state.velocities[i] = velocity_sd * rng.normal();
    return state;
}

TrajectoryRecord run_trajectory(const CirculantGraph& g, const AnnealSchedule& s, const PhysicalParams& p,
                                const IntegrationConfig& cfg, const SampleObserver& observer) {
    cfg.validate(s.tau_q());
    Rng rng(cfg.seed);
    RotorState state = thermal_init(g, s, p, rng);
    LangevinStepper<AnnealSchedule> stepper(g, s, p, cfg.scheme);
    stepper.set_seed_tag(cfg.seed);

    TrajectoryRecord record;
    record.seed = cfg.seed;
    if (cfg.record_series) record.series.reserve(cfg.sample_times.size());

    for (std::size_t k = 0; k < cfg.sample_times.size(); ++k) {
        const double target = std::min(cfg.sample_times[k], s.tau_q());
        integrate(stepper, state, target, cfg.dt, rng);
        if (cfg.record_series) {
            record.series.push_back({state.time, excess_energy_density(g, s, state), magnetization(state.angles)});
        }
        if (observer) observer(k, state);
    }

    record.n1_final = kink_density_1d(state.angles, cfg.kink_convention);
    record.n2_final = graph_defect_density(g, state.angles);
    record.rho_e_final = excess_energy_density(g, s, state);
    record.mz_final = magnetization(state.angles);
    return record;
}

}  // namespace svl
