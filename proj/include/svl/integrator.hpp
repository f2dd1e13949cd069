#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "svl/errors.hpp"
#include "svl/graph.hpp"
#include "svl/model.hpp"
#include "svl/observables.hpp"
#include "svl/rng.hpp"

namespace svl {

enum class Scheme {
    Weak2,          ///< explicit order-2.0 weak scheme (additive-noise form)
    EulerMaruyama,  ///< reference, weak order 1
};

std::string_view to_string(Scheme s) noexcept;
Scheme scheme_from_string(std::string_view name);

struct IntegrationConfig {
    double dt = 0.01;
    Scheme scheme = Scheme::Weak2;
    /// Strictly increasing instants in [0, tau_q]; must end at tau_q.
    std::vector<double> sample_times;
    std::uint64_t seed = 0;
    bool record_series = false;
    /// Convention for the recorded n1.
    KinkConvention kink_convention = KinkConvention::Open;

    void validate(double tau_q) const;
};

/// Noise amplitude sigma = sqrt(2 m gamma T) acting on the velocity equation.
struct NoiseModel {
    double sigma = 0.0;

    static NoiseModel from(const PhysicalParams& p) { return {p.noise_amplitude()}; }
};

/// 0.01 min(1, 1/gamma), clamped to tau_q/1000.
double default_time_step(const PhysicalParams& p, double tau_q);

/// `count` equally spaced instants ending at tau_q (count >= 1).
std::vector<double> uniform_sample_times(double tau_q, std::size_t count);

/// Equilibrium of the initial quadratic well: angles ~ N(0, T/h0), velocities ~ N(0, T/m).
RotorState thermal_init(const CirculantGraph& g, const AnnealSchedule& s, const PhysicalParams& p, Rng& rng);

/// One-step map of the first-order system
///   d theta = v dt,   m dv = (-gamma v - dH/dtheta) dt + sigma dW.
/// `Drive` supplies the couplings through `Couplings at(double t) const`.
/// Gaussian increments are passed in as standard normals so that the map can
/// be probed with deterministic inputs.
template <typename Drive>
class LangevinStepper {
public:
    LangevinStepper(const CirculantGraph& g, Drive drive, const PhysicalParams& p, Scheme scheme)
        : g_(g), drive_(std::move(drive)), gamma_over_m_(p.damping / p.mass), inv_mass_(1.0 / p.mass),
          noise_over_m_(p.noise_amplitude() / p.mass), scheme_(scheme), ws_(g.size()), grad_(g.size()),
          acc0_(g.size()), kick_(g.size()), theta_bar_(g.size()), v_bar_(g.size()) {
        p.validate();
    }

    const CirculantGraph& graph() const noexcept { return g_; }
    const Drive& drive() const noexcept { return drive_; }
    std::size_t steps_taken() const noexcept { return steps_; }
    void set_seed_tag(std::uint64_t seed) noexcept { seed_tag_ = seed; }

    /// Advances `state` by dt. Throws IntegrationFailure on a non-finite result.
    void step(RotorState& state, double dt, const Eigen::Ref<const Eigen::VectorXd>& normals) {
        const double t = state.time;
        auto& theta = state.angles;
        auto& v = state.velocities;

        kick_ = (noise_over_m_ * std::sqrt(dt)) * normals;
        gradient(g_, drive_.at(t), theta, grad_, ws_);
        acc0_ = -gamma_over_m_ * v - inv_mass_ * grad_;

        if (scheme_ == Scheme::EulerMaruyama) {
            theta += dt * v;
            v += dt * acc0_ + kick_;
        } else {
            // Supporting value: one Euler step including the noise increment.
            theta_bar_ = theta + dt * v;
            v_bar_ = v + dt * acc0_ + kick_;
            // Drift at the supporting value uses the couplings at t + dt.
            gradient(g_, drive_.at(t + dt), theta_bar_, grad_, ws_);
            theta += (0.5 * dt) * (v + v_bar_);
            v += (0.5 * dt) * (acc0_ - gamma_over_m_ * v_bar_ - inv_mass_ * grad_) + kick_;
        }
        state.time = t + dt;
        ++steps_;

        if (!theta.allFinite() || !v.allFinite()) {
            Index site = 0;
            while (site < theta.size() && std::isfinite(theta[site]) && std::isfinite(v[site])) ++site;
            throw IntegrationFailure(seed_tag_, steps_, static_cast<std::size_t>(site), state.time);
        }
    }

    /// Draws the increments from `rng` and steps.
    void step(RotorState& state, double dt, Rng& rng) {
        if (normals_.size() != g_.size()) normals_.resize(g_.size());
        if (noise_over_m_ > 0.0) {
            for (Index i = 0; i < normals_.size(); ++i) normals_[i] = rng.normal();
        } else {
            normals_.setZero();
        }
        step(state, dt, normals_);
    }

private:
    CirculantGraph g_;
    Drive drive_;
    double gamma_over_m_;
    double inv_mass_;
    double noise_over_m_;
    Scheme scheme_;
    std::size_t steps_ = 0;
    std::uint64_t seed_tag_ = 0;
    ForceWorkspace ws_;
    Eigen::VectorXd grad_, acc0_, kick_, theta_bar_, v_bar_, normals_;
};

/// Called at every sample instant with the sample index and the state.
using SampleObserver = std::function<void(std::size_t, const RotorState&)>;

/// Thermal start, then integration to tau_q landing exactly on every sample
/// instant (the step before a sample is shortened). Deterministic in (configs, seed).
/// Throws IntegrationFailure carrying the seed and step on a non-finite state.
TrajectoryRecord run_trajectory(const CirculantGraph& g, const AnnealSchedule& s, const PhysicalParams& p,
                                const IntegrationConfig& cfg, const SampleObserver& observer = {});

/// Same stepping loop for an arbitrary drive and initial state; used by
/// equilibrium checks with a frozen schedule.
template <typename Drive>
void integrate(LangevinStepper<Drive>& stepper, RotorState& state, double t_end, double dt, Rng& rng) {
    const double t0 = state.time;
    const double span = t_end - t0;
    if (span <= 0.0) return;
    const auto full = static_cast<std::size_t>(std::floor(span / dt * (1.0 + 1e-12)));
    for (std::size_t k = 0; k < full; ++k) {
        stepper.step(state, dt, rng);
        state.time = t0 + static_cast<double>(k + 1) * dt;
    }
    const double rest = t_end - state.time;
    if (rest > 1e-12 * std::max(1.0, std::abs(t_end))) stepper.step(state, rest, rng);
    state.time = t_end;
}

}  // namespace svl
