#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "svl/errors.hpp"
#include "svl/graph.hpp"

namespace svl {

/// Instantaneous coupling J(t) and transverse field h(t).
struct Couplings {
    double j = 0.0;
    double h = 0.0;
};

/// Linear ramp J(t) = j0 t/tau_q, h(t) = h0 (1 - t/tau_q) on [0, tau_q].
class AnnealSchedule {
public:
    /// j0 = 1, h0 = 2r: the critical time is tau_q/2 for every range r.
    static AnnealSchedule standard(const CirculantGraph& g, double tau_q) {
        return AnnealSchedule(1.0, 2.0 * static_cast<double>(g.range()), tau_q);
    }

    /// Explicit override of both energy scales.
    static AnnealSchedule custom(double j0, double h0, double tau_q) { return AnnealSchedule(j0, h0, tau_q); }

    double j0() const noexcept { return j0_; }
    double h0() const noexcept { return h0_; }
    double tau_q() const noexcept { return tau_q_; }

    /// Time at which h(t) = 2r J(t).
    double critical_time(const CirculantGraph& g) const noexcept {
        const double two_r_j0 = 2.0 * static_cast<double>(g.range()) * j0_;
        return tau_q_ * h0_ / (h0_ + two_r_j0);
    }

    /// True when h0 = 2 r j0, the binding the closed-form minimum energy assumes.
    bool has_standard_binding(const CirculantGraph& g) const noexcept {
        const double expected = 2.0 * static_cast<double>(g.range()) * j0_;
        return std::abs(h0_ - expected) <= 1e-12 * expected;
    }

    /// Couplings without range checks; callers on the hot path have validated t.
    Couplings at(double t) const noexcept {
        const double s = t / tau_q_;
        return {j0_ * s, h0_ * (1.0 - s)};
    }

private:
    AnnealSchedule(double j0, double h0, double tau_q) : j0_(j0), h0_(h0), tau_q_(tau_q) {
        if (!(j0 > 0.0)) throw InvalidParameter("schedule: j0 must be > 0");
        if (!(h0 > 0.0)) throw InvalidParameter("schedule: h0 must be > 0");
        if (!(tau_q > 0.0) || !std::isfinite(tau_q)) throw InvalidParameter("schedule: tau_q must be finite and > 0");
    }

    double j0_;
    double h0_;
    double tau_q_;
};

/// Schedule held at fixed couplings; used for equilibrium checks and reduced test problems.
struct FrozenSchedule {
    Couplings couplings;
    Couplings at(double) const noexcept { return couplings; }
};

struct PhysicalParams {
    double mass = 1.0;
    double damping = 10.0;
    double temperature = 0.001;

    void validate() const {
        if (!(mass > 0.0)) throw InvalidParameter("physics: mass must be > 0");
        if (!(damping >= 0.0)) throw InvalidParameter("physics: damping must be >= 0");
        if (!(temperature >= 0.0)) throw InvalidParameter("physics: temperature must be >= 0");
    }

    /// sigma = sqrt(2 m gamma T), the fluctuation-dissipation noise amplitude.
    double noise_amplitude() const noexcept { return std::sqrt(2.0 * mass * damping * temperature); }
};

/// Angles (unwrapped, radians), angular velocities and the current time.
template <typename Scalar>
struct RotorStateT {
    VectorX<Scalar> angles;
    VectorX<Scalar> velocities;
    Scalar time = Scalar(0);

    RotorStateT() = default;
    explicit RotorStateT(Index n) : angles(VectorX<Scalar>::Zero(n)), velocities(VectorX<Scalar>::Zero(n)) {}
    RotorStateT(VectorX<Scalar> a, VectorX<Scalar> v, Scalar t)
        : angles(std::move(a)), velocities(std::move(v)), time(t) {}

    Index size() const noexcept { return angles.size(); }
};

using RotorState = RotorStateT<double>;

/// (J(t), h(t)); throws when t lies outside [0, tau_q].
Couplings schedule_at(const AnnealSchedule& s, double t);

/// epsilon(t) = h(t) - 2 r J(t); positive in the paramagnetic phase.
double control_parameter(const AnnealSchedule& s, const CirculantGraph& g, double t);

/// H = -(J/2) sum_ij A_ij sin(theta_i) sin(theta_j) - h sum_i cos(theta_i).
template <typename Derived>
typename Derived::Scalar hamiltonian(const CirculantGraph& g, const Couplings& c, const Eigen::MatrixBase<Derived>& angles) {
    using Scalar = typename Derived::Scalar;
    const VectorX<Scalar> s = angles.array().sin().matrix();
    return -Scalar(0.5) * Scalar(c.j) * quadratic_form(g, s, s) - Scalar(c.h) * angles.array().cos().sum();
}

double hamiltonian(const CirculantGraph& g, const AnnealSchedule& s, const RotorState& state);

/// Trig buffers shared by one force evaluation.
struct ForceWorkspace {
    Eigen::VectorXd sin;
    Eigen::VectorXd cos;
    Eigen::VectorXd field;

    explicit ForceWorkspace(Index n = 0) : sin(n), cos(n), field(n) {}
};

/// dH/dtheta_i = -J cos(theta_i) sum_j A_ij sin(theta_j) + h sin(theta_i).
/// sin and cos of the angles are computed once and the neighbour sum uses the sliding window.
void gradient(const CirculantGraph& g, const Couplings& c, const Eigen::Ref<const Eigen::VectorXd>& angles,
              Eigen::Ref<Eigen::VectorXd> out, ForceWorkspace& ws);

void gradient(const CirculantGraph& g, const AnnealSchedule& s, const RotorState& state, Eigen::Ref<Eigen::VectorXd> out);

/// Closed-form translation-invariant minimum of H at time t. Requires h0 = 2 r j0;
/// otherwise throws UnsupportedConfiguration and e_min_numeric must be used.
double e_min(const CirculantGraph& g, const AnnealSchedule& s, double t);

/// Golden-section minimisation of the single-angle energy over theta in [0, pi].
double e_min_numeric(const CirculantGraph& g, const AnnealSchedule& s, double t);

}  // namespace svl
