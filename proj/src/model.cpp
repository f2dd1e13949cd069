#include "svl/model.hpp"

#include <algorithm>
#include <numbers>

namespace svl {

namespace {

void check_time(const AnnealSchedule& s, double t) {
    const double slack = 1e-12 * s.tau_q();
    if (!(t >= -slack && t <= s.tau_q() + slack)) {
        throw InvalidParameter("schedule: t = " + std::to_string(t) + " outside [0, tau_q = " +
                               std::to_string(s.tau_q()) + "]");
    }
}

}  // namespace

Couplings schedule_at(const AnnealSchedule& s, double t) {
    check_time(s, t);
    return s.at(std::clamp(t, 0.0, s.tau_q()));
}

double control_parameter(const AnnealSchedule& s, const CirculantGraph& g, double t) {
    const Couplings c = schedule_at(s, t);
    return c.h - 2.0 * static_cast<double>(g.range()) * c.j;
}

double hamiltonian(const CirculantGraph& g, const AnnealSchedule& s, const RotorState& state) {
    return hamiltonian(g, schedule_at(s, state.time), state.angles);
}

void gradient(const CirculantGraph& g, const Couplings& c, const Eigen::Ref<const Eigen::VectorXd>& angles,
              Eigen::Ref<Eigen::VectorXd> out, ForceWorkspace& ws) {
    const Index n = g.size();
    if (angles.size() != n || out.size() != n) {
        throw InvalidParameter("gradient: vectors must have length N = " + std::to_string(n));
    }
    if (ws.sin.size() != n) ws = ForceWorkspace(n);
    for (Index i = 0; i < n; ++i) {
        const double a = angles[i];
        ws.sin[i] = std::sin(a);
        ws.cos[i] = std::cos(a);
    }
    neighbor_sums(g, ws.sin, ws.field);
    out.array() = c.h * ws.sin.array() - c.j * ws.cos.array() * ws.field.array();
}

void gradient(const CirculantGraph& g, const AnnealSchedule& s, const RotorState& state, Eigen::Ref<Eigen::VectorXd> out) {
    ForceWorkspace ws(g.size());
    gradient(g, schedule_at(s, state.time), state.angles, out, ws);
}

double e_min(const CirculantGraph& g, const AnnealSchedule& s, double t) {
    if (!s.has_standard_binding(g)) {
        throw UnsupportedConfiguration("e_min: closed form requires h0 = 2 r j0; use e_min_numeric");
    }
    check_time(s, t);
    const double tau = s.tau_q();
    const double x = std::clamp(t, 0.0, tau) / tau;
    const double rn = static_cast<double>(g.range()) * static_cast<double>(g.size());
    if (x <= 0.5) return -2.0 * rn * s.j0() * (1.0 - x);
    // Ordered branch: cos(theta*) = (1 - x)/x.
    const double q = (1.0 - x) / x;
    return -rn * s.j0() * (x * (1.0 - q * q) + 2.0 / x * (1.0 - x) * (1.0 - x));
}

double e_min_numeric(const CirculantGraph& g, const AnnealSchedule& s, double t) {
    const Couplings c = schedule_at(s, t);
    const double n = static_cast<double>(g.size());
    const double rn = static_cast<double>(g.range()) * n;
    auto energy = [&](double theta) {
        const double st = std::sin(theta);
        return -c.j * rn * st * st - c.h * n * std::cos(theta);
    };

    constexpr double inv_phi = 0.6180339887498948482;
    double lo = 0.0;
    double hi = std::numbers::pi;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = energy(x1);
    double f2 = energy(x2);
    while (hi - lo > 1e-10) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = energy(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = energy(x2);
        }
    }
    // The minimum may sit on the boundary theta = 0 (paramagnetic branch).
    return std::min({energy(0.5 * (lo + hi)), energy(0.0), energy(std::numbers::pi)});
}

}  // namespace svl
