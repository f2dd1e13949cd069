#include "svl/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "svl/integrator.hpp"
#include "svl/rng.hpp"

namespace svl {

namespace fs = std::filesystem;
using nlohmann::json;

EquilibriumSpec equilibrium_from_json(const json& j) {
    EquilibriumSpec spec;
    if (!j.is_object()) throw ConfigError("equilibrium: section must be an object");
    for (const auto& [key, value] : j.items()) {
        if (key != "epsilon_over_2r" && key != "tau_q" && key != "t_hat_factor" && key != "exponents" && key != "tau0" &&
            key != "d_max" && key != "noise_factor") {
            throw ConfigError("config: unknown field 'equilibrium." + key + "'");
        }
    }
    try {
        if (j.contains("epsilon_over_2r")) spec.epsilon_over_2r = j.at("epsilon_over_2r").get<std::vector<double>>();
        if (j.contains("tau_q")) {
            const json& t = j.at("tau_q");
            if (t.is_string() && t.get<std::string>() == "auto") spec.tau_q.reset();
            else spec.tau_q = t.get<double>();
        }
        if (j.contains("t_hat_factor")) spec.t_hat_factor = j.at("t_hat_factor").get<double>();
        if (j.contains("exponents")) spec.exponents = j.at("exponents").get<std::string>();
        if (j.contains("tau0")) spec.tau0 = j.at("tau0").get<double>();
        if (j.contains("d_max")) {
            const json& d = j.at("d_max");
            if (d.is_string() && d.get<std::string>() == "auto") spec.d_max.reset();
            else spec.d_max = d.get<Index>();
        }
        if (j.contains("noise_factor")) spec.noise_factor = j.at("noise_factor").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: equilibrium section has a field of the wrong type: ") + e.what());
    }
    if (spec.epsilon_over_2r.empty()) throw ConfigError("config: equilibrium.epsilon_over_2r must not be empty");
    if (!(spec.t_hat_factor > 0.0) || !(spec.tau0 > 0.0)) {
        throw ConfigError("config: equilibrium.t_hat_factor and tau0 must be > 0");
    }
    (void)exponent_preset(spec.exponents);
    return spec;
}

json to_json(const EquilibriumSpec& spec) {
    json j{{"epsilon_over_2r", spec.epsilon_over_2r},
           {"t_hat_factor", spec.t_hat_factor},
           {"exponents", spec.exponents},
           {"tau0", spec.tau0},
           {"noise_factor", spec.noise_factor}};
    j["tau_q"] = spec.tau_q ? json(*spec.tau_q) : json("auto");
    j["d_max"] = spec.d_max ? json(*spec.d_max) : json("auto");
    return j;
}

double auto_slow_tau_q(const EquilibriumSpec& spec, Index r) {
    const ExponentPreset e = exponent_preset(spec.exponents);
    return std::pow(spec.t_hat_factor, e.z_nu + 1.0) * spec.tau0 * std::pow(static_cast<double>(r), -e.z_nu);
}

EquilibriumResult equilibrium_scan(const ExperimentConfig& cfg_in, const EquilibriumSpec& spec, const RunOptions& options) {
    ExperimentConfig cfg = cfg_in;
    cfg.schedule.tau_q = spec.tau_q ? *spec.tau_q : auto_slow_tau_q(spec, cfg.graph.r);
    // dt follows the tau_q actually used.
    if (!cfg_in.integration.dt) cfg.integration.dt.reset();
    cfg = resolve(cfg);

    const CirculantGraph g = cfg.make_graph();
    const AnnealSchedule s = cfg.make_schedule();
    const double two_r = 2.0 * static_cast<double>(g.range());
    const double tau = s.tau_q();
    const double h0 = s.h0();
    const double eps_min = -two_r * s.j0();
    const Index d_max = spec.d_max ? *spec.d_max : g.size() / 2;
    if (d_max < 2 || d_max > g.size() / 2) throw ConfigError("config: equilibrium.d_max must lie in [2, N/2]");

    EquilibriumResult result;
    result.config = cfg;
    result.spec = spec;

    // epsilon(t) = h0 - (h0 + 2 r j0) t / tau is linear, so each target maps to one instant.
    std::vector<double> times;
    for (double e2r : spec.epsilon_over_2r) {
        EquilibriumPoint pt;
        pt.requested = e2r;
        double target = e2r * two_r;
        if (target > h0 || target < eps_min) {
            const double clamped = std::clamp(target, eps_min, h0);
            result.warnings.push_back("epsilon/2r = " + format_double(e2r) + " is not reachable; using nearest epsilon/2r = " +
                                      format_double(clamped / two_r));
            target = clamped;
        }
        pt.time = std::clamp((h0 - target) / (h0 + two_r * s.j0()) * tau, 0.0, tau);
        pt.epsilon = control_parameter(s, g, pt.time);
        times.push_back(pt.time);
        result.points.push_back(std::move(pt));
    }
    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

    const std::size_t n = cfg.ensemble.n_trajectories;
    const std::size_t m = times.size();
    std::vector<std::vector<Eigen::VectorXd>> samples(n);
    std::vector<char> failed(n, 0);
    const double dt = *cfg.integration.dt;
    const PhysicalParams p = cfg.physics;

    parallel_for(n, options.threads, [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(cfg.ensemble.base_seed, i);
        Rng rng(seed);
        RotorState state = thermal_init(g, s, p, rng);
        LangevinStepper<AnnealSchedule> stepper(g, s, p, cfg.integration.scheme);
        stepper.set_seed_tag(seed);
        samples[i].assign(m, Eigen::VectorXd());
        try {
            for (std::size_t k : order) {
                integrate(stepper, state, times[k], dt, rng);
                samples[i][k] = spatial_correlation(state.angles, d_max);
            }
        } catch (const IntegrationFailure&) {
            failed[i] = 1;
        }
    });

    for (std::size_t i = 0; i < n; ++i) result.n_failed += failed[i];
    for (std::size_t k = 0; k < m; ++k) {
        EquilibriumPoint& pt = result.points[k];
        pt.profile = CorrelationProfile(g.size(), d_max, pt.epsilon);
        for (std::size_t i = 0; i < n; ++i) {
            if (!failed[i]) pt.profile.add_sample(samples[i][k]);
        }
        try {
            pt.fit = fit_correlation_length(pt.profile, g.range(), spec.noise_factor);
        } catch (const std::exception& e) {
            pt.fit_error = e.what();
        }
    }
    return result;
}

json to_json(const EquilibriumResult& r) {
    json points = json::array();
    for (const auto& pt : r.points) {
        const Eigen::VectorXd g = pt.profile.g_values();
        const Eigen::VectorXd se = pt.profile.standard_errors();
        const Eigen::VectorXd& sum = pt.profile.sums();
        const Eigen::VectorXd& sq = pt.profile.sums_of_squares();
        json jp{{"epsilon_over_2r_requested", pt.requested},
                {"epsilon", pt.epsilon},
                {"time", pt.time},
                {"n_trajectories", pt.profile.n_trajectories()},
                {"g", std::vector<double>(g.data(), g.data() + g.size())},
                {"se", std::vector<double>(se.data(), se.data() + se.size())},
                {"sum", std::vector<double>(sum.data(), sum.data() + sum.size())},
                {"sum_sq", std::vector<double>(sq.data(), sq.data() + sq.size())}};
        if (pt.fit) {
            jp["fit"] = {{"xi", pt.fit->xi},         {"se_xi", pt.fit->se_xi},     {"r_squared", pt.fit->r_squared},
                         {"d_min", pt.fit->d_min},   {"d_max", pt.fit->d_max},     {"amplitude", pt.fit->amplitude}};
        } else {
            jp["fit"] = nullptr;
            jp["fit_error"] = pt.fit_error;
        }
        points.push_back(std::move(jp));
    }
    return json{{"format", "svl.equilibrium"},
                {"format_version", kOutputFormatVersion},
                {"n_sites", r.config.graph.n},
                {"range", r.config.graph.r},
                {"tau_q", r.config.schedule.tau_q},
                {"n_failed", r.n_failed},
                {"warnings", r.warnings},
                {"points", std::move(points)}};
}

void write_equilibrium_outputs(const EquilibriumResult& r, const fs::path& dir, const std::string& started,
                               const std::string& finished) {
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "equilibrium.json", std::ios::binary | std::ios::trunc);
        out << to_json(r).dump(1) << "\n";
    }
    json manifest{{"format", "svl.manifest"},
                  {"format_version", kOutputFormatVersion},
                  {"code_version", kCodeVersion},
                  {"rng_algorithm", kRngAlgorithm},
                  {"seed_rule", kSeedRule},
                  {"config_resolved", to_json(r.config)},
                  {"equilibrium", to_json(r.spec)},
                  {"n_trajectories", r.config.ensemble.n_trajectories},
                  {"n_failed", r.n_failed},
                  {"started", started},
                  {"finished", finished},
                  {"complete", true}};
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    out << manifest.dump(2) << "\n";
}

}  // namespace svl
