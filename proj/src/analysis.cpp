#include "svl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace svl {

std::string_view to_string(FitModel m) noexcept { return m == FitModel::PowerLaw ? "power_law" : "exponential"; }

double FitResult::predict(double x) const {
    return model == FitModel::PowerLaw ? prefactor * std::pow(x, exponent_or_rate)
                                       : prefactor * std::exp(exponent_or_rate * x);
}

namespace {

struct Line {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double se_slope = 0.0;
    double se_intercept = 0.0;
    bool degenerate = false;
};

Line ordinary_least_squares(const std::vector<double>& u, const std::vector<double>& w) {
    const double n = static_cast<double>(u.size());
    const double mu = std::accumulate(u.begin(), u.end(), 0.0) / n;
    const double mw = std::accumulate(w.begin(), w.end(), 0.0) / n;
    double suu = 0.0, suw = 0.0, sww = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        suu += (u[i] - mu) * (u[i] - mu);
        suw += (u[i] - mu) * (w[i] - mw);
        sww += (w[i] - mw) * (w[i] - mw);
    }
    if (!(suu > 0.0)) throw InsufficientData("fit: abscissa values are all equal");
    Line line;
    line.slope = suw / suu;
    line.intercept = mw - line.slope * mu;
    double sse = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double e = w[i] - (line.intercept + line.slope * u[i]);
        sse += e * e;
    }
    // Exact data leaves rounding-level residuals; snap them so R^2 = 1 exactly.
    if (sse <= 1e-28 * std::max(sww, 1.0)) sse = 0.0;
    if (sww <= 1e-30 * std::max(1.0, mw * mw)) {
        line.degenerate = true;
        line.r_squared = 0.0;
    } else {
        line.r_squared = std::clamp(1.0 - sse / sww, 0.0, 1.0);
    }
    if (u.size() > 2) {
        const double s2 = sse / (n - 2.0);
        line.se_slope = std::sqrt(s2 / suu);
        line.se_intercept = std::sqrt(s2 * (1.0 / n + mu * mu / suu));
    }
    return line;
}

FitResult fit_linearized(FitModel model, const Eigen::Ref<const Eigen::VectorXd>& x,
                         const Eigen::Ref<const Eigen::VectorXd>& y, Interval window) {
    if (x.size() != y.size()) throw InvalidParameter("fit: x and y lengths differ");
    std::vector<double> u, w;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Index i = 0; i < x.size(); ++i) {
        if (!window.contains(x[i])) continue;
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw DomainError("fit: non-finite data in window");
        if (!(y[i] > 0.0)) throw DomainError("fit: y must be > 0 inside the window");
        if (model == FitModel::PowerLaw && !(x[i] > 0.0)) throw DomainError("fit: x must be > 0 for a power law");
        u.push_back(model == FitModel::PowerLaw ? std::log(x[i]) : x[i]);
        w.push_back(std::log(y[i]));
        lo = std::min(lo, x[i]);
        hi = std::max(hi, x[i]);
    }
    if (u.size() < 3) throw InsufficientData("fit: need at least 3 points in the window (got " + std::to_string(u.size()) + ")");
    const Line line = ordinary_least_squares(u, w);
    FitResult out;
    out.model = model;
    out.exponent_or_rate = line.slope;
    out.prefactor = std::exp(line.intercept);
    out.r_squared = line.r_squared;
    out.window = {lo, hi};
    out.n_points = u.size();
    out.se_slope = line.se_slope;
    out.se_intercept = line.se_intercept;
    out.degenerate = line.degenerate;
    return out;
}

}  // namespace

FitResult fit_power_law(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                        Interval window) {
    return fit_linearized(FitModel::PowerLaw, x, y, window);
}

FitResult fit_exponential(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                          Interval window) {
    return fit_linearized(FitModel::Exponential, x, y, window);
}

CorrelationFit fit_correlation_length(const CorrelationProfile& profile, Index d_min, Index d_max) {
    if (d_min < 0 || d_max > profile.d_max() || d_max - d_min < 2) {
        throw InsufficientData("fit_correlation_length: window [" + std::to_string(d_min) + ", " +
                               std::to_string(d_max) + "] holds fewer than 3 distances");
    }
    const Eigen::VectorXd g = profile.g_values();
    const Index len = d_max - d_min + 1;
    const Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(len, static_cast<double>(d_min), static_cast<double>(d_max));
    const FitResult fit = fit_exponential(d, g.segment(d_min, len));
    if (!(fit.exponent_or_rate < 0.0)) throw DomainError("fit_correlation_length: G(d) does not decay over the window");
    CorrelationFit out;
    out.xi = -1.0 / fit.exponent_or_rate;
    out.se_xi = fit.se_slope / (fit.exponent_or_rate * fit.exponent_or_rate);
    out.r_squared = fit.r_squared;
    out.d_min = d_min;
    out.d_max = d_max;
    out.n_points = fit.n_points;
    out.amplitude = fit.prefactor;
    return out;
}

CorrelationFit fit_correlation_length(const CorrelationProfile& profile, Index range, double noise_factor) {
    if (profile.n_trajectories() < 2) throw InsufficientData("fit_correlation_length: need at least 2 trajectories");
    const Eigen::VectorXd g = profile.g_values();
    const Eigen::VectorXd se = profile.standard_errors();
    const Index d_min = 2 * range + 1;
    Index d_max = d_min - 1;
    while (d_max + 1 <= profile.d_max() && g[d_max + 1] >= noise_factor * se[d_max + 1]) ++d_max;
    return fit_correlation_length(profile, d_min, d_max);
}

double collapse_score(const std::vector<Curve>& curves, const Rescale& x_rescale, const Rescale& y_rescale,
                      CollapseOptions options) {
    if (curves.size() < 2) throw InsufficientData("collapse_score: need at least 2 curves");
    if (options.grid_points < 2) throw InvalidParameter("collapse_score: grid_points must be >= 2");

    struct Scaled {
        std::vector<double> x, y;
    };
    std::vector<Scaled> scaled(curves.size());
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const Curve& curve = curves[c];
        if (curve.x.size() != curve.y.size() || curve.x.size() < 2) {
            throw InvalidParameter("collapse_score: curve '" + curve.label + "' needs >= 2 matching (x, y) points");
        }
        std::vector<std::pair<double, double>> pts;
        for (Index i = 0; i < curve.x.size(); ++i) pts.emplace_back(x_rescale(curve.x[i], curve), y_rescale(curve.y[i], curve));
        std::sort(pts.begin(), pts.end());
        for (const auto& [px, py] : pts) {
            scaled[c].x.push_back(px);
            scaled[c].y.push_back(py);
        }
        lo = std::max(lo, scaled[c].x.front());
        hi = std::min(hi, scaled[c].x.back());
    }
    if (!(hi > lo)) throw InsufficientData("collapse_score: rescaled curves do not overlap");
    if (options.log_grid && !(lo > 0.0)) throw DomainError("collapse_score: log grid needs positive rescaled x");

    const auto interpolate = [](const Scaled& s, double x) {
        const auto it = std::lower_bound(s.x.begin(), s.x.end(), x);
        if (it == s.x.begin()) return s.y.front();
        if (it == s.x.end()) return s.y.back();
        const auto k = static_cast<std::size_t>(it - s.x.begin());
        const double x0 = s.x[k - 1], x1 = s.x[k];
        if (x1 == x0) return s.y[k];
        const double f = (x - x0) / (x1 - x0);
        return s.y[k - 1] + f * (s.y[k] - s.y[k - 1]);
    };

    const std::size_t m = options.grid_points;
    double deviation = 0.0;
    double signal = 0.0;
    std::vector<double> values(curves.size());
    for (std::size_t k = 0; k < m; ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(m - 1);
        const double x = options.log_grid ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo);
        for (std::size_t c = 0; c < curves.size(); ++c) values[c] = interpolate(scaled[c], x);
        // Sorting makes the pointwise sums independent of curve order.
        std::sort(values.begin(), values.end());
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        deviation += var / static_cast<double>(values.size());
        signal += mean * mean;
    }
    if (!(signal > 0.0)) throw DomainError("collapse_score: rescaled curves are identically zero");
    return deviation / signal;
}

KzPrediction kz_predict(double z_nu, double nu, Index r, Index n, double tau_q, double tau0, double xi0) {
    if (!(z_nu > 0.0) || !(nu > 0.0)) throw DomainError("kz_predict: z_nu and nu must be > 0");
    if (!(tau0 > 0.0) || !(xi0 > 0.0)) throw DomainError("kz_predict: tau0 and xi0 must be > 0");
    if (!(tau_q > 0.0)) throw DomainError("kz_predict: tau_q must be > 0");
    if (r < 1 || n < 3) throw DomainError("kz_predict: need r >= 1 and N >= 3");

    const double rr = static_cast<double>(r);
    const double nn = static_cast<double>(n);
    const double a = z_nu + 1.0;

    KzPrediction p;
    p.z_nu = z_nu;
    p.nu = nu;
    p.tau0 = tau0;
    p.xi0 = xi0;
    p.t_hat_exponent = z_nu / a;
    p.tau_exponent = -nu / a;
    p.range_exponent = -(z_nu * (nu + 1.0) + 1.0) / a;
    p.fast_range_exponent = -z_nu;
    p.ad_size_exponent = a / nu;
    p.ad_range_exponent = -(z_nu * (nu + 1.0) + 1.0) / nu;

    p.t_hat = std::pow(tau0, 1.0 / a) * std::pow(tau_q / rr, z_nu / a);
    p.xi_hat = xi0 * std::pow(rr, nu + 1.0) * std::pow(tau_q / (tau0 * rr), nu / a);
    // The whole ramp is frozen once t_hat reaches tau_q.
    p.tau_fast = tau0 * std::pow(rr, -z_nu);
    // Fewer than one defect once xi_hat reaches N.
    p.tau_ad = tau0 * std::pow(xi0, -a / nu) * std::pow(nn, a / nu) * std::pow(rr, p.ad_range_exponent);
    // tau_fast = tau_ad  <=>  (r / N)^(a / nu) = xi0^(-a / nu).
    p.breakdown_ratio = 1.0 / xi0;
    return p;
}

ExponentPreset exponent_preset(std::string_view name) {
    if (name == kOverdamped.name) return kOverdamped;
    if (name == kUnderdamped.name) return kUnderdamped;
    throw InvalidParameter("unknown exponent preset '" + std::string(name) + "' (expected overdamped or underdamped)");
}

std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::KibbleZurek: return "kibble_zurek";
        case Regime::Intermediate: return "intermediate";
        case Regime::Exponential: return "exponential";
    }
    return "?";
}

Regime classify_connectance(double c) noexcept {
    // 1e-12 keeps c = 0.15 computed as 60/400 on the breakdown side.
    if (c < 0.15 - 1e-12) return Regime::KibbleZurek;
    if (c < 0.5 - 1e-12) return Regime::Intermediate;
    return Regime::Exponential;
}

double calibrate_tau_fast(const std::vector<double>& tau_q, const std::vector<double>& mz_mean, bool allow_below_grid) {
    if (tau_q.size() != mz_mean.size() || tau_q.empty()) throw InvalidParameter("calibrate_tau_fast: length mismatch");
    std::vector<std::size_t> order(tau_q.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return tau_q[a] < tau_q[b]; });
    constexpr double level = 0.5;
    if (mz_mean[order.front()] >= level) {
        if (allow_below_grid) return tau_q[order.front()];
        throw InsufficientData("calibrate_tau_fast: M_z exceeds 1/2 already at the shortest quench");
    }
    for (std::size_t k = 1; k < order.size(); ++k) {
        const std::size_t i = order[k - 1], j = order[k];
        if (mz_mean[j] >= level) {
            const double f = (level - mz_mean[i]) / (mz_mean[j] - mz_mean[i]);
            return std::exp(std::log(tau_q[i]) + f * (std::log(tau_q[j]) - std::log(tau_q[i])));
        }
    }
    throw InsufficientData("calibrate_tau_fast: M_z never reaches 1/2 on the grid");
}

std::string_view to_string(PointFlag f) noexcept {
    switch (f) {
        case PointFlag::Kz: return "kz";
        case PointFlag::FastQuench: return "fast";
        case PointFlag::Adiabatic: return "adiabatic";
    }
    return "?";
}

PointFlag classify_point(double tau_q, double n1_mean, Index n_sites, const WindowRule& rule) noexcept {
    if (tau_q < rule.fast_margin * rule.tau_fast) return PointFlag::FastQuench;
    if (n1_mean < rule.adiabatic_count / static_cast<double>(n_sites)) return PointFlag::Adiabatic;
    return PointFlag::Kz;
}

}  // namespace svl
