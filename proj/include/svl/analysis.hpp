#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "svl/errors.hpp"
#include "svl/observables.hpp"

namespace svl {

enum class FitModel { PowerLaw, Exponential };

std::string_view to_string(FitModel m) noexcept;

/// Closed interval on the abscissa; the default admits everything.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

struct FitResult {
    FitModel model = FitModel::PowerLaw;
    /// Slope in the linearized coordinates: exponent (power law) or rate (exponential, negative for decay).
    double exponent_or_rate = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
    /// Range actually spanned by the points used.
    Interval window;
    std::size_t n_points = 0;
    double se_slope = 0.0;
    double se_intercept = 0.0;
    /// Zero variance in the response; r_squared is reported as 0.
    bool degenerate = false;

    double predict(double x) const;
};

/// OLS of ln y on ln x for points with x inside `window`.
FitResult fit_power_law(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                        Interval window = {});

/// OLS of ln y on x for points with x inside `window`.
FitResult fit_exponential(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                          Interval window = {});

struct CorrelationFit {
    double xi = 0.0;
    double se_xi = 0.0;
    double r_squared = 0.0;
    Index d_min = 0;
    Index d_max = 0;
    std::size_t n_points = 0;
    double amplitude = 0.0;
};

/// Fits G(d) ~ A exp(-d/xi) over d in [d_min, d_max]. Throws DomainError if G <= 0 there.
CorrelationFit fit_correlation_length(const CorrelationProfile& profile, Index d_min, Index d_max);

/// Default window: d from 2r + 1 up to the last distance before G first drops
/// below `noise_factor` standard errors.
CorrelationFit fit_correlation_length(const CorrelationProfile& profile, Index range, double noise_factor = 5.0);

struct Curve {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    std::string label;
    /// Free-form parameters (e.g. "r", "tau_q") available to the rescaling functions.
    std::map<std::string, double> params;
};

using Rescale = std::function<double(double value, const Curve& curve)>;

inline double identity_rescale(double value, const Curve&) { return value; }

struct CollapseOptions {
    std::size_t grid_points = 200;
    bool log_grid = false;
};

/// Rescales every curve, interpolates onto a common grid over the shared
/// support, and returns mean squared deviation from the pointwise mean curve
/// over mean squared mean curve. 0 means a perfect collapse.
double collapse_score(const std::vector<Curve>& curves, const Rescale& x_rescale, const Rescale& y_rescale,
                      CollapseOptions options = {});

/// Freeze-out scales for critical exponents (z nu, nu) on C_N(r).
struct KzPrediction {
    double z_nu = 0.0;
    double nu = 0.0;
    double t_hat = 0.0;
    double xi_hat = 0.0;
    double tau_fast = 0.0;
    double tau_ad = 0.0;
    /// r/N at which tau_fast = tau_ad; the window closes at finite connectance.
    double breakdown_ratio = 0.0;
    double tau0 = 1.0;
    double xi0 = 1.0;
    /// n1 ~ tau_q^tau_exponent r^range_exponent.
    double tau_exponent = 0.0;
    double range_exponent = 0.0;
    /// t_hat ~ tau_q^t_hat_exponent.
    double t_hat_exponent = 0.0;
    /// tau_ad ~ N^ad_size_exponent r^ad_range_exponent.
    double ad_size_exponent = 0.0;
    double ad_range_exponent = 0.0;
    /// tau_fast ~ r^fast_range_exponent.
    double fast_range_exponent = 0.0;
};

KzPrediction kz_predict(double z_nu, double nu, Index r, Index n, double tau_q, double tau0 = 1.0, double xi0 = 1.0);

struct ExponentPreset {
    std::string_view name;
    double z_nu;
    double nu;
};

inline constexpr ExponentPreset kOverdamped{"overdamped", 1.0, 0.5};
inline constexpr ExponentPreset kUnderdamped{"underdamped", 0.5, 0.5};

ExponentPreset exponent_preset(std::string_view name);

/// Where the freeze-out picture applies, by connectance.
enum class Regime { KibbleZurek, Intermediate, Exponential };

std::string_view to_string(Regime r) noexcept;
Regime classify_connectance(double c) noexcept;

/// Quench time at which the ensemble-mean final M_z crosses 1/2, by
/// log-linear interpolation between the bracketing grid points. Below it the
/// ramp ends before the system orders. Throws InsufficientData if M_z never
/// crosses, or crosses before the first grid point (returns that point's tau then
/// only if `allow_below_grid`).
double calibrate_tau_fast(const std::vector<double>& tau_q, const std::vector<double>& mz_mean,
                          bool allow_below_grid = true);

struct WindowRule {
    double tau_fast = 0.0;
    double fast_margin = 3.0;
    /// Points with n1 below adiabatic_count / N are adiabatic.
    double adiabatic_count = 3.0;
};

enum class PointFlag { Kz, FastQuench, Adiabatic };

std::string_view to_string(PointFlag f) noexcept;

PointFlag classify_point(double tau_q, double n1_mean, Index n_sites, const WindowRule& rule) noexcept;

}  // namespace svl
