#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "svl/analysis.hpp"
#include "svl/rng.hpp"

using namespace svl;

namespace {

Eigen::VectorXd log_spaced(double lo, double hi, Index n) {
    return Eigen::VectorXd::LinSpaced(n, std::log(lo), std::log(hi)).array().exp().matrix();
}

CorrelationProfile exact_profile(Index n_sites, const Eigen::VectorXd& g) {
    // Two identical samples: mean g, zero spread.
    return CorrelationProfile::from_sums(n_sites, 0.0, 2, 2.0 * g, 2.0 * g.array().square().matrix());
}

Curve make_curve(const Eigen::VectorXd& x, double a, const std::string& label) {
    Curve c;
    c.x = x;
    c.y = x.unaryExpr([a](double v) { return std::exp(-v / a) * (1.0 + v / a); });
    c.label = label;
    c.params["a"] = a;
    return c;
}

}  // namespace

TEST_CASE("power-law fit on exact data") {
    const Eigen::VectorXd x = log_spaced(1.0, 500.0, 12);
    const Eigen::VectorXd y = 3.0 * x.array().pow(-0.25);
    const FitResult f = fit_power_law(x, y);
    CHECK(f.exponent_or_rate == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(f.prefactor == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.n_points == 12);
    CHECK_FALSE(f.degenerate);
    CHECK(f.predict(16.0) == doctest::Approx(1.5));

    const FitResult w = fit_power_law(x, y, Interval{2.0, 100.0});
    CHECK(w.window.lo >= 2.0);
    CHECK(w.window.hi <= 100.0);
    CHECK(w.n_points < 12);
    CHECK(w.exponent_or_rate == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("exponential fit on exact data") {
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(10, 0.0, 20.0);
    const Eigen::VectorXd y = 5.0 * (-0.25 * x.array()).exp();
    const FitResult f = fit_exponential(x, y);
    CHECK(f.exponent_or_rate == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(f.prefactor == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.model == FitModel::Exponential);
}

TEST_CASE("power-law fit under one percent noise") {
    Rng rng(51);
    const Eigen::VectorXd x = log_spaced(10.0, 2560.0, 9);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd y = x.array().pow(-1.0 / 3.0);
        for (Index i = 0; i < y.size(); ++i) y[i] *= 1.0 + 0.01 * rng.normal();
        const FitResult f = fit_power_law(x, y);
        CHECK(f.exponent_or_rate >= -0.36);
        CHECK(f.exponent_or_rate <= -0.31);
        CHECK(f.se_slope > 0.0);
    }
}

TEST_CASE("degenerate and invalid fit inputs") {
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(5, 1.0, 5.0);
    const FitResult f = fit_power_law(x, Eigen::VectorXd::Constant(5, 2.0));
    CHECK(f.exponent_or_rate == 0.0);
    CHECK(f.r_squared == 0.0);
    CHECK(f.degenerate);

    Eigen::VectorXd bad = Eigen::VectorXd::Ones(5);
    bad[2] = 0.0;
    CHECK_THROWS_AS(fit_power_law(x, bad), DomainError);
    CHECK_THROWS_AS(fit_exponential(x, -bad), DomainError);
    CHECK_THROWS_AS(fit_power_law(x, Eigen::VectorXd::Ones(5), Interval{1.0, 2.0}), InsufficientData);
    CHECK_THROWS_AS(fit_power_law(-x, Eigen::VectorXd::Ones(5)), DomainError);
    // Out-of-window non-positive values are ignored.
    bad[2] = 1.0;
    bad[0] = -1.0;
    CHECK(fit_power_law(x, bad, Interval{2.5, 10.0}).n_points == 3);
}

TEST_CASE("correlation length of a synthetic profile") {
    const Index n = 200;
    const Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(101, 0.0, 100.0);
    const Eigen::VectorXd g = 0.3 * (-d.array() / 7.0).exp();
    const CorrelationProfile p = exact_profile(n, g);
    const CorrelationFit explicit_window = fit_correlation_length(p, Index{1}, Index{30});
    CHECK(explicit_window.xi == doctest::Approx(7.0).epsilon(0.01));
    CHECK(explicit_window.amplitude == doctest::Approx(0.3).epsilon(0.01));
    const CorrelationFit auto_window = fit_correlation_length(p, Index{2});
    CHECK(auto_window.d_min == 5);
    CHECK(auto_window.xi == doctest::Approx(7.0).epsilon(0.01));

    CHECK_THROWS_AS(fit_correlation_length(p, Index{5}, Index{6}), InsufficientData);
    // Noise cut: G below 5 SE right after the window start leaves nothing to fit.
    Eigen::VectorXd sum = 3.0 * g, sum_sq = 3.0 * g.array().square().matrix();
    sum_sq.tail(95).array() += 10.0;
    const CorrelationProfile noisy = CorrelationProfile::from_sums(n, 0.0, 3, sum, sum_sq);
    CHECK_THROWS_AS(fit_correlation_length(noisy, Index{2}), InsufficientData);
}

TEST_CASE("collapse score examples") {
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(400, 0.0, 40.0);
    std::vector<Curve> same{make_curve(x, 2.0, "a"), make_curve(x, 2.0, "b")};
    CHECK(collapse_score(same, identity_rescale, identity_rescale) == doctest::Approx(0.0));

    std::vector<Curve> scaled;
    for (double a : {1.0, 2.0, 3.5, 5.0}) scaled.push_back(make_curve(x * a, a, "a=" + std::to_string(a)));
    auto by_a = [](double v, const Curve& c) { return v / c.params.at("a"); };
    CHECK(collapse_score(scaled, by_a, identity_rescale) < 1e-6);
    CHECK(collapse_score(scaled, identity_rescale, identity_rescale) > 0.05);

    CollapseOptions log_opts;
    log_opts.log_grid = true;
    std::vector<Curve> positive;
    const Eigen::VectorXd xp = log_spaced(0.1, 40.0, 400);
    for (double a : {1.0, 2.0, 4.0}) positive.push_back(make_curve(xp * a, a, "p"));
    CHECK(collapse_score(positive, by_a, identity_rescale, log_opts) < 1e-6);

    std::vector<Curve> apart{make_curve(Eigen::VectorXd::LinSpaced(5, 0.0, 1.0), 1.0, "l"),
                             make_curve(Eigen::VectorXd::LinSpaced(5, 2.0, 3.0), 1.0, "r")};
    CHECK_THROWS_AS(collapse_score(apart, identity_rescale, identity_rescale), InsufficientData);
    CHECK_THROWS_AS(collapse_score({same[0]}, identity_rescale, identity_rescale), InsufficientData);
}

TEST_SUITE("properties") {
TEST_CASE("collapse score ignores curve order and labels") {
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(120, 0.0, 30.0);
    std::vector<Curve> curves;
    for (double a : {1.0, 1.7, 2.9, 4.2, 6.0}) curves.push_back(make_curve(x * a, a * 1.1, "c" + std::to_string(a)));
    auto by_a = [](double v, const Curve& c) { return v / c.params.at("a"); };
    const double base = collapse_score(curves, by_a, identity_rescale);
    Rng rng(52);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(curves.begin(), curves.end(), rng);
        for (auto& c : curves) c.label = std::to_string(rng());
        CHECK(collapse_score(curves, by_a, identity_rescale) == base);
    }
}

TEST_CASE("general exponents reduce to the O(2) special cases") {
    const KzPrediction over = kz_predict(1.0, 0.5, 3, 101, 80.0);
    CHECK(over.tau_exponent == doctest::Approx(-0.25));
    CHECK(over.range_exponent == doctest::Approx(-1.25));
    CHECK(over.t_hat_exponent == doctest::Approx(0.5));
    CHECK(over.ad_size_exponent == doctest::Approx(4.0));
    CHECK(over.ad_range_exponent == doctest::Approx(-5.0));
    CHECK(over.fast_range_exponent == doctest::Approx(-1.0));
    CHECK(over.t_hat == doctest::Approx(std::sqrt(80.0 / 3.0)));

    const KzPrediction under = kz_predict(0.5, 0.5, 3, 101, 80.0);
    CHECK(under.tau_exponent == doctest::Approx(-1.0 / 3.0));
    CHECK(under.range_exponent == doctest::Approx(-7.0 / 6.0));
    CHECK(under.t_hat_exponent == doctest::Approx(1.0 / 3.0));
    CHECK(under.ad_size_exponent == doctest::Approx(3.0));
    CHECK(under.ad_range_exponent == doctest::Approx(-3.5));
    CHECK(under.t_hat == doctest::Approx(std::cbrt(80.0 / 3.0)));

    CHECK(exponent_preset("overdamped").z_nu == 1.0);
    CHECK(exponent_preset("underdamped").z_nu == 0.5);
    CHECK_THROWS_AS(exponent_preset("critical"), InvalidParameter);
    CHECK_THROWS_AS(kz_predict(0.0, 0.5, 1, 10, 1.0), DomainError);
    CHECK_THROWS_AS(kz_predict(1.0, -0.5, 1, 10, 1.0), DomainError);

    // Random exponents: the defect density exponents follow from 1/xi_hat,
    // measured here by finite differences of the returned xi_hat.
    Rng rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        const double z_nu = 0.2 + 2.0 * rng.uniform();
        const double nu = 0.2 + 1.5 * rng.uniform();
        const KzPrediction a = kz_predict(z_nu, nu, 2, 500, 100.0, 1.3, 0.7);
        const KzPrediction b = kz_predict(z_nu, nu, 2, 500, 400.0, 1.3, 0.7);
        const KzPrediction c = kz_predict(z_nu, nu, 8, 500, 100.0, 1.3, 0.7);
        CHECK(-std::log(b.xi_hat / a.xi_hat) / std::log(4.0) == doctest::Approx(a.tau_exponent).epsilon(1e-10));
        CHECK(-std::log(c.xi_hat / a.xi_hat) / std::log(4.0) == doctest::Approx(a.range_exponent).epsilon(1e-10));
        CHECK(std::log(b.t_hat / a.t_hat) / std::log(4.0) == doctest::Approx(a.t_hat_exponent).epsilon(1e-10));
        CHECK(std::log(c.tau_fast / a.tau_fast) / std::log(4.0) == doctest::Approx(a.fast_range_exponent).epsilon(1e-10));
        CHECK(a.t_hat > 0.0);
        CHECK(a.xi_hat > 0.0);
        CHECK(a.tau_ad > 0.0);
        // Frozen-window self-consistency: t_hat / tau_q shrinks with tau_q.
        CHECK(b.t_hat / 400.0 < a.t_hat / 100.0);
    }
}

TEST_CASE("breakdown ratio is independent of N and of the exponents") {
    Rng rng(54);
    for (int trial = 0; trial < 20; ++trial) {
        const double z_nu = 0.2 + 2.0 * rng.uniform();
        const double nu = 0.2 + 1.5 * rng.uniform();
        const double xi0 = 2.0;
        for (Index n : {200, 2000, 20000}) {
            const Index r_star = n / 2;
            const KzPrediction below = kz_predict(z_nu, nu, r_star - 1, n, 10.0, 1.0, xi0);
            const KzPrediction above = kz_predict(z_nu, nu, r_star + 1, n, 10.0, 1.0, xi0);
            const KzPrediction at = kz_predict(z_nu, nu, r_star, n, 10.0, 1.0, xi0);
            CHECK(below.tau_ad > below.tau_fast);
            CHECK(above.tau_ad < above.tau_fast);
            CHECK(at.tau_ad == doctest::Approx(at.tau_fast).epsilon(1e-9));
            CHECK(at.breakdown_ratio == doctest::Approx(0.5));
        }
    }
}
}

TEST_CASE("connectance regimes") {
    CHECK(classify_connectance(0.1) == Regime::KibbleZurek);
    CHECK(classify_connectance(60.0 / 400.0) == Regime::Intermediate);
    CHECK(classify_connectance(0.3) == Regime::Intermediate);
    CHECK(classify_connectance(0.5) == Regime::Exponential);
    CHECK(classify_connectance(1.0) == Regime::Exponential);
}

TEST_CASE("fast-quench calibration and point classification") {
    CHECK(calibrate_tau_fast({10, 20, 40}, {0.2, 0.4, 0.8}) == doctest::Approx(20.0 * std::pow(2.0, 0.25)));
    CHECK(calibrate_tau_fast({40, 10, 20}, {0.8, 0.2, 0.4}) == doctest::Approx(20.0 * std::pow(2.0, 0.25)));
    CHECK(calibrate_tau_fast({10, 20}, {0.6, 0.9}) == 10.0);
    CHECK_THROWS_AS(calibrate_tau_fast({10, 20}, {0.6, 0.9}, false), InsufficientData);
    CHECK_THROWS_AS(calibrate_tau_fast({10, 20}, {0.1, 0.2}), InsufficientData);

    const WindowRule rule{10.0, 3.0, 3.0};
    CHECK(classify_point(20.0, 0.1, 101, rule) == PointFlag::FastQuench);
    CHECK(classify_point(40.0, 0.1, 101, rule) == PointFlag::Kz);
    CHECK(classify_point(40.0, 0.02, 101, rule) == PointFlag::Adiabatic);
}
