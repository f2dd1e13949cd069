#include "svl/recipes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "svl/config.hpp"
#include "svl/ensemble.hpp"

namespace svl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kSummaryColumns = {
    "format_version", "N",         "r",         "c",         "tau_q",     "gamma",     "observable", "count",
    "kappa1",         "kappa2",    "kappa3",    "se_kappa1", "se_kappa2", "se_kappa3", "n_fail",     "fingerprint"};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, std::string_view column, std::string_view origin, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError(std::string(origin) + ":" + std::to_string(line) + ": column '" + std::string(column) +
                          "' is not a number ('" + s + "')");
    }
}

using GroupKey = std::tuple<Index, Index, double>;  // (N, r, gamma)

std::map<GroupKey, std::vector<SummaryRow>> group_rows(const std::vector<SummaryRow>& rows, Observable o) {
    std::map<GroupKey, std::vector<SummaryRow>> groups;
    for (const auto& row : rows) {
        if (row.observable == o) groups[{row.n, row.r, row.gamma}].push_back(row);
    }
    for (auto& [key, v] : groups) {
        std::sort(v.begin(), v.end(), [](const SummaryRow& a, const SummaryRow& b) { return a.tau_q < b.tau_q; });
    }
    return groups;
}

std::string group_label(const GroupKey& k) {
    return "N=" + std::to_string(std::get<0>(k)) + " r=" + std::to_string(std::get<1>(k)) +
           " gamma=" + format_double(std::get<2>(k));
}

json group_json(const GroupKey& k) {
    return json{{"N", std::get<0>(k)}, {"r", std::get<1>(k)}, {"gamma", std::get<2>(k)}};
}

json fit_json(const FitResult& f) {
    return json{{"model", std::string(to_string(f.model))},
                {"exponent_or_rate", f.exponent_or_rate},
                {"se", f.se_slope},
                {"prefactor", f.prefactor},
                {"r_squared", f.r_squared},
                {"window", {f.window.lo, f.window.hi}},
                {"n_points", f.n_points},
                {"degenerate", f.degenerate}};
}

json report_header(Recipe recipe, const AnalyzeOptions& opt) {
    return json{{"format", "svl.report"},
                {"format_version", kReportFormatVersion},
                {"recipe", std::string(to_string(recipe))},
                {"observable", std::string(to_string(opt.observable))}};
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream o;
    o.precision(precision);
    o << v;
    return o.str();
}

/// Ensemble-mean M_z per tau_q for the group, when present in the input.
std::optional<double> calibrated_tau_fast(const std::vector<SummaryRow>& rows, const GroupKey& key) {
    std::vector<double> tau, mz;
    for (const auto& row : rows) {
        if (row.observable == Observable::Mz && GroupKey{row.n, row.r, row.gamma} == key) {
            tau.push_back(row.tau_q);
            mz.push_back(row.kappa1);
        }
    }
    if (tau.empty()) return std::nullopt;
    try {
        return calibrate_tau_fast(tau, mz);
    } catch (const InsufficientData&) {
        return std::nullopt;
    }
}

// A report in which no group could be fitted says nothing; treat it as bad input.
void require_some_fit(const json& groups) {
    for (const auto& g : groups) {
        if (!g.at("fit").is_null()) return;
    }
    throw InsufficientData("no group has enough usable points for a fit");
}

}  // namespace

std::vector<SummaryRow> parse_summary_csv(std::string_view text, std::string_view origin) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw FormatError(std::string(origin) + ": empty summary file");
    const auto header = split_csv(line);
    if (header.empty() || header[0] != "format_version") {
        throw FormatError(std::string(origin) + ": missing 'format_version' column");
    }
    for (std::size_t k = 0; k < kSummaryColumns.size(); ++k) {
        if (k >= header.size() || header[k] != kSummaryColumns[k]) {
            throw FormatError(std::string(origin) + ": expected column '" + kSummaryColumns[k] + "' at position " +
                              std::to_string(k + 1));
        }
    }
    std::vector<SummaryRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != kSummaryColumns.size()) {
            throw FormatError(std::string(origin) + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(kSummaryColumns.size()) + " fields");
        }
        const double version = parse_number(f[0], "format_version", origin, lineno);
        if (version != kOutputFormatVersion) {
            throw FormatError(std::string(origin) + ":" + std::to_string(lineno) + ": unsupported format_version " + f[0]);
        }
        SummaryRow r;
        r.n = static_cast<Index>(parse_number(f[1], "N", origin, lineno));
        r.r = static_cast<Index>(parse_number(f[2], "r", origin, lineno));
        r.c = parse_number(f[3], "c", origin, lineno);
        r.tau_q = parse_number(f[4], "tau_q", origin, lineno);
        r.gamma = parse_number(f[5], "gamma", origin, lineno);
        try {
            r.observable = observable_from_string(f[6]);
        } catch (const InvalidParameter&) {
            throw FormatError(std::string(origin) + ":" + std::to_string(lineno) + ": column 'observable' has unknown value '" +
                              f[6] + "'");
        }
        r.count = static_cast<std::uint64_t>(parse_number(f[7], "count", origin, lineno));
        r.kappa1 = parse_number(f[8], "kappa1", origin, lineno);
        r.kappa2 = parse_number(f[9], "kappa2", origin, lineno);
        r.kappa3 = parse_number(f[10], "kappa3", origin, lineno);
        r.se_kappa1 = parse_number(f[11], "se_kappa1", origin, lineno);
        r.se_kappa2 = parse_number(f[12], "se_kappa2", origin, lineno);
        r.se_kappa3 = parse_number(f[13], "se_kappa3", origin, lineno);
        r.n_fail = static_cast<std::size_t>(parse_number(f[14], "n_fail", origin, lineno));
        r.fingerprint = f[15];
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<SummaryRow> read_summary_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open summary file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_summary_csv(buf.str(), path.string());
}

std::string_view to_string(Recipe r) noexcept {
    switch (r) {
        case Recipe::KzFit: return "kz_fit";
        case Recipe::ExpFit: return "exp_fit";
        case Recipe::Collapse: return "collapse";
        case Recipe::CumulantRatios: return "cumulant_ratios";
        case Recipe::Predict: return "predict";
    }
    return "?";
}

Recipe recipe_from_string(std::string_view name) {
    for (Recipe r : {Recipe::KzFit, Recipe::ExpFit, Recipe::Collapse, Recipe::CumulantRatios, Recipe::Predict}) {
        if (name == to_string(r)) return r;
    }
    throw InvalidParameter("unknown recipe '" + std::string(name) +
                           "' (expected kz_fit, exp_fit, collapse, cumulant_ratios or predict)");
}

double count_scale(Observable o, Index n, Index r) {
    const double nn = static_cast<double>(n);
    switch (o) {
        case Observable::N1:
        case Observable::Mz: return nn;
        case Observable::N2:
        case Observable::RhoE: return nn * static_cast<double>(r);
    }
    return 1.0;
}

Report analyze_kz_fit(const std::vector<SummaryRow>& rows, const AnalyzeOptions& opt) {
    Report rep;
    rep.result = report_header(Recipe::KzFit, opt);
    rep.result["window_rule"] = {{"fast_margin", opt.fast_margin}, {"adiabatic_count", opt.adiabatic_count}};
    json groups = json::array();
    std::ostringstream txt;
    txt << "KZ power-law fits of " << to_string(opt.observable) << " vs tau_q\n";
    for (const auto& [key, g] : group_rows(rows, opt.observable)) {
        json jg = group_json(key);
        txt << "\n[" << group_label(key) << "]\n";
        const std::optional<double> tau_fast = opt.tau_fast ? opt.tau_fast : calibrated_tau_fast(rows, key);
        jg["tau_fast"] = tau_fast ? json(*tau_fast) : json(nullptr);
        WindowRule rule{tau_fast.value_or(0.0), opt.fast_margin, opt.adiabatic_count};
        std::vector<double> x, y;
        json points = json::array();
        for (const auto& row : g) {
            const PointFlag flag = classify_point(row.tau_q, row.kappa1, row.n, rule);
            points.push_back({{"tau_q", row.tau_q}, {"mean", row.kappa1}, {"se", row.se_kappa1},
                              {"flag", std::string(to_string(flag))}});
            txt << "  tau_q=" << fmt(row.tau_q) << "  mean=" << fmt(row.kappa1) << " +- " << fmt(row.se_kappa1, 2)
                << "  [" << to_string(flag) << "]\n";
            if (flag == PointFlag::Kz) {
                x.push_back(row.tau_q);
                y.push_back(row.kappa1);
            }
        }
        jg["points"] = std::move(points);
        try {
            const FitResult f = fit_power_law(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Index>(x.size())),
                                              Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Index>(y.size())));
            jg["fit"] = fit_json(f);
            txt << "  exponent " << fmt(f.exponent_or_rate) << " +- " << fmt(f.se_slope, 2) << ", prefactor "
                << fmt(f.prefactor) << ", R^2 " << fmt(f.r_squared) << " (" << f.n_points << " points)\n";
        } catch (const std::exception& e) {
            jg["fit"] = nullptr;
            jg["fit_error"] = e.what();
            txt << "  no fit: " << e.what() << "\n";
        }
        groups.push_back(std::move(jg));
    }
    require_some_fit(groups);
    rep.result["groups"] = std::move(groups);
    rep.text = txt.str();
    return rep;
}

Report analyze_exp_fit(const std::vector<SummaryRow>& rows, const AnalyzeOptions& opt) {
    const double power = opt.axis_power ? *opt.axis_power : (exponent_preset(opt.exponents).z_nu == 1.0 ? 0.5 : 1.0 / 3.0);
    Report rep;
    rep.result = report_header(Recipe::ExpFit, opt);
    rep.result["axis"] = "r^" + format_double(power) + " tau_q";
    rep.result["axis_power"] = power;
    json groups = json::array();
    std::ostringstream txt;
    txt << "Exponential fits of ln " << to_string(opt.observable) << " vs r^" << fmt(power) << " tau_q\n";
    for (const auto& [key, g] : group_rows(rows, opt.observable)) {
        json jg = group_json(key);
        txt << "\n[" << group_label(key) << "]\n";
        const double scale = std::pow(static_cast<double>(std::get<1>(key)), power);
        std::vector<double> x, y;
        for (const auto& row : g) {
            if (!(row.kappa1 > 0.0)) continue;  // defect-free points carry no rate information
            x.push_back(scale * row.tau_q);
            y.push_back(row.kappa1);
        }
        try {
            const FitResult f = fit_exponential(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Index>(x.size())),
                                                Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Index>(y.size())));
            jg["fit"] = fit_json(f);
            txt << "  rate " << fmt(f.exponent_or_rate) << " +- " << fmt(f.se_slope, 2) << ", R^2 " << fmt(f.r_squared)
                << " (" << f.n_points << " points)\n";
        } catch (const std::exception& e) {
            jg["fit"] = nullptr;
            jg["fit_error"] = e.what();
            txt << "  no fit: " << e.what() << "\n";
        }
        groups.push_back(std::move(jg));
    }
    require_some_fit(groups);
    rep.result["groups"] = std::move(groups);
    rep.text = txt.str();
    return rep;
}

Report analyze_collapse(const std::vector<SummaryRow>& rows, const AnalyzeOptions& opt) {
    const KzPrediction ref = [&] {
        const ExponentPreset e = exponent_preset(opt.exponents);
        return kz_predict(e.z_nu, e.nu, 1, 101, 1.0);
    }();
    const double x_power = opt.x_power.value_or(0.0);
    const double y_power = opt.y_power.value_or(-ref.range_exponent);
    std::vector<Curve> curves;
    for (const auto& [key, g] : group_rows(rows, opt.observable)) {
        const std::optional<double> tau_fast = opt.tau_fast ? opt.tau_fast : calibrated_tau_fast(rows, key);
        const WindowRule rule{tau_fast.value_or(0.0), opt.fast_margin, opt.adiabatic_count};
        std::vector<double> x, y;
        for (const auto& row : g) {
            if (opt.kz_only && classify_point(row.tau_q, row.kappa1, row.n, rule) != PointFlag::Kz) continue;
            x.push_back(row.tau_q);
            y.push_back(row.kappa1);
        }
        if (x.size() < 2) continue;
        Curve c;
        c.x = Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Index>(x.size()));
        c.y = Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Index>(y.size()));
        c.label = group_label(key);
        c.params["r"] = static_cast<double>(std::get<1>(key));
        curves.push_back(std::move(c));
    }
    Report rep;
    rep.result = report_header(Recipe::Collapse, opt);
    rep.result["x"] = "tau_q r^" + format_double(x_power);
    rep.result["y"] = "kappa1 r^" + format_double(y_power);
    json labels = json::array();
    for (const auto& c : curves) labels.push_back(c.label);
    rep.result["curves"] = labels;
    const auto xr = [x_power](double v, const Curve& c) { return v * std::pow(c.params.at("r"), x_power); };
    const auto yr = [y_power](double v, const Curve& c) { return v * std::pow(c.params.at("r"), y_power); };
    const double score = collapse_score(curves, xr, yr, {200, true});
    rep.result["score"] = score;
    rep.text = "Collapse of " + std::string(to_string(opt.observable)) + ": y = kappa1 r^" + fmt(y_power) +
               " vs tau_q r^" + fmt(x_power) + " over " + std::to_string(curves.size()) + " curves\n  score " + fmt(score) + "\n";
    return rep;
}

Report analyze_cumulant_ratios(const std::vector<SummaryRow>& rows, const AnalyzeOptions& opt) {
    if (opt.ratio_scale != "count" && opt.ratio_scale != "density") {
        throw InvalidParameter("ratio scale must be 'count' or 'density'");
    }
    Report rep;
    rep.result = report_header(Recipe::CumulantRatios, opt);
    rep.result["scale"] = opt.ratio_scale;
    json groups = json::array();
    std::ostringstream txt;
    txt << "Cumulant ratios of " << to_string(opt.observable) << " (" << opt.ratio_scale << " scale)\n";
    for (const auto& [key, g] : group_rows(rows, opt.observable)) {
        json jg = group_json(key);
        txt << "\n[" << group_label(key) << "]\n";
        json points = json::array();
        std::vector<double> lt, r21, w;
        for (const auto& row : g) {
            const double k = opt.ratio_scale == "count" ? count_scale(row.observable, row.n, row.r) : 1.0;
            EnsembleSummary s;
            s.kappa1 = k * row.kappa1;
            s.kappa2 = k * k * row.kappa2;
            s.kappa3 = k * k * k * row.kappa3;
            s.se_kappa1 = k * row.se_kappa1;
            s.se_kappa2 = k * k * row.se_kappa2;
            s.se_kappa3 = k * k * k * row.se_kappa3;
            try {
                const CumulantRatios cr = cumulant_ratios(s);
                points.push_back({{"tau_q", row.tau_q}, {"r21", cr.r21}, {"se_r21", cr.se_r21}, {"r31", cr.r31},
                                  {"se_r31", cr.se_r31}});
                txt << "  tau_q=" << fmt(row.tau_q) << "  k2/k1=" << fmt(cr.r21) << " +- " << fmt(cr.se_r21, 2)
                    << "  k3/k1=" << fmt(cr.r31) << " +- " << fmt(cr.se_r31, 2) << "\n";
                lt.push_back(std::log(row.tau_q));
                r21.push_back(cr.r21);
                w.push_back(cr.se_r21 > 0.0 ? 1.0 / (cr.se_r21 * cr.se_r21) : 0.0);
            } catch (const DomainError& e) {
                points.push_back({{"tau_q", row.tau_q}, {"error", e.what()}});
            }
        }
        jg["points"] = std::move(points);
        // Weighted mean and weighted slope of k2/k1 against ln tau_q.
        double sw = 0.0, sx = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < lt.size(); ++i) {
            sw += w[i];
            sx += w[i] * lt[i];
            sy += w[i] * r21[i];
        }
        if (sw > 0.0) {
            const double mx = sx / sw, my = sy / sw;
            jg["mean_r21"] = my;
            jg["se_mean_r21"] = 1.0 / std::sqrt(sw);
            txt << "  weighted mean k2/k1 = " << fmt(my) << " +- " << fmt(1.0 / std::sqrt(sw), 2) << "\n";
            double sxx = 0.0, sxy = 0.0;
            for (std::size_t i = 0; i < lt.size(); ++i) {
                sxx += w[i] * (lt[i] - mx) * (lt[i] - mx);
                sxy += w[i] * (lt[i] - mx) * (r21[i] - my);
            }
            if (lt.size() >= 2 && sxx > 0.0) {
                jg["trend_slope"] = sxy / sxx;
                jg["trend_se"] = 1.0 / std::sqrt(sxx);
                txt << "  trend d(k2/k1)/d ln tau_q = " << fmt(sxy / sxx) << " +- " << fmt(1.0 / std::sqrt(sxx), 2) << "\n";
            }
        }
        groups.push_back(std::move(jg));
    }
    rep.result["groups"] = std::move(groups);
    rep.text = txt.str();
    return rep;
}

Report analyze_predict(const AnalyzeOptions& opt) {
    const KzPrediction p = kz_predict(opt.z_nu, opt.nu, opt.r, opt.n, opt.tau_q, opt.tau0, opt.xi0);
    const double c = 2.0 * static_cast<double>(opt.r) / static_cast<double>(opt.n - 1);
    const Regime regime = classify_connectance(c);
    Report rep;
    rep.result = {{"format", "svl.report"}, {"format_version", kReportFormatVersion}, {"recipe", "predict"}};
    rep.result["inputs"] = {{"z_nu", opt.z_nu}, {"nu", opt.nu}, {"N", opt.n}, {"r", opt.r},
                            {"tau_q", opt.tau_q}, {"tau0", opt.tau0}, {"xi0", opt.xi0}};
    rep.result["prediction"] = {{"t_hat", p.t_hat},
                                {"xi_hat", p.xi_hat},
                                {"tau_fast", p.tau_fast},
                                {"tau_ad", p.tau_ad},
                                {"breakdown_ratio", p.breakdown_ratio},
                                {"kz_window_open", p.tau_fast < p.tau_ad},
                                {"n1_tau_exponent", p.tau_exponent},
                                {"n1_range_exponent", p.range_exponent},
                                {"t_hat_exponent", p.t_hat_exponent},
                                {"tau_ad_size_exponent", p.ad_size_exponent},
                                {"tau_ad_range_exponent", p.ad_range_exponent},
                                {"tau_fast_range_exponent", p.fast_range_exponent}};
    rep.result["connectance"] = c;
    rep.result["regime"] = std::string(to_string(regime));
    std::ostringstream txt;
    txt << "Freeze-out prediction for z*nu = " << fmt(opt.z_nu) << ", nu = " << fmt(opt.nu) << " on C_" << opt.n << "("
        << opt.r << "), tau_q = " << fmt(opt.tau_q) << "\n"
        << "  connectance c      " << fmt(c) << "  (" << to_string(regime) << ")\n"
        << "  t_hat              " << fmt(p.t_hat) << "   ~ tau_q^" << fmt(p.t_hat_exponent) << "\n"
        << "  xi_hat             " << fmt(p.xi_hat) << "\n"
        << "  n1                 ~ tau_q^" << fmt(p.tau_exponent) << " r^" << fmt(p.range_exponent) << "\n"
        << "  tau_fast           " << fmt(p.tau_fast) << "   ~ r^" << fmt(p.fast_range_exponent) << "\n"
        << "  tau_ad             " << fmt(p.tau_ad) << "   ~ N^" << fmt(p.ad_size_exponent) << " r^"
        << fmt(p.ad_range_exponent) << "\n"
        << "  KZ window          " << (p.tau_fast < p.tau_ad ? "open" : "closed") << "\n"
        << "  breakdown at r/N = " << fmt(p.breakdown_ratio) << " (scale, prefactor not predicted)\n";
    rep.text = txt.str();
    return rep;
}

Report analyze_series_collapse(const std::vector<fs::path>& run_dirs, const AnalyzeOptions& opt) {
    if (opt.time_axis != "t_hat" && opt.time_axis != "tau_q") throw InvalidParameter("time axis must be 't_hat' or 'tau_q'");
    const ExponentPreset e = exponent_preset(opt.exponents);
    std::vector<Curve> curves;
    for (const auto& dir : run_dirs) {
        const json m = load_json((dir / "manifest.json").string());
        if (m.value("format_version", 0) != kOutputFormatVersion) {
            throw FormatError((dir / "manifest.json").string() + ": unsupported format_version");
        }
        const ExperimentConfig cfg = resolve(config_from_json(m.at("config_resolved")));
        std::ifstream in(dir / "series.csv");
        if (!in) throw FormatError("missing '" + (dir / "series.csv").string() + "'");
        std::string line;
        std::getline(in, line);
        if (line != "format_version,time,rho_e_mean,rho_e_se,mz_mean,mz_se") {
            throw FormatError((dir / "series.csv").string() + ": unexpected header");
        }
        std::vector<double> t, y;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv(line);
            if (f.size() != 6 || f[0] != std::to_string(kOutputFormatVersion)) {
                throw FormatError((dir / "series.csv").string() + ": malformed row");
            }
            t.push_back(std::stod(f[1]));
            y.push_back(std::stod(f[2]));
        }
        Curve c;
        c.x = Eigen::Map<Eigen::VectorXd>(t.data(), static_cast<Index>(t.size()));
        c.y = Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Index>(y.size()));
        c.label = dir.filename().string();
        const double tau = cfg.schedule.tau_q;
        const KzPrediction p = kz_predict(e.z_nu, e.nu, cfg.graph.r, cfg.graph.n, tau, opt.tau0, opt.xi0);
        c.params["t_c"] = cfg.make_schedule().critical_time(cfg.make_graph());
        c.params["scale"] = opt.time_axis == "t_hat" ? p.t_hat : tau;
        c.params["y_factor"] = std::pow(tau / p.t_hat, opt.y_power.value_or(0.0));
        curves.push_back(std::move(c));
    }
    const auto xr = [](double t, const Curve& c) { return (t - c.params.at("t_c")) / c.params.at("scale"); };
    const auto yr = [](double v, const Curve& c) { return v * c.params.at("y_factor"); };
    const double score = collapse_score(curves, xr, yr);
    Report rep;
    rep.result = report_header(Recipe::Collapse, opt);
    rep.result["mode"] = "series";
    rep.result["time_axis"] = opt.time_axis;
    rep.result["score"] = score;
    json labels = json::array();
    for (const auto& c : curves) labels.push_back(c.label);
    rep.result["curves"] = labels;
    rep.text = "Collapse of mean rho_E(t) vs (t - t_c)/" + opt.time_axis + " over " + std::to_string(curves.size()) +
               " runs\n  score " + fmt(score) + "\n";
    return rep;
}

Report analyze(Recipe recipe, const std::vector<fs::path>& inputs, const AnalyzeOptions& opt) {
    if (recipe == Recipe::Predict) return analyze_predict(opt);
    if (inputs.empty()) throw InsufficientData("analyze: no input files");
    if (recipe == Recipe::Collapse && fs::is_directory(inputs.front())) return analyze_series_collapse(inputs, opt);
    std::vector<SummaryRow> rows;
    for (const auto& path : inputs) {
        const fs::path file = fs::is_directory(path) ? path / "summary.csv" : path;
        auto part = read_summary_csv(file);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    Report rep;
    switch (recipe) {
        case Recipe::KzFit: rep = analyze_kz_fit(rows, opt); break;
        case Recipe::ExpFit: rep = analyze_exp_fit(rows, opt); break;
        case Recipe::Collapse: rep = analyze_collapse(rows, opt); break;
        case Recipe::CumulantRatios: rep = analyze_cumulant_ratios(rows, opt); break;
        case Recipe::Predict: break;
    }
    json in = json::array();
    for (const auto& p : inputs) in.push_back(p.string());
    rep.result["inputs"] = std::move(in);
    return rep;
}

void write_report(const Report& report, Recipe recipe, const fs::path& dir) {
    fs::create_directories(dir);
    const std::string stem = "report_" + std::string(to_string(recipe));
    {
        std::ofstream out(dir / (stem + ".json"), std::ios::binary | std::ios::trunc);
        out << report.result.dump(2) << "\n";
    }
    std::ofstream out(dir / (stem + ".txt"), std::ios::binary | std::ios::trunc);
    out << report.text;
}

}  // namespace svl
