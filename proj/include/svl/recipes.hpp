#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "svl/analysis.hpp"
#include "svl/stats.hpp"

namespace svl {

/// One row of a summary.csv / sweep_summary.csv file.
struct SummaryRow {
    Index n = 0;
    Index r = 0;
    double c = 0.0;
    double tau_q = 0.0;
    double gamma = 0.0;
    Observable observable = Observable::N1;
    std::uint64_t count = 0;
    double kappa1 = 0.0, kappa2 = 0.0, kappa3 = 0.0;
    double se_kappa1 = 0.0, se_kappa2 = 0.0, se_kappa3 = 0.0;
    std::size_t n_fail = 0;
    std::string fingerprint;
};

/// Throws FormatError naming the offending column or row.
std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path);
std::vector<SummaryRow> parse_summary_csv(std::string_view text, std::string_view origin = "<memory>");

enum class Recipe { KzFit, ExpFit, Collapse, CumulantRatios, Predict };

std::string_view to_string(Recipe r) noexcept;
Recipe recipe_from_string(std::string_view name);

struct AnalyzeOptions {
    Observable observable = Observable::N1;
    std::string exponents = "overdamped";
    // KzFit window rule
    double fast_margin = 3.0;
    double adiabatic_count = 3.0;
    std::optional<double> tau_fast;
    // ExpFit: abscissa r^axis_power tau_q (default 1/2 overdamped, 1/3 underdamped)
    std::optional<double> axis_power;
    // Collapse (summary mode): x = tau_q r^x_power, y = kappa1 r^y_power
    std::optional<double> x_power;
    std::optional<double> y_power;
    bool kz_only = true;
    // Collapse (series mode): time axis "t_hat" or "tau_q"
    std::string time_axis = "t_hat";
    // CumulantRatios: "count" rescales densities to defect numbers
    std::string ratio_scale = "count";
    // Predict
    double z_nu = 1.0;
    double nu = 0.5;
    Index n = 101;
    Index r = 1;
    double tau_q = 100.0;
    double tau0 = 1.0;
    double xi0 = 1.0;
};

struct Report {
    nlohmann::json result;
    std::string text;
};

inline constexpr int kReportFormatVersion = 1;

Report analyze_kz_fit(const std::vector<SummaryRow>& rows, const AnalyzeOptions& opt);
Report analyze_exp_fit(const std::vector<SummaryRow>& rows, const AnalyzeOptions& opt);
Report analyze_collapse(const std::vector<SummaryRow>& rows, const AnalyzeOptions& opt);
Report analyze_cumulant_ratios(const std::vector<SummaryRow>& rows, const AnalyzeOptions& opt);
Report analyze_predict(const AnalyzeOptions& opt);

/// Mean rho_E(t) curves from run directories (series.csv + manifest.json),
/// collapsed against (t - t_c)/t_hat or (t - t_c)/tau_q.
Report analyze_series_collapse(const std::vector<std::filesystem::path>& run_dirs, const AnalyzeOptions& opt);

/// Dispatches on the recipe; inputs are summary CSV files, or run directories
/// for a series collapse.
Report analyze(Recipe recipe, const std::vector<std::filesystem::path>& inputs, const AnalyzeOptions& opt);

/// Writes report_<recipe>.json and report_<recipe>.txt.
void write_report(const Report& report, Recipe recipe, const std::filesystem::path& dir);

/// Scale turning a density into a defect number for (observable, N, r).
double count_scale(Observable o, Index n, Index r);

}  // namespace svl
