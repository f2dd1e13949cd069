// svl: command-line front end for annealing runs, sweeps, equilibrium scans and analysis.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svl/config.hpp"
#include "svl/ensemble.hpp"
#include "svl/equilibrium.hpp"
#include "svl/recipes.hpp"
#include "svl/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kFailureThreshold = 2, kAnalysisError = 3 };

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool force = false;
};

void add_common(CLI::App* app, Common& c, bool config_required) {
    auto* opt = app->add_option("--config", c.config, "JSON configuration file");
    if (config_required) opt->required()->check(CLI::ExistingFile);
    app->add_option("--out", c.out, "Output directory");
    app->add_option("--seed", c.seed, "Base seed (overrides the config)");
    app->add_option("--threads", c.threads, "Worker threads (overrides SVL_THREADS and the config)")
        ->check(CLI::PositiveNumber);
    app->add_flag("--force", c.force, "Recompute outputs that already exist");
}

void print_summaries(const svl::EnsembleResult& r) {
    std::printf("%-6s %14s %14s %14s %12s\n", "obs", "kappa1", "kappa2", "kappa3", "se_kappa1");
    for (const auto& s : r.summaries) {
        std::printf("%-6s %14.6g %14.6g %14.6g %12.3g\n", std::string(svl::to_string(s.observable)).c_str(), s.kappa1,
                    s.kappa2, s.kappa3, s.se_kappa1);
    }
    if (r.n_failed > 0) std::printf("failed trajectories: %zu\n", r.n_failed);
}

int cmd_run(const Common& c) {
    svl::ExperimentConfig cfg = svl::load_config(c.config);
    if (c.seed) cfg.ensemble.base_seed = *c.seed;
    if (!c.out.empty()) cfg.outputs.directory = c.out;
    const svl::ExperimentConfig resolved = svl::resolve(cfg);
    svl::RunOptions options;
    options.threads = svl::resolve_thread_count(c.threads, resolved);
    const svl::RunOutcome outcome = svl::execute_run(resolved, resolved.outputs.directory, options, c.force);
    if (outcome.skipped) {
        std::printf("%s: complete outputs exist, skipped (use --force to recompute)\n", resolved.outputs.directory.c_str());
    } else {
        print_summaries(outcome.result);
        std::printf("wrote %s\n", resolved.outputs.directory.c_str());
    }
    return kOk;
}

int cmd_sweep(const Common& c) {
    json j = svl::load_json(c.config);
    if (c.seed) j["base"]["ensemble"]["base_seed"] = *c.seed;
    const svl::SweepSpec spec = svl::sweep_from_json(j);
    const fs::path out = c.out.empty() ? fs::path("sweep_out") : fs::path(c.out);
    svl::RunOptions options;
    options.threads = svl::resolve_thread_count(c.threads, spec.cell_config(0));
    const svl::SweepReport report = svl::run_sweep(spec, out, options, c.force);
    for (std::size_t k = 0; k < report.cells.size(); ++k) {
        const auto& cell = report.cells[k];
        std::printf("%s  %s%s\n", svl::cell_name(k).c_str(), cell.skipped ? "skipped" : (cell.error ? "FAILED" : "done"),
                    cell.error ? (": " + *cell.error).c_str() : "");
    }
    std::printf("wrote %s\n", report.summary_csv.string().c_str());
    if (report.any_failure_threshold()) return kFailureThreshold;
    return report.any_error() ? kConfigError : kOk;
}

int cmd_equilibrium(const Common& c) {
    json j = svl::load_json(c.config);
    svl::EquilibriumSpec spec;
    if (j.contains("equilibrium")) {
        spec = svl::equilibrium_from_json(j.at("equilibrium"));
        j.erase("equilibrium");
    }
    svl::ExperimentConfig cfg = svl::config_from_json(j);
    if (c.seed) cfg.ensemble.base_seed = *c.seed;
    if (!c.out.empty()) cfg.outputs.directory = c.out;
    const fs::path dir = cfg.outputs.directory;
    if (!c.force && fs::exists(dir / "equilibrium.json") && fs::exists(dir / "manifest.json")) {
        std::printf("%s: complete outputs exist, skipped (use --force to recompute)\n", dir.string().c_str());
        return kOk;
    }
    svl::RunOptions options;
    options.threads = svl::resolve_thread_count(c.threads, cfg);
    const std::string started = svl::utc_timestamp();
    const svl::EquilibriumResult r = svl::equilibrium_scan(cfg, spec, options);
    svl::write_equilibrium_outputs(r, dir, started, svl::utc_timestamp());
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("tau_q = %g\n%-12s %-12s %-10s %-10s\n", r.config.schedule.tau_q, "eps/2r", "epsilon", "xi", "R^2");
    for (const auto& pt : r.points) {
        if (pt.fit) {
            std::printf("%-12g %-12g %-10.4g %-10.4g\n", pt.requested, pt.epsilon, pt.fit->xi, pt.fit->r_squared);
        } else {
            std::printf("%-12g %-12g no fit: %s\n", pt.requested, pt.epsilon, pt.fit_error.c_str());
        }
    }
    if (r.n_failed * 100 > r.config.ensemble.n_trajectories) {
        throw svl::FailureThresholdExceeded(r.n_failed, r.config.ensemble.n_trajectories);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-vector Langevin annealing on circulant graphs"};
    app.require_subcommand(1);

    Common run_opts, sweep_opts, eq_opts;
    auto* run = app.add_subcommand("run", "Run one ensemble");
    add_common(run, run_opts, true);
    auto* sweep = app.add_subcommand("sweep", "Run a grid of ensembles (restartable)");
    add_common(sweep, sweep_opts, true);
    auto* eq = app.add_subcommand("equilibrium", "Correlator scan during a slow anneal");
    add_common(eq, eq_opts, true);

    auto* analyze = app.add_subcommand("analyze", "Fit and report on run or sweep outputs");
    std::string recipe_name;
    std::vector<std::string> inputs;
    std::string analyze_out = ".";
    svl::AnalyzeOptions aopt;
    std::string observable = "n1";
    bool all_points = false;
    analyze->add_option("recipe", recipe_name, "kz_fit | exp_fit | collapse | cumulant_ratios | predict")->required();
    analyze->add_option("--input,-i", inputs, "summary CSV files or run directories");
    analyze->add_option("--out", analyze_out, "Directory for the report files");
    analyze->add_option("--observable", observable, "n1 | n2 | rho_e | mz");
    analyze->add_option("--exponents", aopt.exponents, "overdamped | underdamped");
    analyze->add_option("--tau-fast", aopt.tau_fast, "Fast-quench scale (default: calibrated from M_z)");
    analyze->add_option("--fast-margin", aopt.fast_margin, "Exclude tau_q below margin * tau_fast");
    analyze->add_option("--adiabatic-count", aopt.adiabatic_count, "Exclude n1 below count / N");
    analyze->add_option("--axis-power", aopt.axis_power, "exp_fit abscissa r^p tau_q");
    analyze->add_option("--x-power", aopt.x_power, "collapse: x = tau_q r^p");
    analyze->add_option("--y-power", aopt.y_power, "collapse: y = kappa1 r^p (series: (tau_q/t_hat)^p)");
    analyze->add_flag("--all-points", all_points, "collapse: keep points outside the KZ window");
    analyze->add_option("--time-axis", aopt.time_axis, "series collapse: t_hat | tau_q");
    analyze->add_option("--scale", aopt.ratio_scale, "cumulant_ratios: count | density");

    auto* predict = app.add_subcommand("predict", "Freeze-out scales for given exponents");
    std::string preset;
    std::string predict_out;
    svl::AnalyzeOptions popt;
    predict->add_option("--preset", preset, "overdamped | underdamped");
    predict->add_option("--z-nu", popt.z_nu, "z * nu");
    predict->add_option("--nu", popt.nu, "nu");
    predict->add_option("--n", popt.n, "Number of rotors N");
    predict->add_option("--r", popt.r, "Interaction range r");
    predict->add_option("--tau-q", popt.tau_q, "Quench time");
    predict->add_option("--tau0", popt.tau0, "Microscopic time prefactor");
    predict->add_option("--xi0", popt.xi0, "Microscopic length prefactor");
    predict->add_option("--out", predict_out, "Also write report files here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) return cmd_run(run_opts);
        if (*sweep) return cmd_sweep(sweep_opts);
        if (*eq) return cmd_equilibrium(eq_opts);
        if (*predict) {
            if (!preset.empty()) {
                const svl::ExponentPreset p = svl::exponent_preset(preset);
                popt.z_nu = p.z_nu;
                popt.nu = p.nu;
            }
            const svl::Report rep = svl::analyze_predict(popt);
            std::cout << rep.text;
            if (!predict_out.empty()) svl::write_report(rep, svl::Recipe::Predict, predict_out);
            return kOk;
        }
        if (*analyze) {
            svl::Recipe recipe;
            try {
                recipe = svl::recipe_from_string(recipe_name);
                aopt.observable = svl::observable_from_string(observable);
                aopt.kz_only = !all_points;
            } catch (const svl::InvalidParameter& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kConfigError;
            }
            try {
                std::vector<fs::path> paths(inputs.begin(), inputs.end());
                const svl::Report rep = svl::analyze(recipe, paths, aopt);
                svl::write_report(rep, recipe, analyze_out);
                std::cout << rep.text;
                return kOk;
            } catch (const svl::FormatError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kAnalysisError;
            } catch (const svl::InsufficientData& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kAnalysisError;
            } catch (const svl::DomainError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kAnalysisError;
            } catch (const svl::ConfigError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kAnalysisError;
            }
        }
    } catch (const svl::FailureThresholdExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailureThreshold;
    } catch (const svl::InvalidParameter& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const svl::UnsupportedConfiguration& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kOk;
}
