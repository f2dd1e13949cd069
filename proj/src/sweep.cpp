#include "svl/sweep.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace svl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// {"a.b": v} -> {"a": {"b": v}}
json patch_from_path(const std::string& dotted, const json& value) {
    json patch = value;
    std::string path = dotted;
    while (true) {
        const auto dot = path.rfind('.');
        const std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
        if (key.empty()) throw ConfigError("sweep: malformed grid key '" + dotted + "'");
        patch = json{{key, patch}};
        if (dot == std::string::npos) break;
        path = path.substr(0, dot);
    }
    return patch;
}

}  // namespace

ExperimentConfig SweepSpec::cell_config(std::size_t k) const {
    json merged = base;
    merged.merge_patch(cells.at(k));
    return config_from_json(merged);
}

SweepSpec sweep_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("sweep: top level must be an object");
    for (const auto& [key, value] : j.items()) {
        if (key != "format_version" && key != "base" && key != "grid" && key != "cells") {
            throw ConfigError("sweep: unknown field '" + key + "'");
        }
    }
    if (j.contains("format_version") && j.at("format_version") != kConfigFormatVersion) {
        throw ConfigError("sweep: unsupported format_version");
    }
    SweepSpec spec;
    if (j.contains("base")) spec.base = j.at("base");
    (void)config_from_json(spec.base);

    if (j.contains("grid") == j.contains("cells")) throw ConfigError("sweep: give exactly one of 'grid' or 'cells'");
    if (j.contains("cells")) {
        if (!j.at("cells").is_array()) throw ConfigError("sweep: 'cells' must be an array");
        for (const auto& c : j.at("cells")) spec.cells.push_back(c);
    } else {
        const json& grid = j.at("grid");
        if (!grid.is_object() || grid.empty()) throw ConfigError("sweep: 'grid' must be a non-empty object");
        spec.cells.push_back(json::object());
        for (const auto& [key, values] : grid.items()) {
            if (!values.is_array() || values.empty()) {
                throw ConfigError("sweep: grid entry '" + key + "' must be a non-empty array");
            }
            std::vector<json> next;
            for (const auto& cell : spec.cells) {
                for (const auto& v : values) {
                    json c = cell;
                    c.merge_patch(patch_from_path(key, v));
                    next.push_back(std::move(c));
                }
            }
            spec.cells = std::move(next);
        }
    }
    if (spec.cells.empty()) throw ConfigError("sweep: grid is empty");
    for (std::size_t k = 0; k < spec.cells.size(); ++k) (void)resolve(spec.cell_config(k));
    return spec;
}

bool SweepReport::any_failure_threshold() const {
    for (const auto& c : cells) {
        if (c.failure_threshold) return true;
    }
    return false;
}

bool SweepReport::any_error() const {
    for (const auto& c : cells) {
        if (c.error) return true;
    }
    return false;
}

std::string cell_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "cell_%03zu", k);
    return buf;
}

SweepReport run_sweep(const SweepSpec& spec, const fs::path& out_dir, const RunOptions& options, bool force) {
    fs::create_directories(out_dir);
    SweepReport report;
    std::string csv = summary_csv_header();
    json cells = json::array();
    for (std::size_t k = 0; k < spec.cells.size(); ++k) {
        CellStatus status;
        status.directory = out_dir / cell_name(k);
        ExperimentConfig cfg = spec.cell_config(k);
        cfg.outputs.directory = status.directory.string();
        try {
            const RunOutcome outcome = execute_run(cfg, status.directory, options, force);
            status.skipped = outcome.skipped;
            status.n_failed = outcome.result.n_failed;
        } catch (const FailureThresholdExceeded& e) {
            status.failure_threshold = true;
            status.n_failed = e.failed();
            status.error = e.what();
        } catch (const std::exception& e) {
            status.error = e.what();
        }
        // Rows come from the cell's own file, so skipped cells contribute identically.
        std::ifstream in(status.directory / "summary.csv");
        std::string line;
        if (in && std::getline(in, line)) {
            while (std::getline(in, line)) {
                if (!line.empty()) csv += line + "\n";
            }
        }
        cells.push_back({{"cell", cell_name(k)}, {"patch", spec.cells[k]}});
        report.cells.push_back(std::move(status));
    }
    report.summary_csv = out_dir / "sweep_summary.csv";
    {
        std::ofstream out(report.summary_csv, std::ios::binary | std::ios::trunc);
        out << csv;
    }
    {
        json index{{"format", "svl.sweep"}, {"format_version", kOutputFormatVersion}, {"base", spec.base},
                   {"cells", std::move(cells)}};
        std::ofstream out(out_dir / "sweep.json", std::ios::binary | std::ios::trunc);
        out << index.dump(2) << "\n";
    }
    return report;
}

}  // namespace svl
