#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "svl/config.hpp"
#include "svl/ensemble.hpp"

namespace svl {

/// A base config plus one JSON merge patch per cell.
///
///   {"base": {...}, "grid": {"graph.r": [1, 2], "schedule.tau_q": [10, 20]}}
///
/// expands to the cartesian product (keys in lexicographic order, last key
/// fastest); {"base": ..., "cells": [{...}, ...]} lists patches explicitly.
struct SweepSpec {
    nlohmann::json base = nlohmann::json::object();
    std::vector<nlohmann::json> cells;

    ExperimentConfig cell_config(std::size_t k) const;
};

SweepSpec sweep_from_json(const nlohmann::json& j);

struct CellStatus {
    std::filesystem::path directory;
    bool skipped = false;
    std::size_t n_failed = 0;
    /// Set when the cell did not produce usable output.
    std::optional<std::string> error;
    bool failure_threshold = false;
};

struct SweepReport {
    std::vector<CellStatus> cells;
    std::filesystem::path summary_csv;

    bool any_failure_threshold() const;
    bool any_error() const;
};

std::string cell_name(std::size_t k);

/// Runs every cell into out_dir/cell_NNN (complete cells are skipped unless
/// `force`), then concatenates the cell summaries into out_dir/sweep_summary.csv.
SweepReport run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir, const RunOptions& options,
                      bool force);

}  // namespace svl
