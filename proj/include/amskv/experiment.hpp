// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amskv/config.hpp"
#include "amskv/sim/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace amskv {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config_error = 2 };

/// One named configuration run once per seed.
struct PlanEntry {
    std::string name;
    PolicyKind policy = PolicyKind::ams;
    ScorerKind scorer = ScorerKind::expected;
    CompressionConfig cfg;          ///< base config with the entry's overrides applied
    sim::WorkloadSpec workload;     ///< seed is replaced per run
    std::vector<std::uint64_t> seeds{0};
};

struct ExperimentPlan {
    std::filesystem::path output_dir = "traces";
    std::vector<PlanEntry> entries;
};

/**
 * Parses a plan document:
 *
 *     {"output_dir": "...", "config": {key: value},
 *      "entries": [{"name", "policy", "scorer", "workload", "steps",
 *                   "seeds": [...], "overrides": {key: value},
 *                   "workload_params": {field: value}}]}
 *
 * `config` applies to every entry on top of `base`; `overrides` per entry.
 * Everything is validated here, so a plan that parses can run. Errors are
 * ConfigError; JSON syntax errors carry line and column.
 */
ExperimentPlan parse_plan(std::string_view text, const CompressionConfig& base = default_config());
ExperimentPlan load_plan(const std::filesystem::path& path, const CompressionConfig& base = default_config());

/// One (entry, seed) pair with its output files.
struct RunJob {
    std::string entry;
    sim::RunSpec spec;
    std::filesystem::path json_path;
    std::filesystem::path csv_path;
};

/// Expands entries by seed into `<output_dir>/<name>_seed<seed>.{json,csv}`; throws ConfigError on colliding paths.
std::vector<RunJob> expand_plan(const ExperimentPlan& plan);

struct RunOptions {
    unsigned jobs = 1;
    bool include_timing = false;
};

struct PlanReport {
    std::vector<std::filesystem::path> written;
    std::vector<std::string> failures;  ///< one line per failed run
    int exit_code = exit_ok;
};

/// Runs every job on up to `opts.jobs` threads. Runs share no mutable state.
PlanReport run_plan(const ExperimentPlan& plan, const RunOptions& opts = {});

}  // namespace amskv
