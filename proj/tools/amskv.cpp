// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

// amskv: experiment driver for the compression policies.
//
//   amskv run --policy ams --workload drifting_focus --t-keep 256 --seed 3 --out traces
//   amskv run --plan plans/ablation.json --jobs 4
//   amskv compact-check --cases 1000 --seed 42
//   amskv validate traces/*.json

#include "amskv/config.hpp"
#include "amskv/experiment.hpp"
#include "amskv/paged.hpp"
#include "amskv/sim/trace_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

struct RunArgs {
    std::string plan;
    std::string config;
    std::vector<std::string> sets;
    std::optional<std::string> policy;
    std::optional<std::string> scorer;
    std::optional<std::string> workload;
    std::optional<amskv::Index> t_keep;
    std::optional<amskv::Index> interval;
    std::optional<amskv::Index> steps;
    std::vector<std::uint64_t> seeds;
    std::optional<std::string> out;
    std::string name = "run";
    unsigned jobs = 1;
    bool timing = false;
};

// Flags that touch the compression config; applied last so they win over files.
void apply_config_flags(amskv::CompressionConfig& cfg, const RunArgs& a) {
    if (a.t_keep) cfg.t_keep = *a.t_keep;
    if (a.interval) cfg.interval = *a.interval;
    for (const auto& kv : a.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw amskv::ConfigError("--set expects key=value, got '" + kv + "'");
        amskv::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
}

int cmd_run(const RunArgs& a) {
    using namespace amskv;
    CompressionConfig base = default_config();
    if (!a.config.empty()) base = load_config_file(a.config, base);
    apply_config_flags(base, a);

    ExperimentPlan plan;
    if (!a.plan.empty()) {
        if (a.policy || a.scorer || a.workload || a.steps || !a.seeds.empty())
            throw ConfigError("--policy/--scorer/--workload/--steps/--seed describe a single run; put them in the plan");
        plan = load_plan(a.plan, base);
        for (auto& e : plan.entries) {
            apply_config_flags(e.cfg, a);
            e.cfg.validate();
        }
    } else {
        base.validate();
        (void)base.keep_budget();
        PlanEntry e;
        e.name = a.name;
        e.cfg = base;
        if (a.policy) e.policy = parse_policy(*a.policy);
        if (a.scorer) e.scorer = parse_scorer(*a.scorer);
        if (a.workload) e.workload.kind = sim::parse_workload(*a.workload);
        if (a.steps) e.workload.steps = *a.steps;
        if (!a.seeds.empty()) e.seeds = a.seeds;
        plan.entries.push_back(std::move(e));
    }
    if (a.out) plan.output_dir = *a.out;

    const auto report = run_plan(plan, RunOptions{a.jobs, a.timing});
    for (const auto& p : report.written) std::cout << "wrote " << p.string() << "\n";
    for (const auto& f : report.failures) std::cerr << "error: " << f << "\n";
    return report.exit_code;
}

int cmd_compact_check(const amskv::CompactCheckOptions& opts) {
    const auto r = amskv::compact_check(opts);
    std::cout << "compact-check: " << r.passed << " passed, " << r.failed << " failed, "
              << r.conservation_failures << " conservation failures (" << opts.cases << " cases, seed " << opts.seed
              << ")\n";
    if (!r.first_failure.empty()) std::cout << "first failure: " << r.first_failure << "\n";
    std::cout << (r.all_passed() ? "PASS" : "FAIL") << "\n";
    return r.all_passed() ? amskv::exit_ok : amskv::exit_failure;
}

int cmd_validate(const std::vector<std::string>& files) {
    int status = amskv::exit_ok;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) {
            std::cerr << f << ": cannot open\n";
            status = amskv::exit_failure;
            continue;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        const auto errors = amskv::sim::validate_trace_json(ss.str());
        if (errors.empty()) {
            std::cout << f << ": ok\n";
            continue;
        }
        status = amskv::exit_failure;
        for (const auto& e : errors) std::cerr << f << ": " << e << "\n";
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AMS KV-cache compression experiments"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "run a plan file or a single configuration and write traces");
    run_cmd->add_option("--plan", run.plan, "JSON experiment plan")->check(CLI::ExistingFile);
    run_cmd->add_option("--config", run.config, "key=value config file applied over the defaults")
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--set", run.sets, "config override key=value (repeatable)");
    run_cmd->add_option("--policy", run.policy, "ams|global_topk|streaming|fixed_chunk");
    run_cmd->add_option("--scorer", run.scorer, "recent|expected|keydiff|constant");
    run_cmd->add_option("--workload", run.workload, "uniform|heavy_hitter|drifting_focus|low_region_adversarial|toy");
    run_cmd->add_option("--t-keep", run.t_keep, "post-compression cache budget");
    run_cmd->add_option("--interval", run.interval, "tokens between compression events");
    run_cmd->add_option("--steps", run.steps, "tokens to generate");
    run_cmd->add_option("--seed", run.seeds, "workload seed (repeatable)");
    run_cmd->add_option("--out", run.out, "output directory");
    run_cmd->add_option("--name", run.name, "file stem for a single run");
    run_cmd->add_option("--jobs", run.jobs, "parallel runs")->check(CLI::PositiveNumber);
    run_cmd->add_flag("--timing", run.timing, "include wall time in the JSON (breaks byte-identical output)");

    amskv::CompactCheckOptions cc;
    auto* cc_cmd = app.add_subcommand("compact-check", "randomized paged-vs-dense compaction equivalence suite");
    cc_cmd->add_option("--cases", cc.cases, "number of random cases")->check(CLI::NonNegativeNumber);
    cc_cmd->add_option("--seed", cc.seed, "generator seed");
    cc_cmd->add_option("--max-len", cc.max_len, "largest pre-compaction length (1 = degenerate T=1)")
        ->check(CLI::PositiveNumber);
    cc_cmd->add_flag("--corrupt", cc.corrupt, "perturb one compacted slot per case; every case must then fail");

    std::vector<std::string> traces;
    auto* val_cmd = app.add_subcommand("validate", "check trace JSON files against the schema");
    val_cmd->add_option("files", traces, "trace files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? amskv::exit_ok : amskv::exit_config_error;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*cc_cmd) return cmd_compact_check(cc);
        if (*val_cmd) return cmd_validate(traces);
    } catch (const amskv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return amskv::exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return amskv::exit_failure;
    }
    return amskv::exit_failure;
}
