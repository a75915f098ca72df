// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/experiment.hpp"

#include "amskv/sim/trace_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace amskv {

namespace {

using json = nlohmann::json;

std::string scalar_text(const json& v, const std::string& where) {
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "unset";
    if (v.is_number()) return v.dump();
    throw ConfigError(where + ": expected a scalar");
}

void apply_overrides(CompressionConfig& cfg, const json& obj, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        try {
            set_config_value(cfg, key, scalar_text(value, where + "." + key));
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
}

template <typename T>
T number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
    }
    return v.get<T>();
}

void apply_workload_params(sim::WorkloadSpec& w, const json& obj, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, v] : obj.items()) {
        const std::string at = where + "." + key;
        if (key == "steps") w.steps = number<Index>(v, at);
        else if (key == "heads") w.heads = number<Index>(v, at);
        else if (key == "head_dim") w.head_dim = number<Index>(v, at);
        else if (key == "noise") w.noise = number<double>(v, at);
        else if (key == "hitter_count") w.hitter_count = number<Index>(v, at);
        else if (key == "hitter_weight") w.hitter_weight = number<double>(v, at);
        else if (key == "drift_rate") w.drift_rate = number<double>(v, at);
        else if (key == "focus_width") w.focus_width = number<double>(v, at);
        else if (key == "focus_gain") w.focus_gain = number<double>(v, at);
        else if (key == "cold_start") w.cold_start = number<Index>(v, at);
        else if (key == "cold_span") w.cold_span = number<Index>(v, at);
        else if (key == "cold_factor") w.cold_factor = number<double>(v, at);
        else throw ConfigError(at + ": unknown workload parameter");
    }
}

void validate_workload(const sim::WorkloadSpec& w, const std::string& where) {
    if (w.steps < 0) throw ConfigError(where + ": steps must be >= 0");
    if (w.heads < 1 || w.head_dim < 1) throw ConfigError(where + ": heads and head_dim must be >= 1");
    if (!(w.noise >= 0.0)) throw ConfigError(where + ": noise must be >= 0");
    if (!(w.cold_factor > 0.0)) throw ConfigError(where + ": cold_factor must be > 0");
    if (!(w.focus_width > 0.0)) throw ConfigError(where + ": focus_width must be > 0");
    if (w.hitter_count < 0 || w.cold_span < 0) throw ConfigError(where + ": counts must be >= 0");
}

bool valid_name(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

}  // namespace

ExperimentPlan parse_plan(std::string_view text, const CompressionConfig& base) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // byte offset -> line for a readable message
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw ConfigError("plan: malformed JSON", static_cast<int>(line));
    }
    if (!doc.is_object()) throw ConfigError("plan: top level must be an object");

    ExperimentPlan plan;
    CompressionConfig common = base;
    for (const auto& [key, v] : doc.items()) {
        if (key == "output_dir") {
            if (!v.is_string()) throw ConfigError("plan.output_dir must be a string");
            plan.output_dir = v.get<std::string>();
        } else if (key == "config") {
            apply_overrides(common, v, "plan.config");
        } else if (key != "entries") {
            throw ConfigError("plan: unknown key '" + key + "'");
        }
    }
    if (!doc.contains("entries") || !doc["entries"].is_array() || doc["entries"].empty())
        throw ConfigError("plan.entries must be a non-empty array");

    for (std::size_t i = 0; i < doc["entries"].size(); ++i) {
        const auto& je = doc["entries"][i];
        const std::string where = "plan.entries[" + std::to_string(i) + "]";
        if (!je.is_object()) throw ConfigError(where + " must be an object");
        PlanEntry e;
        e.cfg = common;
        for (const auto& [key, v] : je.items()) {
            const std::string at = where + "." + key;
            if (key == "name") {
                if (!v.is_string() || !valid_name(v.get<std::string>()))
                    throw ConfigError(at + " must be a non-empty [A-Za-z0-9_.-] string");
                e.name = v.get<std::string>();
            } else if (key == "policy") {
                if (!v.is_string()) throw ConfigError(at + " must be a string");
                e.policy = parse_policy(v.get<std::string>());
            } else if (key == "scorer") {
                if (!v.is_string()) throw ConfigError(at + " must be a string");
                e.scorer = parse_scorer(v.get<std::string>());
            } else if (key == "workload") {
                if (!v.is_string()) throw ConfigError(at + " must be a string");
                e.workload.kind = sim::parse_workload(v.get<std::string>());
            } else if (key == "steps") {
                e.workload.steps = number<Index>(v, at);
            } else if (key == "seeds") {
                if (!v.is_array() || v.empty()) throw ConfigError(at + " must be a non-empty array");
                e.seeds.clear();
                for (const auto& s : v) {
                    if (!s.is_number_unsigned()) throw ConfigError(at + " must hold non-negative integers");
                    e.seeds.push_back(s.get<std::uint64_t>());
                }
            } else if (key == "overrides") {
                apply_overrides(e.cfg, v, at);
            } else if (key == "workload_params") {
                apply_workload_params(e.workload, v, at);
            } else {
                throw ConfigError(where + ": unknown key '" + key + "'");
            }
        }
        if (e.name.empty()) throw ConfigError(where + ": missing name");
        try {
            e.cfg.validate();
            (void)e.cfg.keep_budget();
        } catch (const ConfigError& err) {
            throw ConfigError(where + " (" + e.name + "): " + err.what());
        }
        validate_workload(e.workload, where);
        plan.entries.push_back(std::move(e));
    }
    expand_plan(plan);  // rejects colliding outputs up front
    return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path, const CompressionConfig& base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open plan file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_plan(ss.str(), base);
}

std::vector<RunJob> expand_plan(const ExperimentPlan& plan) {
    std::vector<RunJob> jobs;
    std::set<std::string> seen;
    for (const auto& e : plan.entries) {
        for (auto seed : e.seeds) {
            RunJob job;
            job.entry = e.name;
            job.spec.policy = e.policy;
            job.spec.scorer = e.scorer;
            job.spec.cfg = e.cfg;
            job.spec.workload = e.workload;
            job.spec.workload.seed = seed;
            const std::string stem = e.name + "_seed" + std::to_string(seed);
            if (!seen.insert(stem).second) throw ConfigError("plan: output '" + stem + "' produced twice");
            job.json_path = plan.output_dir / (stem + ".json");
            job.csv_path = plan.output_dir / (stem + ".csv");
            jobs.push_back(std::move(job));
        }
    }
    return jobs;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("short write to " + path.string());
}

}  // namespace

PlanReport run_plan(const ExperimentPlan& plan, const RunOptions& opts) {
    const auto jobs = expand_plan(plan);
    PlanReport report;
    std::filesystem::create_directories(plan.output_dir);

    std::vector<int> status(jobs.size(), exit_ok);
    std::vector<std::string> message(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const auto& job = jobs[i];
            try {
                const auto trace = sim::run_schedule(job.spec);
                write_file(job.json_path, sim::trace_to_json(trace, opts.include_timing));
                write_file(job.csv_path, sim::trace_to_csv(trace));
            } catch (const ConfigError& e) {
                status[i] = exit_config_error;
                message[i] = e.what();
            } catch (const std::exception& e) {
                status[i] = exit_failure;
                message[i] = e.what();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(jobs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (status[i] == exit_ok) {
            report.written.push_back(jobs[i].json_path);
            report.written.push_back(jobs[i].csv_path);
            continue;
        }
        report.failures.push_back(jobs[i].json_path.stem().string() + ": " + message[i]);
        // Config errors dominate: they mean the plan itself is wrong.
        if (status[i] == exit_config_error || report.exit_code == exit_ok) report.exit_code = status[i];
    }
    return report;
}

}  // namespace amskv
