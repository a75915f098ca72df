// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/sim/trace_io.hpp"

#include "amskv/sim/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>

namespace amskv::sim {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json config_json(const CompressionConfig& c) {
    ordered_json j;
    j["t_keep"] = c.t_keep ? ordered_json(*c.t_keep) : ordered_json(nullptr);
    j["interval"] = c.interval;
    j["segment_mass"] = c.segment_mass;
    j["min_seg_len"] = c.min_seg_len;
    j["max_seg_len"] = c.max_seg_len;
    j["min_quota"] = c.min_quota;
    j["n_sink"] = c.n_sink;
    j["n_last"] = c.n_last;
    j["ema_decay"] = c.ema_decay;
    j["mass_mix"] = c.mass_mix;
    j["window"] = c.window;
    j["hs_buffer"] = c.hs_buffer;
    j["epsilon"] = c.epsilon;
    j["smooth_kernel"] = c.smooth_kernel;
    j["chunk_len"] = c.chunk_len;
    j["ema_on"] = c.ema_on;
    j["mass_weighted_quotas_on"] = c.mass_weighted_quotas_on;
    j["fixed_length_segments_on"] = c.fixed_length_segments_on;
    return j;
}

ordered_json workload_json(const WorkloadSpec& w) {
    ordered_json j;
    j["kind"] = std::string(to_string(w.kind));
    j["steps"] = w.steps;
    j["seed"] = w.seed;
    j["heads"] = w.heads;
    j["head_dim"] = w.head_dim;
    j["noise"] = w.noise;
    j["hitter_count"] = w.hitter_count;
    j["hitter_weight"] = w.hitter_weight;
    j["drift_rate"] = w.drift_rate;
    j["focus_width"] = w.focus_width;
    j["focus_gain"] = w.focus_gain;
    j["cold_start"] = w.cold_start;
    j["cold_span"] = w.cold_span;
    j["cold_factor"] = w.cold_factor;
    return j;
}

ordered_json ops_json(const OpCounters& o) {
    ordered_json j;
    j["mass"] = o.mass_ops;
    j["ema"] = o.ema_ops;
    j["segment"] = o.segment_ops;
    j["quota"] = o.quota_ops;
    j["select"] = o.select_ops;
    j["gather"] = o.gather_ops;
    return j;
}

std::string format_real(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace

std::string trace_to_json(const RunTrace& trace, bool include_timing) {
    ordered_json doc;
    doc["schema_version"] = kTraceSchemaVersion;
    ordered_json run;
    run["policy"] = std::string(to_string(trace.spec.policy));
    run["scorer"] = std::string(to_string(trace.spec.scorer));
    run["workload"] = workload_json(trace.spec.workload);
    run["config"] = config_json(trace.spec.cfg);
    doc["run"] = std::move(run);
    doc["steps"] = trace.steps;
    doc["final_cache_len"] = trace.final_cache_len;

    ordered_json events = ordered_json::array();
    for (const auto& ev : trace.events) {
        ordered_json e;
        e["event"] = ev.event;
        e["step"] = ev.step;
        e["cache_len_before"] = ev.cache_len_before;
        e["cache_len_after"] = ev.cache_len_after;
        e["ops"] = ops_json(ev.ops);
        if (include_timing) e["wall_us"] = ev.wall_us;
        ordered_json heads = ordered_json::array();
        for (std::size_t h = 0; h < ev.heads.size(); ++h) {
            const auto& he = ev.heads[h];
            ordered_json jh;
            jh["head"] = h;
            jh["sinks"] = he.sinks;
            jh["recent"] = he.recent;
            jh["cache_ids"] = he.cache_ids;
            jh["keep"] = he.keep;
            jh["keep_ids"] = he.keep_ids;
            jh["boundaries"] = he.boundaries;
            jh["quotas"] = he.quotas;
            jh["mass"] = he.mass;
            heads.push_back(std::move(jh));
        }
        e["heads"] = std::move(heads);
        events.push_back(std::move(e));
    }
    doc["events"] = std::move(events);

    ordered_json metrics;
    metrics["retained_iou"] = metric_retained_iou(trace);
    metrics["mean_retained_iou"] = mean_retained_iou(trace);
    metrics["wipeout_window"] = kDefaultWipeoutWindow;
    metrics["wipeout_per_event"] = wipeout_per_event(trace, kDefaultWipeoutWindow);
    metrics["wipeout_rate"] = metric_wipeout_rate(trace, kDefaultWipeoutWindow);
    metrics["histogram_bins"] = kDefaultHistogramBins;
    metrics["spatial_histogram"] = metric_spatial_histogram(trace, kDefaultHistogramBins);
    doc["metrics"] = std::move(metrics);
    return doc.dump(2) + "\n";
}

std::string trace_to_csv(const RunTrace& trace) {
    std::string out = "event,metric,value\n";
    auto row = [&out](const std::string& event, std::string_view metric, const std::string& value) {
        out += event;
        out += ',';
        out += metric;
        out += ',';
        out += value;
        out += '\n';
    };
    const auto iou = metric_retained_iou(trace);
    const auto wipe = wipeout_per_event(trace, kDefaultWipeoutWindow);
    for (std::size_t e = 0; e < trace.events.size(); ++e) {
        const auto& ev = trace.events[e];
        const std::string id = std::to_string(ev.event);
        row(id, "step", std::to_string(ev.step));
        row(id, "cache_len_before", std::to_string(ev.cache_len_before));
        row(id, "cache_len_after", std::to_string(ev.cache_len_after));
        row(id, "wipeout_rate", format_real(wipe[e]));
        if (e < iou.size()) row(id, "retained_iou_next", format_real(iou[e]));
        row(id, "mass_ops", std::to_string(ev.ops.mass_ops));
        row(id, "ema_ops", std::to_string(ev.ops.ema_ops));
        row(id, "segment_ops", std::to_string(ev.ops.segment_ops));
        row(id, "quota_ops", std::to_string(ev.ops.quota_ops));
        row(id, "select_ops", std::to_string(ev.ops.select_ops));
        row(id, "gather_ops", std::to_string(ev.ops.gather_ops));
    }
    row("all", "events", std::to_string(trace.events.size()));
    row("all", "final_cache_len", std::to_string(trace.final_cache_len));
    row("all", "mean_retained_iou", format_real(mean_retained_iou(trace)));
    row("all", "wipeout_rate", format_real(metric_wipeout_rate(trace, kDefaultWipeoutWindow)));
    const auto hist = metric_spatial_histogram(trace, kDefaultHistogramBins);
    for (std::size_t b = 0; b < hist.size(); ++b) row("all", "spatial_bin_" + std::to_string(b), format_real(hist[b]));
    return out;
}

namespace {

struct Checker {
    std::vector<std::string> errors;

    bool require(const nlohmann::json& obj, const char* key, nlohmann::json::value_t type, const std::string& where) {
        if (!obj.is_object() || !obj.contains(key)) {
            errors.push_back(where + ": missing '" + key + "'");
            return false;
        }
        const auto& v = obj.at(key);
        bool ok = v.type() == type;
        // Unsigned and signed integers are interchangeable; reals accept integers.
        using vt = nlohmann::json::value_t;
        if (type == vt::number_integer || type == vt::number_unsigned) ok = v.is_number_integer();
        if (type == vt::number_float) ok = v.is_number();
        if (!ok) errors.push_back(where + ": '" + key + "' has the wrong type");
        return ok;
    }

    void index_list(const nlohmann::json& obj, const char* key, const std::string& where) {
        if (!require(obj, key, nlohmann::json::value_t::array, where)) return;
        const auto& a = obj.at(key);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!a[i].is_number_integer()) {
                errors.push_back(where + ": '" + key + "' holds a non-integer");
                return;
            }
            if (i > 0 && a[i].get<std::int64_t>() <= a[i - 1].get<std::int64_t>()) {
                errors.push_back(where + ": '" + key + "' is not strictly increasing");
                return;
            }
        }
    }
};

}  // namespace

std::vector<std::string> validate_trace_json(std::string_view text) {
    using vt = nlohmann::json::value_t;
    Checker c;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        return {std::string("not JSON: ") + e.what()};
    }
    if (!doc.is_object()) return {"top level is not an object"};
    if (c.require(doc, "schema_version", vt::number_integer, "trace") && doc["schema_version"] != kTraceSchemaVersion)
        c.errors.push_back("trace: unsupported schema_version");
    if (c.require(doc, "run", vt::object, "trace")) {
        const auto& run = doc["run"];
        c.require(run, "policy", vt::string, "run");
        c.require(run, "scorer", vt::string, "run");
        c.require(run, "workload", vt::object, "run");
        if (c.require(run, "config", vt::object, "run")) {
            for (auto key : config_keys()) {
                const std::string k(key);
                if (!run["config"].contains(k)) c.errors.push_back("run.config: missing '" + k + "'");
            }
        }
    }
    c.require(doc, "steps", vt::number_integer, "trace");
    c.require(doc, "final_cache_len", vt::number_integer, "trace");
    if (c.require(doc, "events", vt::array, "trace")) {
        std::int64_t last_step = 0;
        for (std::size_t e = 0; e < doc["events"].size(); ++e) {
            const auto& ev = doc["events"][e];
            const std::string where = "events[" + std::to_string(e) + "]";
            if (c.require(ev, "event", vt::number_integer, where) && ev["event"] != e)
                c.errors.push_back(where + ": events out of order");
            if (c.require(ev, "step", vt::number_integer, where)) {
                if (ev["step"].get<std::int64_t>() <= last_step) c.errors.push_back(where + ": steps not increasing");
                last_step = ev["step"].get<std::int64_t>();
            }
            c.require(ev, "cache_len_before", vt::number_integer, where);
            c.require(ev, "cache_len_after", vt::number_integer, where);
            c.require(ev, "ops", vt::object, where);
            if (!c.require(ev, "heads", vt::array, where)) continue;
            for (std::size_t h = 0; h < ev["heads"].size(); ++h) {
                const auto& jh = ev["heads"][h];
                const std::string hw = where + ".heads[" + std::to_string(h) + "]";
                c.require(jh, "sinks", vt::number_integer, hw);
                c.require(jh, "recent", vt::number_integer, hw);
                c.index_list(jh, "cache_ids", hw);
                c.index_list(jh, "keep", hw);
                c.index_list(jh, "keep_ids", hw);
                c.index_list(jh, "boundaries", hw);
                c.require(jh, "quotas", vt::array, hw);
                c.require(jh, "mass", vt::array, hw);
                if (!jh.contains("keep") || !jh.contains("keep_ids") || !jh.contains("cache_ids")) continue;
                const auto& keep = jh["keep"];
                const auto& ids = jh["cache_ids"];
                if (keep.size() != jh["keep_ids"].size()) {
                    c.errors.push_back(hw + ": keep and keep_ids differ in length");
                    continue;
                }
                for (std::size_t i = 0; i < keep.size(); ++i) {
                    if (!keep[i].is_number_integer()) break;
                    const auto p = keep[i].get<std::int64_t>();
                    if (p < 0 || static_cast<std::size_t>(p) >= ids.size() || ids[static_cast<std::size_t>(p)] != jh["keep_ids"][i]) {
                        c.errors.push_back(hw + ": keep_ids disagree with the ledger");
                        break;
                    }
                }
                if (ev.contains("cache_len_before") && ev["cache_len_before"].is_number_integer() &&
                    ids.size() != ev["cache_len_before"].get<std::size_t>())
                    c.errors.push_back(hw + ": ledger length differs from cache_len_before");
            }
        }
    }
    if (c.require(doc, "metrics", vt::object, "trace")) {
        const auto& m = doc["metrics"];
        c.require(m, "retained_iou", vt::array, "metrics");
        c.require(m, "mean_retained_iou", vt::number_float, "metrics");
        c.require(m, "wipeout_window", vt::number_integer, "metrics");
        c.require(m, "wipeout_per_event", vt::array, "metrics");
        c.require(m, "wipeout_rate", vt::number_float, "metrics");
        c.require(m, "histogram_bins", vt::number_integer, "metrics");
        c.require(m, "spatial_histogram", vt::array, "metrics");
    }
    return c.errors;
}

}  // namespace amskv::sim
