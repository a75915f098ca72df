// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/sim/trace.hpp"

#include "amskv/kv.hpp"

#include <algorithm>
#include <chrono>
#include <deque>

namespace amskv::sim {

RunSpec default_run_spec() {
    RunSpec spec;
    spec.cfg = default_config();
    spec.cfg.t_keep = 256;
    return spec;
}

namespace {

// Per-head live state. Rows [0, length) of keys/values are the cache.
struct HeadState {
    MatrixXd keys;
    MatrixXd values;
    Index length = 0;
    TokenLedger ledger;
    std::deque<VectorXd> history;  // attention rows, oldest first
};

void reserve_rows(HeadState& s, Index rows) {
    if (rows <= s.keys.rows()) return;
    const Index cap = std::max(rows, 2 * s.keys.rows());
    s.keys.conservativeResize(cap, Eigen::NoChange);
    s.values.conservativeResize(cap, Eigen::NoChange);
}

UsageWindow<double> usage_window(const HeadState& s) {
    UsageWindow<double> w;
    const Index T = s.length;
    w.attention = Matrix<double>::Zero(static_cast<Index>(s.history.size()), T);
    w.visible.reserve(s.history.size());
    Index r = 0;
    for (const auto& row : s.history) {
        w.attention.row(r).head(row.size()) = row.transpose();
        w.visible.push_back(row.size());
        ++r;
    }
    return w;
}

}  // namespace

RunTrace run_schedule(AttentionSource& source, const RunSpec& spec) {
    const CompressionConfig& cfg = spec.cfg;
    cfg.validate();
    const Index t_keep = cfg.keep_budget();
    const Index steps = spec.workload.steps;
    if (steps < 0) throw ConfigError("steps must be >= 0");
    const Index H = source.heads();
    const Index D = source.head_dim();
    AMSKV_EXPECT(H >= 1 && D >= 1, "source needs at least one head and dimension");

    RunTrace trace;
    trace.spec = spec;
    trace.steps = steps;

    std::vector<HeadState> heads(static_cast<std::size_t>(H));
    const Index capacity = std::min(steps, t_keep + cfg.interval) + 1;
    for (auto& s : heads) {
        s.keys.resize(capacity, D);
        s.values.resize(capacity, D);
    }
    EmaCreditStore credits(1, H, cfg.ema_decay, cfg.mass_mix, cfg.ema_on);

    MatrixXd k_new, v_new;
    for (Index step = 0; step < steps; ++step) {
        const TokenId id = step;
        source.emit_token(id, k_new, v_new);
        AMSKV_EXPECT(k_new.rows() == H && k_new.cols() == D && v_new.rows() == H && v_new.cols() == D,
                     "source emitted a token of the wrong shape");
        for (Index h = 0; h < H; ++h) {
            auto& s = heads[static_cast<std::size_t>(h)];
            reserve_rows(s, s.length + 1);
            s.keys.row(s.length) = k_new.row(h);
            s.values.row(s.length) = v_new.row(h);
            ++s.length;
            s.ledger.append(1);
            VectorXd row = source.attention_row(h, s.ledger.ids(), s.keys.topRows(s.length));
            AMSKV_EXPECT(row.size() == s.length, "attention row does not cover the live cache");
            s.history.push_back(std::move(row));
            if (static_cast<Index>(s.history.size()) > cfg.hs_buffer) s.history.pop_front();
        }

        if ((step + 1) % cfg.interval != 0) continue;

        EventRecord ev;
        ev.event = static_cast<Index>(trace.events.size());
        ev.step = step + 1;
        ev.cache_len_before = heads.front().length;
        const auto start = std::chrono::steady_clock::now();
        for (Index h = 0; h < H; ++h) {
            auto& s = heads[static_cast<std::size_t>(h)];
            const Index T = s.length;
            const UsageWindow<double> window = usage_window(s);
            const MatrixXd live_keys = s.keys.topRows(T);
            HeadEvidence evidence{&window, &live_keys, T};
            const VectorXd g = spec.policy == PolicyKind::streaming ? VectorXd() : compute_scores(spec.scorer, evidence, cfg);
            PolicyDecision d = apply_policy(spec.policy, evidence, g, cfg, CreditSlot{&credits, 0, h}, &ev.ops);

            const auto keep = d.keep.indices();
            HeadEvent he;
            he.cache_ids.assign(s.ledger.ids().begin(), s.ledger.ids().end());
            he.keep.assign(keep.begin(), keep.end());
            he.keep_ids.reserve(keep.size());
            for (Index p : keep) he.keep_ids.push_back(s.ledger[p]);
            if (d.segments) he.boundaries.assign(d.segments->boundaries().begin(), d.segments->boundaries().end());
            if (d.quotas) he.quotas = d.quotas->quota;
            he.mass.assign(d.mass.data(), d.mass.data() + d.mass.size());
            he.sinks = static_cast<Index>(d.must.sinks.size());
            he.recent = static_cast<Index>(d.must.recent.size());

            // Ascending keep lets the gather run in place.
            for (std::size_t t = 0; t < keep.size(); ++t) {
                const auto dst = static_cast<Index>(t);
                if (keep[t] == dst) continue;
                s.keys.row(dst) = s.keys.row(keep[t]);
                s.values.row(dst) = s.values.row(keep[t]);
            }
            ev.ops.gather_ops += static_cast<std::uint64_t>(2 * keep.size() * static_cast<std::size_t>(D));
            s.length = static_cast<Index>(keep.size());
            s.ledger = advance_ledger(s.ledger, keep, 0);
            credits.remap(0, h, keep, s.length + cfg.interval);
            s.history.clear();
            ev.heads.push_back(std::move(he));
        }
        ev.wall_us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
        ev.cache_len_after = heads.front().length;
        trace.events.push_back(std::move(ev));
    }
    trace.final_cache_len = heads.front().length;
    return trace;
}

RunTrace run_schedule(const RunSpec& spec) {
    auto source = make_source(spec.workload);
    return run_schedule(*source, spec);
}

}  // namespace amskv::sim
