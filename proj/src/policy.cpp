// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/policy.hpp"

namespace amskv {

PolicyKind parse_policy(std::string_view name) {
    if (name == "ams") return PolicyKind::ams;
    if (name == "global_topk") return PolicyKind::global_topk;
    if (name == "streaming") return PolicyKind::streaming;
    if (name == "fixed_chunk") return PolicyKind::fixed_chunk;
    throw ConfigError("unknown policy '" + std::string(name) + "' (expected ams|global_topk|streaming|fixed_chunk)");
}

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::ams: return "ams";
        case PolicyKind::global_topk: return "global_topk";
        case PolicyKind::streaming: return "streaming";
        case PolicyKind::fixed_chunk: return "fixed_chunk";
    }
    return "unknown";
}

VectorXd compute_scores(ScorerKind kind, const HeadEvidence& ev, const CompressionConfig& cfg) {
    switch (kind) {
        case ScorerKind::recent:
            AMSKV_EXPECT(ev.window, "recent-attention scorer needs a usage window");
            return score_recent_attention(*ev.window);
        case ScorerKind::expected:
            AMSKV_EXPECT(ev.window, "expected-attention scorer needs a usage window");
            return score_expected_attention_proxy(*ev.window, cfg.window);
        case ScorerKind::keydiff:
            AMSKV_EXPECT(ev.keys, "key-diff scorer needs keys");
            return score_key_diff(*ev.keys);
        case ScorerKind::constant:
            return score_constant(ev.length, 1.0);
    }
    throw ContractViolation("unhandled scorer");
}

VectorXd quality_mass(const UsageWindow<double>& window, const CompressionConfig& cfg, OpCounters* ops) {
    const VectorXd u = aggregate_usage(window, cfg.window, ops);
    const VectorXd pooled = smooth(u, cfg.smooth_kernel, ops);
    return normalize_mass(pooled, cfg.epsilon, ops);
}

PolicyDecision ams_select(const UsageWindow<double>& window, const VectorXd& g, const CompressionConfig& cfg,
                          CreditSlot credit, OpCounters* ops) {
    const Index T = g.size();
    AMSKV_EXPECT(window.length() == T, "usage window and scores disagree on cache length");
    const Index t_keep = cfg.keep_budget();

    PolicyDecision d;
    const VectorXd m_cur = quality_mass(window, cfg, ops);
    d.mass = (cfg.ema_on && credit.store) ? credit.store->update_and_mix(credit.layer, credit.head, m_cur, ops) : m_cur;

    auto budget = reconcile_budget(must_keep(T, cfg), t_keep);
    d.must = std::move(budget.must);
    if (T <= t_keep) {
        d.keep = KeepIndexSet::all(T);
        return d;
    }
    d.segments = segment(d.mass, cfg, ops);
    d.quotas = compute_quotas(*d.segments, d.mass, budget.t_rem, cfg, ops);
    d.keep = select(g, *d.segments, *d.quotas, d.must, t_keep, ops);
    return d;
}

PolicyDecision apply_policy(PolicyKind kind, const HeadEvidence& ev, const VectorXd& g, const CompressionConfig& cfg,
                            CreditSlot credit, OpCounters* ops) {
    const Index T = ev.length;
    AMSKV_EXPECT(T >= 1, "policy needs a non-empty cache");
    const Index t_keep = cfg.keep_budget();
    if (kind == PolicyKind::ams) {
        AMSKV_EXPECT(ev.window, "AMS needs a usage window");
        return ams_select(*ev.window, g, cfg, credit, ops);
    }

    AMSKV_EXPECT(kind == PolicyKind::streaming || g.size() == T, "scores disagree on cache length");
    PolicyDecision d;
    d.must = reconcile_budget(must_keep(T, cfg), t_keep).must;
    switch (kind) {
        case PolicyKind::global_topk: d.keep = baseline_global_topk(g, d.must, t_keep, ops); break;
        case PolicyKind::streaming: d.keep = baseline_streaming(T, cfg.n_sink, t_keep); break;
        case PolicyKind::fixed_chunk: d.keep = baseline_fixed_chunk(g, cfg.chunk_len, d.must, t_keep, ops); break;
        case PolicyKind::ams: break;
    }
    return d;
}

}  // namespace amskv
