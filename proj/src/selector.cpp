// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/selector.hpp"

#include <algorithm>
#include <numeric>

namespace amskv {

namespace {

// Strict "ranks ahead of": higher score, then lower index.
struct Better {
    const VectorXd& g;
    bool operator()(Index a, Index b) const { return g(a) > g(b) || (g(a) == g(b) && a < b); }
};

std::vector<Index> top_of(const VectorXd& g, std::vector<Index> pool, Index q) {
    q = std::min<Index>(q, static_cast<Index>(pool.size()));
    std::partial_sort(pool.begin(), pool.begin() + q, pool.end(), Better{g});
    pool.resize(static_cast<std::size_t>(q));
    return pool;
}

}  // namespace

KeepIndexSet::KeepIndexSet(std::vector<Index> indices) : m_idx(std::move(indices)) {
    std::sort(m_idx.begin(), m_idx.end());
    m_idx.erase(std::unique(m_idx.begin(), m_idx.end()), m_idx.end());
}

KeepIndexSet KeepIndexSet::all(Index T) {
    std::vector<Index> idx(static_cast<std::size_t>(T));
    std::iota(idx.begin(), idx.end(), Index{0});
    return KeepIndexSet(std::move(idx));
}

bool KeepIndexSet::contains(Index pos) const { return std::binary_search(m_idx.begin(), m_idx.end(), pos); }

std::vector<Index> in_segment_topk(const VectorXd& g, Index a, Index b, Index q, OpCounters* ops) {
    AMSKV_EXPECT(0 <= a && a <= b && b <= g.size(), "segment outside the score vector");
    AMSKV_EXPECT(q >= 0 && q <= b - a, "quota exceeds segment length");
    std::vector<Index> pool(static_cast<std::size_t>(b - a));
    std::iota(pool.begin(), pool.end(), a);
    auto picked = top_of(g, std::move(pool), q);
    std::sort(picked.begin(), picked.end());
    if (ops) ops->select_ops += static_cast<std::uint64_t>(b - a);
    return picked;
}

KeepIndexSet finalize_keep(const VectorXd& g, std::span<const Index> candidates, const MustKeepSet& must,
                           Index t_keep, OpCounters* ops) {
    const Index T = g.size();
    if (T <= t_keep) return KeepIndexSet::all(T);
    AMSKV_EXPECT(must.size() <= t_keep, "must-keep set exceeds budget; reconcile first");

    std::vector<char> chosen(static_cast<std::size_t>(T), 0);
    std::vector<char> pinned(static_cast<std::size_t>(T), 0);
    for (Index p : must.indices()) {
        AMSKV_EXPECT(p >= 0 && p < T, "must-keep index out of range");
        pinned[static_cast<std::size_t>(p)] = 1;
        chosen[static_cast<std::size_t>(p)] = 1;
    }
    for (Index p : candidates) {
        AMSKV_EXPECT(p >= 0 && p < T, "candidate index out of range");
        chosen[static_cast<std::size_t>(p)] = 1;
    }
    Index count = std::count(chosen.begin(), chosen.end(), char{1});

    if (count > t_keep) {
        std::vector<Index> droppable;
        for (Index p = 0; p < T; ++p)
            if (chosen[static_cast<std::size_t>(p)] && !pinned[static_cast<std::size_t>(p)]) droppable.push_back(p);
        // Worst-first is the reverse of the keep ranking.
        std::sort(droppable.begin(), droppable.end(), [&](Index a, Index b) { return Better{g}(b, a); });
        for (Index k = 0; k < count - t_keep; ++k) chosen[static_cast<std::size_t>(droppable[static_cast<std::size_t>(k)])] = 0;
    } else if (count < t_keep) {
        std::vector<Index> pool;
        for (Index p = 0; p < T; ++p)
            if (!chosen[static_cast<std::size_t>(p)]) pool.push_back(p);
        for (Index p : top_of(g, std::move(pool), t_keep - count)) chosen[static_cast<std::size_t>(p)] = 1;
    }
    if (ops) ops->select_ops += static_cast<std::uint64_t>(2 * T);

    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(t_keep));
    for (Index p = 0; p < T; ++p)
        if (chosen[static_cast<std::size_t>(p)]) out.push_back(p);
    return KeepIndexSet(std::move(out));
}

KeepIndexSet select(const VectorXd& g, const SegmentSet& segs, const QuotaVector& quotas, const MustKeepSet& must,
                    Index t_keep, OpCounters* ops) {
    AMSKV_EXPECT(segs.total_length() == g.size(), "segments must tile the score vector");
    AMSKV_EXPECT(quotas.size() == segs.size(), "one quota per segment");
    if (g.size() <= t_keep) return KeepIndexSet::all(g.size());
    std::vector<Index> picked;
    for (Index i = 0; i < segs.size(); ++i) {
        auto part = in_segment_topk(g, segs.begin(i), segs.end(i), quotas.quota[static_cast<std::size_t>(i)], ops);
        picked.insert(picked.end(), part.begin(), part.end());
    }
    return finalize_keep(g, picked, must, t_keep, ops);
}

KeepIndexSet baseline_global_topk(const VectorXd& g, const MustKeepSet& must, Index t_keep, OpCounters* ops) {
    const Index T = g.size();
    if (T <= t_keep) return KeepIndexSet::all(T);
    AMSKV_EXPECT(must.size() <= t_keep, "must-keep set exceeds budget; reconcile first");
    std::vector<Index> pool;
    for (Index p = 0; p < T; ++p)
        if (!must.contains(p)) pool.push_back(p);
    auto picked = top_of(g, std::move(pool), t_keep - must.size());
    auto pinned = must.indices();
    picked.insert(picked.end(), pinned.begin(), pinned.end());
    if (ops) ops->select_ops += static_cast<std::uint64_t>(T);
    return KeepIndexSet(std::move(picked));
}

KeepIndexSet baseline_streaming(Index T, Index n_sink, Index t_keep) {
    if (T <= t_keep) return KeepIndexSet::all(T);
    const Index sinks = std::min(n_sink, t_keep);
    std::vector<Index> out;
    for (Index p = 0; p < sinks; ++p) out.push_back(p);
    for (Index p = T - (t_keep - sinks); p < T; ++p) out.push_back(p);
    return KeepIndexSet(std::move(out));
}

KeepIndexSet baseline_fixed_chunk(const VectorXd& g, Index chunk_len, const MustKeepSet& must, Index t_keep,
                                  OpCounters* ops) {
    AMSKV_EXPECT(chunk_len >= 1, "chunk length must be >= 1");
    const Index T = g.size();
    if (T <= t_keep) return KeepIndexSet::all(T);

    const Index n_chunks = (T + chunk_len - 1) / chunk_len;
    VectorXd chunk_score(n_chunks);
    for (Index c = 0; c < n_chunks; ++c) {
        const Index a = c * chunk_len;
        chunk_score(c) = g.segment(a, std::min(chunk_len, T - a)).sum();
    }
    std::vector<Index> order(static_cast<std::size_t>(n_chunks));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), Better{chunk_score});

    std::vector<Index> picked;
    Index budget = t_keep;
    for (Index c : order) {
        if (budget == 0) break;
        const Index a = c * chunk_len;
        const Index b = std::min(a + chunk_len, T);
        const auto part = in_segment_topk(g, a, b, std::min(budget, b - a), ops);
        picked.insert(picked.end(), part.begin(), part.end());
        budget -= static_cast<Index>(part.size());
    }
    return finalize_keep(g, picked, must, t_keep, ops);
}

}  // namespace amskv
