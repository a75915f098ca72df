// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace amskv {

bool MustKeepSet::contains(Index pos) const {
    return std::binary_search(sinks.begin(), sinks.end(), pos) || std::binary_search(recent.begin(), recent.end(), pos);
}

std::vector<Index> MustKeepSet::indices() const {
    std::vector<Index> out;
    out.reserve(sinks.size() + recent.size());
    std::merge(sinks.begin(), sinks.end(), recent.begin(), recent.end(), std::back_inserter(out));
    return out;
}

MustKeepSet must_keep(Index T, const CompressionConfig& cfg) {
    AMSKV_EXPECT(T >= 1, "must-keep needs a non-empty cache");
    MustKeepSet out;
    out.configured_sinks = cfg.n_sink;
    const Index n_sink = std::min(cfg.n_sink, T);
    const Index n_last = std::min(cfg.n_last, T);
    for (Index i = 0; i < n_sink; ++i) out.sinks.push_back(i);
    for (Index i = std::max(T - n_last, n_sink); i < T; ++i) out.recent.push_back(i);
    return out;
}

ReconciledBudget reconcile_budget(MustKeepSet must, Index t_keep) {
    if (t_keep < must.configured_sinks) throw ConfigError("t_keep must be >= n_sink");
    AMSKV_EXPECT(static_cast<Index>(must.sinks.size()) <= t_keep, "sink set larger than budget");
    const Index excess = must.size() - t_keep;
    if (excess > 0) must.recent.erase(must.recent.begin(), must.recent.begin() + excess);
    const Index rem = t_keep - must.size();
    return {std::move(must), rem};
}

Index QuotaVector::total() const { return std::accumulate(quota.begin(), quota.end(), Index{0}); }

std::vector<Index> largest_remainder(std::span<const double> weights, Index total) {
    AMSKV_EXPECT(total >= 0, "cannot apportion a negative total");
    const std::size_t n = weights.size();
    std::vector<Index> seats(n, 0);
    if (n == 0 || total == 0) {
        AMSKV_EXPECT(total == 0, "cannot apportion seats over zero parties");
        return seats;
    }
    double sum = 0.0;
    for (double w : weights) {
        AMSKV_EXPECT(w >= 0.0 && std::isfinite(w), "apportionment weights must be finite and non-negative");
        sum += w;
    }

    std::vector<double> rem(n);
    Index given = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double share = sum > 0.0 ? static_cast<double>(total) * (weights[i] / sum)
                                        : static_cast<double>(total) / static_cast<double>(n);
        const double fl = std::floor(share);
        seats[i] = static_cast<Index>(fl);
        rem[i] = share - fl;
        given += seats[i];
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });

    // Rounding of the shares can leave the floors one seat off in either direction.
    for (std::size_t k = 0; given < total; k = (k + 1) % n) {
        ++seats[order[k]];
        ++given;
    }
    for (std::size_t k = n; given > total;) {
        k = (k == 0 ? n : k) - 1;
        if (seats[order[k]] > 0) {
            --seats[order[k]];
            --given;
        }
    }
    return seats;
}

QuotaVector compute_quotas(const SegmentSet& segs, const VectorXd& m, Index t_rem, const CompressionConfig& cfg,
                           OpCounters* ops) {
    AMSKV_EXPECT(t_rem >= 0, "remaining budget must be non-negative");
    AMSKV_EXPECT(segs.total_length() == m.size(), "segments must tile the mass vector");
    AMSKV_EXPECT(t_rem <= m.size(), "remaining budget exceeds cache length");

    const Index S = segs.size();
    QuotaVector q;
    q.t_rem = t_rem;
    q.quota.assign(static_cast<std::size_t>(S), 0);
    q.mass.resize(static_cast<std::size_t>(S));
    q.length.resize(static_cast<std::size_t>(S));

    std::vector<double> minima(static_cast<std::size_t>(S));
    Index min_total = 0;
    for (Index i = 0; i < S; ++i) {
        const auto u = static_cast<std::size_t>(i);
        q.length[u] = segs.length(i);
        q.mass[u] = m.segment(segs.begin(i), segs.length(i)).sum();
        const Index mn = std::min(cfg.min_quota, q.length[u]);
        minima[u] = static_cast<double>(mn);
        min_total += mn;
    }
    if (ops) ops->quota_ops += static_cast<std::uint64_t>(m.size() + S);

    if (t_rem < min_total) {
        q.quota = largest_remainder(minima, t_rem);
        if (ops) ops->quota_ops += static_cast<std::uint64_t>(S);
        return q;
    }

    for (Index i = 0; i < S; ++i) q.quota[static_cast<std::size_t>(i)] = static_cast<Index>(minima[static_cast<std::size_t>(i)]);
    Index remaining = t_rem - min_total;

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < static_cast<std::size_t>(S); ++i)
        if (q.quota[i] < q.length[i]) active.push_back(i);

    // Each round either places everything or clips at least one segment.
    for (Index round = 0; remaining > 0 && round <= S; ++round) {
        std::vector<double> w(active.size());
        double wsum = 0.0;
        for (std::size_t k = 0; k < active.size(); ++k) {
            const std::size_t i = active[k];
            w[k] = cfg.mass_weighted_quotas_on ? q.mass[i] : static_cast<double>(q.length[i]);
            wsum += w[k];
        }
        if (!(wsum > 0.0))
            for (std::size_t k = 0; k < active.size(); ++k)
                w[k] = static_cast<double>(q.length[active[k]] - q.quota[active[k]]);

        const auto shares = largest_remainder(w, remaining);
        std::vector<std::size_t> still_open;
        for (std::size_t k = 0; k < active.size(); ++k) {
            const std::size_t i = active[k];
            const Index give = std::min(shares[k], q.length[i] - q.quota[i]);
            q.quota[i] += give;
            remaining -= give;
            if (q.quota[i] < q.length[i]) still_open.push_back(i);
        }
        active = std::move(still_open);
        if (ops) ops->quota_ops += static_cast<std::uint64_t>(2 * S);
    }
    AMSKV_EXPECT(remaining == 0, "quota allocation failed to place the whole budget");
    return q;
}

}  // namespace amskv
