// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/sim/metrics.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>

namespace amskv::sim {

double jaccard(std::span<const TokenId> a, std::span<const TokenId> b) {
    AMSKV_EXPECT(std::is_sorted(a.begin(), a.end()) && std::is_sorted(b.begin(), b.end()), "id lists must be ascending");
    if (a.empty() && b.empty()) return 1.0;
    std::size_t common = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++common;
            ++i;
            ++j;
        }
    }
    const std::size_t uni = a.size() + b.size() - common;
    return static_cast<double>(common) / static_cast<double>(uni);
}

namespace {

std::vector<TokenId> intersect(std::span<const TokenId> a, std::span<const TokenId> b) {
    std::vector<TokenId> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

std::vector<double> metric_retained_iou(const RunTrace& trace) {
    std::vector<double> out;
    for (std::size_t e = 0; e + 1 < trace.events.size(); ++e) {
        const auto& prev = trace.events[e].heads;
        const auto& next = trace.events[e + 1].heads;
        AMSKV_EXPECT(prev.size() == next.size() && !prev.empty(), "events disagree on head count");
        double sum = 0.0;
        for (std::size_t h = 0; h < prev.size(); ++h) {
            const auto alive = intersect(prev[h].cache_ids, next[h].cache_ids);
            const auto a = intersect(prev[h].keep_ids, alive);
            const auto b = intersect(next[h].keep_ids, alive);
            sum += jaccard(a, b);
        }
        out.push_back(sum / static_cast<double>(prev.size()));
    }
    return out;
}

double mean_retained_iou(const RunTrace& trace) {
    const auto s = metric_retained_iou(trace);
    if (s.empty()) return 0.0;
    return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

std::vector<double> wipeout_per_event(const RunTrace& trace, Index window_w) {
    AMSKV_EXPECT(window_w >= 1, "wipe-out window must be >= 1");
    std::vector<double> out;
    out.reserve(trace.events.size());
    for (const auto& ev : trace.events) {
        Index windows = 0;
        Index wiped = 0;
        for (const auto& h : ev.heads) {
            const auto T = static_cast<Index>(h.cache_ids.size());
            const Index lo = h.sinks;
            const Index hi = T - h.recent;
            std::vector<char> kept(static_cast<std::size_t>(T), 0);
            for (Index p : h.keep) kept[static_cast<std::size_t>(p)] = 1;
            for (Index a = lo; a + window_w <= hi; a += window_w) {
                ++windows;
                const auto first = kept.begin() + a;
                if (std::none_of(first, first + window_w, [](char c) { return c != 0; })) ++wiped;
            }
        }
        out.push_back(windows == 0 ? 0.0 : static_cast<double>(wiped) / static_cast<double>(windows));
    }
    return out;
}

double metric_wipeout_rate(const RunTrace& trace, Index window_w) {
    const auto s = wipeout_per_event(trace, window_w);
    if (s.empty()) return 0.0;
    return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

std::vector<double> metric_spatial_histogram(const RunTrace& trace, Index bins) {
    AMSKV_EXPECT(bins >= 1, "histogram needs at least one bin");
    const auto nb = static_cast<std::size_t>(bins);
    std::vector<double> sum(nb, 0.0);
    std::vector<Index> samples(nb, 0);
    std::vector<Index> members(nb), retained(nb);
    for (const auto& ev : trace.events) {
        for (const auto& h : ev.heads) {
            const auto T = static_cast<Index>(h.cache_ids.size());
            if (T == 0) continue;
            std::fill(members.begin(), members.end(), 0);
            std::fill(retained.begin(), retained.end(), 0);
            auto bin = [&](Index p) { return static_cast<std::size_t>(p * bins / T); };
            for (Index p = 0; p < T; ++p) ++members[bin(p)];
            for (Index p : h.keep) ++retained[bin(p)];
            for (std::size_t b = 0; b < nb; ++b) {
                if (members[b] == 0) continue;
                sum[b] += static_cast<double>(retained[b]) / static_cast<double>(members[b]);
                ++samples[b];
            }
        }
    }
    for (std::size_t b = 0; b < nb; ++b)
        if (samples[b] > 0) sum[b] /= static_cast<double>(samples[b]);
    return sum;
}

}  // namespace amskv::sim
