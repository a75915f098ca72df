// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/segmentation.hpp"

namespace amskv {

namespace {

// Appends the boundaries of an even split of [a, b) into `parts` pieces
// (larger pieces first), excluding a.
void push_even_split(std::vector<Index>& out, Index a, Index b, Index parts) {
    const Index len = b - a;
    const Index base = len / parts;
    const Index extra = len % parts;
    Index pos = a;
    for (Index p = 0; p < parts; ++p) {
        pos += base + (p < extra ? 1 : 0);
        out.push_back(pos);
    }
}

void push_capped(std::vector<Index>& out, Index a, Index b, Index max_len) {
    const Index len = b - a;
    if (len > max_len)
        push_even_split(out, a, b, (len + max_len - 1) / max_len);
    else
        out.push_back(b);
}

}  // namespace

SegmentSet::SegmentSet(std::vector<Index> boundaries) : m_bounds(std::move(boundaries)) {
    AMSKV_EXPECT(m_bounds.size() >= 2, "a segment set needs at least one segment");
    AMSKV_EXPECT(m_bounds.front() == 0, "segments must start at position 0");
    for (std::size_t i = 1; i < m_bounds.size(); ++i)
        AMSKV_EXPECT(m_bounds[i - 1] < m_bounds[i], "segments must be non-empty and ordered");
}

SegmentSet SegmentSet::whole(Index T) { return SegmentSet({0, T}); }

std::vector<Index> SegmentSet::lengths() const {
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (Index i = 0; i < size(); ++i) out.push_back(length(i));
    return out;
}

VectorXd prefix_sums(const VectorXd& m) {
    VectorXd c(m.size());
    double run = 0.0;
    for (Index t = 0; t < m.size(); ++t) {
        run += m(t);
        c(t) = run;
    }
    return c;
}

std::vector<Index> cut_points(const VectorXd& m, double delta, OpCounters* ops) {
    AMSKV_EXPECT(delta > 0.0 && delta <= 1.0, "segment mass must lie in (0, 1]");
    const Index T = m.size();
    std::vector<Index> cuts;
    double run = 0.0;
    Index k = 1;
    for (Index t = 0; t < T; ++t) {
        run += m(t);
        // Several thresholds may be crossed at the same position; keep one cut.
        bool crossed = false;
        while (static_cast<double>(k) * delta <= run) {
            crossed = true;
            ++k;
        }
        if (crossed && t + 1 < T) cuts.push_back(t + 1);
    }
    if (ops) ops->segment_ops += static_cast<std::uint64_t>(T + k);
    return cuts;
}

SegmentSet segments_from_cuts(std::span<const Index> cuts, Index T) {
    AMSKV_EXPECT(T >= 1, "cannot segment an empty cache");
    std::vector<Index> b;
    b.reserve(cuts.size() + 2);
    b.push_back(0);
    for (Index c : cuts) {
        AMSKV_EXPECT(c > b.back() && c < T, "cuts must be ascending and inside (0, T)");
        b.push_back(c);
    }
    b.push_back(T);
    return SegmentSet(std::move(b));
}

SegmentSet split_long(const SegmentSet& segs, Index max_len, OpCounters* ops) {
    AMSKV_EXPECT(max_len >= 1, "max segment length must be >= 1");
    std::vector<Index> b{0};
    for (Index i = 0; i < segs.size(); ++i) push_capped(b, segs.begin(i), segs.end(i), max_len);
    if (ops) ops->segment_ops += static_cast<std::uint64_t>(b.size());
    return SegmentSet(std::move(b));
}

SegmentSet merge_short(const SegmentSet& segs, Index min_len, Index max_len, OpCounters* ops) {
    AMSKV_EXPECT(min_len >= 1 && max_len >= 1, "segment length bounds must be >= 1");
    const Index S = segs.size();

    // Sweep rightwards, letting short runs absorb their right neighbours.
    // Each run remembers how many original segments it swallowed.
    struct Run {
        Index end;
        Index parts;
    };
    std::vector<Run> runs;
    Index start = 0;
    Index parts = 0;
    for (Index i = 0; i < S; ++i) {
        const Index end = segs.end(i);
        ++parts;
        if (end - start < min_len && i + 1 < S) continue;
        runs.push_back({end, parts});
        start = end;
        parts = 0;
    }
    // A short tail folds into its left neighbour.
    if (runs.size() >= 2) {
        const Index tail_start = runs[runs.size() - 2].end;
        if (runs.back().end - tail_start < min_len) {
            runs[runs.size() - 2].end = runs.back().end;
            runs[runs.size() - 2].parts += runs.back().parts;
            runs.pop_back();
        }
    }

    std::vector<Index> b{0};
    for (const Run& r : runs) {
        if (r.parts > 1)
            push_capped(b, b.back(), r.end, max_len);
        else
            b.push_back(r.end);
    }
    if (ops) ops->segment_ops += static_cast<std::uint64_t>(S + b.size());
    return SegmentSet(std::move(b));
}

SegmentSet fixed_segments(Index T, Index len) {
    AMSKV_EXPECT(T >= 1 && len >= 1, "fixed segmentation needs T >= 1 and len >= 1");
    std::vector<Index> b{0};
    for (Index pos = len; pos < T; pos += len) b.push_back(pos);
    b.push_back(T);
    return SegmentSet(std::move(b));
}

SegmentSet segment(const VectorXd& m, const CompressionConfig& cfg, OpCounters* ops) {
    const Index T = m.size();
    AMSKV_EXPECT(T >= 1, "cannot segment an empty cache");
    if (cfg.fixed_length_segments_on) {
        if (ops) ops->segment_ops += static_cast<std::uint64_t>(T / cfg.max_seg_len + 1);
        return fixed_segments(T, cfg.max_seg_len);
    }
    const auto cuts = cut_points(m, cfg.segment_mass, ops);
    auto segs = segments_from_cuts(cuts, T);
    segs = split_long(segs, cfg.max_seg_len, ops);
    segs = merge_short(segs, cfg.min_seg_len, cfg.max_seg_len, ops);
    segs.set_prefix_mass(prefix_sums(m));
    if (ops) ops->segment_ops += static_cast<std::uint64_t>(T);
    return segs;
}

}  // namespace amskv
