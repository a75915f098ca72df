// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amskv/config.hpp"
#include "amskv/types.hpp"

#include <limits>
#include <span>
#include <vector>

namespace amskv {

/**
 * Half-open intervals tiling [0, T), stored as S + 1 boundaries
 * 0 = b_0 < b_1 < ... < b_S = T.
 */
class SegmentSet {
public:
    SegmentSet() = default;
    explicit SegmentSet(std::vector<Index> boundaries);

    /// One segment covering [0, T).
    static SegmentSet whole(Index T);

    Index size() const noexcept { return static_cast<Index>(m_bounds.size()) - 1; }
    Index total_length() const noexcept { return m_bounds.empty() ? 0 : m_bounds.back(); }
    Index begin(Index i) const { return m_bounds[static_cast<std::size_t>(i)]; }
    Index end(Index i) const { return m_bounds[static_cast<std::size_t>(i) + 1]; }
    Index length(Index i) const { return end(i) - begin(i); }
    std::span<const Index> boundaries() const noexcept { return m_bounds; }
    std::vector<Index> lengths() const;

    /// Prefix-sum curve the cuts were taken from (empty for fixed-length segments).
    const VectorXd& prefix_mass() const noexcept { return m_prefix; }
    void set_prefix_mass(VectorXd prefix) { m_prefix = std::move(prefix); }

    bool operator==(const SegmentSet& o) const { return m_bounds == o.m_bounds; }

private:
    std::vector<Index> m_bounds;
    VectorXd m_prefix;
};

/// Running sums c(t) = m_0 + ... + m_t, summed left to right.
VectorXd prefix_sums(const VectorXd& m);

/**
 * For k = 1, 2, ... the smallest exclusive end position t with c(t) >= k * delta.
 * Returns the distinct cuts strictly inside (0, T), ascending.
 */
std::vector<Index> cut_points(const VectorXd& m, double delta, OpCounters* ops = nullptr);

SegmentSet segments_from_cuts(std::span<const Index> cuts, Index T);

/// Replaces each segment longer than max_len by ceil(L / max_len) parts whose lengths differ by at most one.
SegmentSet split_long(const SegmentSet& segs, Index max_len, OpCounters* ops = nullptr);

/**
 * Left-to-right sweep: a segment shorter than min_len absorbs its right
 * neighbour until it reaches min_len; a short final segment folds into its left
 * neighbour. A merged segment that would exceed max_len is re-split evenly.
 */
SegmentSet merge_short(const SegmentSet& segs, Index min_len,
                       Index max_len = std::numeric_limits<Index>::max(), OpCounters* ops = nullptr);

/// Contiguous segments of `len`, last one shorter when len does not divide T.
SegmentSet fixed_segments(Index T, Index len);

/// cut_points -> split_long -> merge_short, or fixed_segments(T, max_seg_len) in the fixed-length ablation.
SegmentSet segment(const VectorXd& m, const CompressionConfig& cfg, OpCounters* ops = nullptr);

}  // namespace amskv
