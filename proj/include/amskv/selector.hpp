// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amskv/allocation.hpp"
#include "amskv/segmentation.hpp"
#include "amskv/types.hpp"

#include <span>
#include <vector>

namespace amskv {

/// Sorted, duplicate-free cache positions retained for one (batch, head).
class KeepIndexSet {
public:
    KeepIndexSet() = default;
    /// Sorts and deduplicates.
    explicit KeepIndexSet(std::vector<Index> indices);

    static KeepIndexSet all(Index T);

    Index size() const noexcept { return static_cast<Index>(m_idx.size()); }
    bool empty() const noexcept { return m_idx.empty(); }
    bool contains(Index pos) const;
    std::span<const Index> indices() const noexcept { return m_idx; }
    Index operator[](Index i) const { return m_idx[static_cast<std::size_t>(i)]; }
    auto begin() const noexcept { return m_idx.begin(); }
    auto end() const noexcept { return m_idx.end(); }

    bool operator==(const KeepIndexSet&) const = default;

private:
    std::vector<Index> m_idx;
};

/// The q highest-scoring positions of [a, b), ascending; ties go to the lower index.
std::vector<Index> in_segment_topk(const VectorXd& g, Index a, Index b, Index q, OpCounters* ops = nullptr);

/**
 * Unions `candidates` with the must-keep set, then trims the lowest-scoring
 * non-must-keep entries or backfills the highest-scoring unselected positions
 * until exactly min(t_keep, T) remain.
 */
KeepIndexSet finalize_keep(const VectorXd& g, std::span<const Index> candidates, const MustKeepSet& must,
                           Index t_keep, OpCounters* ops = nullptr);

/// Per-segment top-q selection followed by finalize_keep.
KeepIndexSet select(const VectorXd& g, const SegmentSet& segs, const QuotaVector& quotas, const MustKeepSet& must,
                    Index t_keep, OpCounters* ops = nullptr);

/// Must-keep plus the globally best remaining positions.
KeepIndexSet baseline_global_topk(const VectorXd& g, const MustKeepSet& must, Index t_keep,
                                  OpCounters* ops = nullptr);

/// First n_sink positions plus the most recent t_keep - n_sink.
KeepIndexSet baseline_streaming(Index T, Index n_sink, Index t_keep);

/**
 * Ranks fixed chunks by summed score and keeps them whole until the budget
 * runs out; the last chunk is cut down to its best positions. The result then
 * goes through finalize_keep.
 */
KeepIndexSet baseline_fixed_chunk(const VectorXd& g, Index chunk_len, const MustKeepSet& must, Index t_keep,
                                  OpCounters* ops = nullptr);

}  // namespace amskv
