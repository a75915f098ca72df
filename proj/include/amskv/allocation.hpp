// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amskv/config.hpp"
#include "amskv/segmentation.hpp"
#include "amskv/types.hpp"

#include <span>
#include <vector>

namespace amskv {

/// Sink prefix plus recent suffix; the two parts never overlap.
struct MustKeepSet {
    std::vector<Index> sinks;   ///< ascending, [0, min(n_sink, T))
    std::vector<Index> recent;  ///< ascending, suffix positions not already sinks
    Index configured_sinks = 0;

    Index size() const noexcept { return static_cast<Index>(sinks.size() + recent.size()); }
    bool contains(Index pos) const;
    /// Sorted union of both parts.
    std::vector<Index> indices() const;
};

MustKeepSet must_keep(Index T, const CompressionConfig& cfg);

struct ReconciledBudget {
    MustKeepSet must;
    Index t_rem = 0;  ///< t_keep - |must|
};

/// Shrinks the recent suffix (oldest first) until the must-keep set fits in t_keep.
ReconciledBudget reconcile_budget(MustKeepSet must, Index t_keep);

struct QuotaVector {
    std::vector<Index> quota;
    std::vector<double> mass;    ///< M_i
    std::vector<Index> length;   ///< L_i
    Index t_rem = 0;

    Index size() const noexcept { return static_cast<Index>(quota.size()); }
    Index total() const;
};

/**
 * Hamilton apportionment of `total` seats over non-negative weights: floors of
 * the exact shares, then one extra seat per largest fractional remainder
 * (lower index first on ties). Zero total weight apportions uniformly.
 */
std::vector<Index> largest_remainder(std::span<const double> weights, Index total);

/**
 * Per-segment quotas summing exactly to t_rem. Each segment first receives
 * min(min_quota, L_i); the rest is apportioned in proportion to segment mass
 * (segment length in the unweighted ablation), clipped at L_i, with clipped
 * surplus re-apportioned over the unclipped segments. When t_rem cannot cover
 * every minimum, t_rem is apportioned over the minima themselves.
 */
QuotaVector compute_quotas(const SegmentSet& segs, const VectorXd& m, Index t_rem, const CompressionConfig& cfg,
                           OpCounters* ops = nullptr);

}  // namespace amskv
