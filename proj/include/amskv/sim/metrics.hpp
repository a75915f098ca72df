// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amskv/sim/trace.hpp"

#include <span>
#include <vector>

namespace amskv::sim {

/// Window length used for wipe-out unless stated otherwise.
inline constexpr Index kDefaultWipeoutWindow = 32;
inline constexpr Index kDefaultHistogramBins = 10;

/// |a ∩ b| / |a ∪ b| over ascending id lists; two empty sets give 1.
double jaccard(std::span<const TokenId> a, std::span<const TokenId> b);

/**
 * IoU of retained ids between events e and e+1, averaged over heads. Both
 * sets are restricted to ids alive at both events, so tokens generated after
 * event e never count against it. Entry e compares e with e+1; fewer than
 * two events give an empty series.
 */
std::vector<double> metric_retained_iou(const RunTrace& trace);

/// Mean of the IoU series, or 0 when it is empty.
double mean_retained_iou(const RunTrace& trace);

/**
 * Per event: the fraction of windows that lost every token. The span
 * between the protected sinks and the protected recent suffix is tiled
 * from its start into disjoint windows of `window_w` positions (a short
 * tail is ignored); counts are pooled over heads. Events with no full
 * window report 0.
 */
std::vector<double> wipeout_per_event(const RunTrace& trace, Index window_w);

/// Mean of wipeout_per_event over all events; 0 for a trace without events.
double metric_wipeout_rate(const RunTrace& trace, Index window_w = kDefaultWipeoutWindow);

/**
 * Retained fraction per relative-position bin. Position p of a cache of
 * length T falls into bin floor(p * bins / T). Each bin averages over the
 * (event, head) pairs in which it has members; bins never populated are 0.
 */
std::vector<double> metric_spatial_histogram(const RunTrace& trace, Index bins = kDefaultHistogramBins);

}  // namespace amskv::sim
