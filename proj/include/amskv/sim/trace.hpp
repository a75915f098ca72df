// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amskv/config.hpp"
#include "amskv/ledger.hpp"
#include "amskv/policy.hpp"
#include "amskv/scorers.hpp"
#include "amskv/sim/workload.hpp"
#include "amskv/types.hpp"

#include <vector>

namespace amskv::sim {

/// Everything that determines a simulated run.
struct RunSpec {
    PolicyKind policy = PolicyKind::ams;
    ScorerKind scorer = ScorerKind::expected;
    CompressionConfig cfg;
    WorkloadSpec workload;

    bool operator==(const RunSpec&) const = default;
};

/// Defaults with t_keep = 256.
RunSpec default_run_spec();

/// One head at one compression event. Positions refer to the cache before compression.
struct HeadEvent {
    std::vector<TokenId> cache_ids;   ///< ledger before compression
    std::vector<TokenId> keep_ids;    ///< original ids of the survivors, ascending
    std::vector<Index> keep;          ///< surviving positions
    std::vector<Index> boundaries;    ///< segment boundaries; empty for baselines
    std::vector<Index> quotas;
    std::vector<double> mass;         ///< m_used; empty for baselines
    Index sinks = 0;                  ///< must-keep prefix actually protected
    Index recent = 0;                 ///< must-keep suffix actually protected

    bool operator==(const HeadEvent&) const = default;
};

struct EventRecord {
    Index event = 0;
    Index step = 0;                   ///< tokens generated when the event fired
    Index cache_len_before = 0;
    Index cache_len_after = 0;
    std::vector<HeadEvent> heads;
    OpCounters ops;
    double wall_us = 0.0;             ///< policy + gather time, summed over heads
};

struct RunTrace {
    RunSpec spec;
    std::vector<EventRecord> events;
    Index steps = 0;
    Index final_cache_len = 0;
};

/**
 * Streams `spec.workload.steps` tokens through a single-layer cache and
 * compresses every `spec.cfg.interval` tokens with `spec.policy`. Each head
 * keeps its own ledger, credit and usage history; the history is dropped
 * after each event because cache positions change.
 */
RunTrace run_schedule(AttentionSource& source, const RunSpec& spec);

/// Builds the source from `spec.workload` and runs it.
RunTrace run_schedule(const RunSpec& spec);

}  // namespace amskv::sim
