// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amskv/sim/trace.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace amskv::sim {

inline constexpr int kTraceSchemaVersion = 1;

/**
 * One JSON document per run: run echo, per-event records and metric
 * summaries. Wall time is machine noise, so it is only written when
 * `include_timing` is set; without it equal runs serialize byte-identically.
 */
std::string trace_to_json(const RunTrace& trace, bool include_timing = false);

/// Long-format `event,metric,value` rows; run-level summaries use event `all`.
std::string trace_to_csv(const RunTrace& trace);

/// Structural check of a serialized trace. Returns one message per problem; empty means valid.
std::vector<std::string> validate_trace_json(std::string_view text);

}  // namespace amskv::sim
