// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amskv/allocation.hpp"
#include "amskv/config.hpp"
#include "amskv/mass.hpp"
#include "amskv/scorers.hpp"
#include "amskv/segmentation.hpp"
#include "amskv/selector.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace amskv {

enum class PolicyKind { ams, global_topk, streaming, fixed_chunk };

PolicyKind parse_policy(std::string_view name);
std::string_view to_string(PolicyKind kind);

/// Everything a policy may look at for one (batch, head) at a compression event.
struct HeadEvidence {
    const UsageWindow<double>* window = nullptr;  ///< recent attention rows
    const MatrixXd* keys = nullptr;               ///< [T x D], needed by the key-diff scorer
    Index length = 0;                             ///< T
};

VectorXd compute_scores(ScorerKind kind, const HeadEvidence& ev, const CompressionConfig& cfg);

/// Keep set plus the intermediate state that produced it.
struct PolicyDecision {
    KeepIndexSet keep;
    MustKeepSet must;            ///< after reconciliation
    std::optional<SegmentSet> segments;
    std::optional<QuotaVector> quotas;
    VectorXd mass;               ///< m_used; empty for baselines
};

/// Where the EMA credit for this head lives, if any.
struct CreditSlot {
    EmaCreditStore* store = nullptr;
    Index layer = 0;
    Index head = 0;
};

/**
 * One AMS compression decision for one head: usage aggregation, pooling,
 * mass normalization, EMA mixing, adaptive segmentation, must-keep
 * reconciliation, quota allocation and in-segment selection over `g`.
 */
PolicyDecision ams_select(const UsageWindow<double>& window, const VectorXd& g, const CompressionConfig& cfg,
                          CreditSlot credit = {}, OpCounters* ops = nullptr);

/// Quality mass m_cur from the usage window (before EMA mixing).
VectorXd quality_mass(const UsageWindow<double>& window, const CompressionConfig& cfg, OpCounters* ops = nullptr);

/// Dispatches to AMS or one of the baselines. `g` is ignored by streaming.
PolicyDecision apply_policy(PolicyKind kind, const HeadEvidence& ev, const VectorXd& g, const CompressionConfig& cfg,
                            CreditSlot credit = {}, OpCounters* ops = nullptr);

}  // namespace amskv
