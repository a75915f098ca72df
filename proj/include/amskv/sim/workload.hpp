// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amskv/ledger.hpp"
#include "amskv/types.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace amskv::sim {

/// Portable splitmix/xoshiro-style generator; identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    std::uint64_t next();
    /// [0, 1)
    double uniform();
    /// [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t m_s[4];
};

/**
 * Produces tokens and the attention their queries pay to the live cache.
 * Implementations stand in for a decoder: `emit_token` generates the next
 * token, after which `attention_row` reports that token's query attention in
 * a given head over the (possibly compressed) cache, including itself.
 */
class AttentionSource {
public:
    virtual ~AttentionSource() = default;
    virtual Index heads() const = 0;
    virtual Index head_dim() const = 0;
    /// Writes the new token's key and value rows, one per head ([heads x D]).
    virtual void emit_token(TokenId id, MatrixXd& keys, MatrixXd& values) = 0;
    /// A distribution over the live positions.
    virtual VectorXd attention_row(Index head, std::span<const TokenId> live_ids,
                                   const Eigen::Ref<const MatrixXd>& live_keys) = 0;
};

enum class WorkloadKind { uniform, heavy_hitter, drifting_focus, low_region_adversarial, toy };

WorkloadKind parse_workload(std::string_view name);
std::string_view to_string(WorkloadKind kind);

struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::drifting_focus;
    Index steps = 2048;
    std::uint64_t seed = 0;
    Index heads = 2;
    Index head_dim = 16;

    /// Log-uniform multiplicative jitter: each attention weight is scaled by exp(noise * U(-1, 1)).
    double noise = 0.5;
    // heavy_hitter
    Index hitter_count = 16;
    double hitter_weight = 20.0;
    // drifting_focus: a Gaussian bump centred at drift_rate * query_id
    double drift_rate = 0.5;
    double focus_width = 48.0;
    double focus_gain = 8.0;
    // low_region_adversarial: [cold_start, cold_start + cold_span) scaled by cold_factor
    Index cold_start = 192;
    Index cold_span = 64;
    double cold_factor = 1e-3;

    bool operator==(const WorkloadSpec&) const = default;
};

/// Synthetic attention shaped by a per-token salience profile.
class SyntheticWorkload final : public AttentionSource {
public:
    explicit SyntheticWorkload(const WorkloadSpec& spec);

    Index heads() const override { return m_spec.heads; }
    Index head_dim() const override { return m_spec.head_dim; }
    void emit_token(TokenId id, MatrixXd& keys, MatrixXd& values) override;
    VectorXd attention_row(Index head, std::span<const TokenId> live_ids,
                           const Eigen::Ref<const MatrixXd>& live_keys) override;

    /// Noise-free weight of token `id` as seen by query `query_id` in `head`.
    double salience(Index head, TokenId id, TokenId query_id) const;

private:
    WorkloadSpec m_spec;
    Rng m_rng;
    std::vector<std::vector<double>> m_base;  ///< [head][id]
    std::vector<char> m_hitter;               ///< [id]
    TokenId m_query = -1;
};

/// Single-layer softmax attention over fixed random projections of random embeddings.
class ToyDecoder final : public AttentionSource {
public:
    ToyDecoder(Index heads, Index head_dim, std::uint64_t seed);

    Index heads() const override { return m_heads; }
    Index head_dim() const override { return m_dim; }
    void emit_token(TokenId id, MatrixXd& keys, MatrixXd& values) override;
    VectorXd attention_row(Index head, std::span<const TokenId> live_ids,
                           const Eigen::Ref<const MatrixXd>& live_keys) override;

private:
    Index m_heads;
    Index m_dim;
    Rng m_rng;
    std::vector<MatrixXd> m_wq, m_wk, m_wv;
    VectorXd m_topic;
    MatrixXd m_queries;  ///< [heads x D] for the latest token
};

std::unique_ptr<AttentionSource> make_source(const WorkloadSpec& spec);

}  // namespace amskv::sim
