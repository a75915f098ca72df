// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/sim/workload.hpp"

#include "amskv/kv.hpp"

#include <cmath>
#include <numbers>

namespace amskv::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

MatrixXd random_normal(Rng& rng, Index r, Index c, double scale) {
    MatrixXd m(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j) m(i, j) = scale * rng.normal();
    return m;
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
    for (auto& s : m_s) s = splitmix64(seed);
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(m_s[1] * 5, 7) * 9;
    const std::uint64_t t = m_s[1] << 17;
    m_s[2] ^= m_s[0];
    m_s[3] ^= m_s[1];
    m_s[1] ^= m_s[2];
    m_s[0] ^= m_s[3];
    m_s[2] ^= t;
    m_s[3] = rotl(m_s[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
    AMSKV_EXPECT(n > 0, "empty range");
    return next() % n;
}

WorkloadKind parse_workload(std::string_view name) {
    if (name == "uniform") return WorkloadKind::uniform;
    if (name == "heavy_hitter") return WorkloadKind::heavy_hitter;
    if (name == "drifting_focus") return WorkloadKind::drifting_focus;
    if (name == "low_region_adversarial") return WorkloadKind::low_region_adversarial;
    if (name == "toy") return WorkloadKind::toy;
    throw ConfigError("unknown workload '" + std::string(name) +
                      "' (expected uniform|heavy_hitter|drifting_focus|low_region_adversarial|toy)");
}

std::string_view to_string(WorkloadKind kind) {
    switch (kind) {
        case WorkloadKind::uniform: return "uniform";
        case WorkloadKind::heavy_hitter: return "heavy_hitter";
        case WorkloadKind::drifting_focus: return "drifting_focus";
        case WorkloadKind::low_region_adversarial: return "low_region_adversarial";
        case WorkloadKind::toy: return "toy";
    }
    return "unknown";
}

SyntheticWorkload::SyntheticWorkload(const WorkloadSpec& spec)
    : m_spec(spec), m_rng(spec.seed), m_base(static_cast<std::size_t>(spec.heads)) {
    AMSKV_EXPECT(spec.heads >= 1 && spec.head_dim >= 1, "workload needs heads and head_dim >= 1");
    if (!(spec.noise >= 0.0)) throw ConfigError("workload noise must be >= 0");
    if (!(spec.cold_factor > 0.0)) throw ConfigError("cold_factor must be > 0");
    m_hitter.assign(static_cast<std::size_t>(std::max<Index>(spec.steps, 0)), 0);
    if (spec.kind == WorkloadKind::heavy_hitter && spec.steps > 0) {
        for (Index i = 0; i < spec.hitter_count; ++i)
            m_hitter[m_rng.below(static_cast<std::uint64_t>(spec.steps))] = 1;
    }
}

double SyntheticWorkload::salience(Index head, TokenId id, TokenId query_id) const {
    const double base = m_base[static_cast<std::size_t>(head)][static_cast<std::size_t>(id)];
    switch (m_spec.kind) {
        case WorkloadKind::uniform:
            return base;
        case WorkloadKind::heavy_hitter: {
            const bool hit = id < static_cast<TokenId>(m_hitter.size()) && m_hitter[static_cast<std::size_t>(id)];
            return base * (hit ? m_spec.hitter_weight : 1.0);
        }
        case WorkloadKind::drifting_focus: {
            const double centre = m_spec.drift_rate * static_cast<double>(query_id);
            const double z = (static_cast<double>(id) - centre) / m_spec.focus_width;
            return base * (1.0 + m_spec.focus_gain * std::exp(-0.5 * z * z));
        }
        case WorkloadKind::low_region_adversarial: {
            const bool cold = id >= m_spec.cold_start && id < m_spec.cold_start + m_spec.cold_span;
            return base * (cold ? m_spec.cold_factor : 1.0);
        }
        case WorkloadKind::toy: break;
    }
    return base;
}

void SyntheticWorkload::emit_token(TokenId id, MatrixXd& keys, MatrixXd& values) {
    for (auto& b : m_base) {
        AMSKV_EXPECT(static_cast<TokenId>(b.size()) == id, "tokens must be emitted in id order");
        b.push_back(m_spec.kind == WorkloadKind::uniform ? 1.0 : m_rng.uniform(0.5, 1.5));
    }
    keys = random_normal(m_rng, m_spec.heads, m_spec.head_dim, 1.0);
    values = random_normal(m_rng, m_spec.heads, m_spec.head_dim, 1.0);
    m_query = id;
}

VectorXd SyntheticWorkload::attention_row(Index head, std::span<const TokenId> live_ids,
                                          const Eigen::Ref<const MatrixXd>&) {
    AMSKV_EXPECT(head >= 0 && head < m_spec.heads, "head out of range");
    AMSKV_EXPECT(!live_ids.empty(), "attention over an empty cache");
    VectorXd w(static_cast<Index>(live_ids.size()));
    for (std::size_t i = 0; i < live_ids.size(); ++i) {
        const double jitter = std::exp(m_spec.noise * m_rng.uniform(-1.0, 1.0));
        w(static_cast<Index>(i)) = salience(head, live_ids[i], m_query) * jitter;
    }
    return w / w.sum();
}

ToyDecoder::ToyDecoder(Index heads, Index head_dim, std::uint64_t seed)
    : m_heads(heads), m_dim(head_dim), m_rng(seed) {
    AMSKV_EXPECT(heads >= 1 && head_dim >= 1, "decoder needs heads and head_dim >= 1");
    const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
    for (Index h = 0; h < heads; ++h) {
        m_wq.push_back(random_normal(m_rng, head_dim, head_dim, scale));
        m_wk.push_back(random_normal(m_rng, head_dim, head_dim, scale));
        m_wv.push_back(random_normal(m_rng, head_dim, head_dim, scale));
    }
    m_topic = random_normal(m_rng, head_dim, 1, 1.0);
    m_queries = MatrixXd::Zero(heads, head_dim);
}

void ToyDecoder::emit_token(TokenId, MatrixXd& keys, MatrixXd& values) {
    // Embeddings follow a slowly drifting topic so nearby tokens correlate.
    m_topic = 0.95 * m_topic + 0.3 * random_normal(m_rng, m_dim, 1, 1.0);
    const VectorXd x = 2.0 * m_topic + random_normal(m_rng, m_dim, 1, 1.0);
    keys.resize(m_heads, m_dim);
    values.resize(m_heads, m_dim);
    for (Index h = 0; h < m_heads; ++h) {
        const auto u = static_cast<std::size_t>(h);
        m_queries.row(h) = (m_wq[u] * x).transpose();
        keys.row(h) = (m_wk[u] * x).transpose();
        values.row(h) = (m_wv[u] * x).transpose();
    }
}

VectorXd ToyDecoder::attention_row(Index head, std::span<const TokenId> live_ids,
                                   const Eigen::Ref<const MatrixXd>& live_keys) {
    AMSKV_EXPECT(static_cast<Index>(live_ids.size()) == live_keys.rows(), "ids and keys disagree");
    const MatrixXd keys = live_keys;
    return attention_weights<double>(m_queries.row(head).transpose(), keys);
}

std::unique_ptr<AttentionSource> make_source(const WorkloadSpec& spec) {
    if (spec.kind == WorkloadKind::toy) return std::make_unique<ToyDecoder>(spec.heads, spec.head_dim, spec.seed);
    return std::make_unique<SyntheticWorkload>(spec);
}

}  // namespace amskv::sim
