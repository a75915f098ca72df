// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/mass.hpp"

namespace amskv {

EmaCreditStore::EmaCreditStore(Index layers, Index heads, double decay, double mix, bool enabled)
    : m_layers(layers), m_heads(heads), m_decay(decay), m_mix(mix), m_enabled(enabled),
      m_credit(static_cast<std::size_t>(layers * heads)) {
    AMSKV_EXPECT(layers >= 1 && heads >= 1, "credit store needs at least one layer and head");
    if (!(decay > 0.0 && decay < 1.0)) throw ConfigError("ema_decay must lie in (0, 1)");
    if (!(mix >= 0.0 && mix <= 1.0)) throw ConfigError("mass_mix must lie in [0, 1]");
}

std::size_t EmaCreditStore::slot(Index layer, Index head) const {
    AMSKV_EXPECT(layer >= 0 && layer < m_layers && head >= 0 && head < m_heads, "credit slot out of range");
    return static_cast<std::size_t>(layer * m_heads + head);
}

const VectorXd& EmaCreditStore::credit(Index layer, Index head) const { return m_credit[slot(layer, head)]; }

void EmaCreditStore::set_credit(Index layer, Index head, VectorXd credit) {
    AMSKV_EXPECT((credit.array() >= 0.0).all(), "credit entries must be non-negative");
    m_credit[slot(layer, head)] = std::move(credit);
}

VectorXd EmaCreditStore::update_and_mix(Index layer, Index head, const VectorXd& m_cur, OpCounters* ops) {
    if (!m_enabled) return m_cur;
    VectorXd& c = m_credit[slot(layer, head)];
    if (c.size() == 0) c = VectorXd::Zero(m_cur.size());
    if (c.size() != m_cur.size()) throw UsageError("credit misaligned with cache");

    c = m_decay * c + (1.0 - m_decay) * m_cur;
    if (ops) ops->ema_ops += static_cast<std::uint64_t>(3 * c.size());
    return normalize(m_mix * m_cur + (1.0 - m_mix) * normalize(c));
}

void EmaCreditStore::remap(Index layer, Index head, std::span<const Index> keep, Index new_len) {
    VectorXd& c = m_credit[slot(layer, head)];
    if (c.size() == 0) return;
    AMSKV_EXPECT(!keep.empty(), "credit remap needs a non-empty keep set");
    AMSKV_EXPECT(new_len >= static_cast<Index>(keep.size()), "remapped length shorter than keep set");
    VectorXd next = VectorXd::Zero(new_len);
    Index i = 0;
    for (Index k : keep) {
        AMSKV_EXPECT(k >= 0 && k < c.size(), "keep index out of range for credit");
        next(i++) = c(k);
    }
    c = std::move(next);
}

}  // namespace amskv
