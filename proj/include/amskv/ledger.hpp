// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amskv/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace amskv {

using TokenId = std::int64_t;

/**
 * Maps each cache position of one (batch, head) to the global id of the token
 * stored there. Ids are 0-based, assigned in generation order, and strictly
 * increasing along the cache axis.
 */
class TokenLedger {
public:
    TokenLedger() = default;

    /// Ledger for a cache holding tokens 0..n-1.
    static TokenLedger contiguous(Index n);

    /// Adopts existing ids; `next_id` must exceed every id.
    TokenLedger(std::vector<TokenId> ids, TokenId next_id);

    Index size() const noexcept { return static_cast<Index>(m_ids.size()); }
    TokenId operator[](Index pos) const { return m_ids[static_cast<std::size_t>(pos)]; }
    std::span<const TokenId> ids() const noexcept { return m_ids; }
    TokenId next_id() const noexcept { return m_next; }

    /// Appends `n` freshly generated tokens.
    void append(Index n);

    bool operator==(const TokenLedger&) const = default;

private:
    std::vector<TokenId> m_ids;
    TokenId m_next = 0;
};

/// Gathers the ledger by `keep` (sorted cache positions) and appends `new_tokens` fresh ids.
TokenLedger advance_ledger(const TokenLedger& ledger, std::span<const Index> keep, Index new_tokens);

}  // namespace amskv
