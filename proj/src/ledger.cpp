// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/ledger.hpp"

#include <numeric>

namespace amskv {

TokenLedger TokenLedger::contiguous(Index n) {
    AMSKV_EXPECT(n >= 0, "ledger length must be non-negative");
    std::vector<TokenId> ids(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), TokenId{0});
    return TokenLedger(std::move(ids), n);
}

TokenLedger::TokenLedger(std::vector<TokenId> ids, TokenId next_id) : m_ids(std::move(ids)), m_next(next_id) {
    for (std::size_t i = 1; i < m_ids.size(); ++i)
        AMSKV_EXPECT(m_ids[i - 1] < m_ids[i], "ledger ids must be strictly increasing");
    AMSKV_EXPECT(m_ids.empty() || m_ids.back() < m_next, "next id must exceed every stored id");
}

void TokenLedger::append(Index n) {
    AMSKV_EXPECT(n >= 0, "cannot append a negative token count");
    for (Index i = 0; i < n; ++i) m_ids.push_back(m_next++);
}

TokenLedger advance_ledger(const TokenLedger& ledger, std::span<const Index> keep, Index new_tokens) {
    std::vector<TokenId> ids;
    ids.reserve(keep.size() + static_cast<std::size_t>(std::max<Index>(new_tokens, 0)));
    Index prev = -1;
    for (Index k : keep) {
        AMSKV_EXPECT(k >= 0 && k < ledger.size(), "keep index out of range for ledger");
        AMSKV_EXPECT(k > prev, "keep indices must be sorted and unique");
        ids.push_back(ledger[k]);
        prev = k;
    }
    TokenLedger out(std::move(ids), ledger.next_id());
    out.append(new_tokens);
    return out;
}

}  // namespace amskv
