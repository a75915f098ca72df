// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amskv/kv.hpp"
#include "amskv/selector.hpp"
#include "amskv/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace amskv {

using BlockId = std::int32_t;
using RequestId = std::int64_t;

/**
 * Block-pooled KV storage. Physical slot s lives in block s / block_size;
 * each head owns a [num_blocks * block_size x D] key and value matrix.
 * Every allocated block belongs to exactly one request.
 */
class BlockPool {
public:
    BlockPool(Index num_blocks, Index block_size, Index heads, Index head_dim);

    Index block_size() const noexcept { return m_block_size; }
    Index heads() const noexcept { return m_heads; }
    Index head_dim() const noexcept { return m_head_dim; }
    Index total_blocks() const noexcept { return static_cast<Index>(m_owner.size()); }
    Index free_blocks() const noexcept { return static_cast<Index>(m_free.size()); }
    Index allocated_blocks() const noexcept { return total_blocks() - free_blocks(); }
    /// -1 when free.
    RequestId owner(BlockId b) const;

    /// All-or-nothing: throws AllocationError and changes nothing if fewer than n blocks are free.
    std::vector<BlockId> allocate(RequestId owner, Index n);
    void release(RequestId owner, std::span<const BlockId> blocks);

    /// Allocated + free == total, no block both free and owned.
    bool conserved() const;

    Matrix<double>& keys(Index head) { return m_keys[static_cast<std::size_t>(head)]; }
    Matrix<double>& values(Index head) { return m_values[static_cast<std::size_t>(head)]; }
    const Matrix<double>& keys(Index head) const { return m_keys[static_cast<std::size_t>(head)]; }
    const Matrix<double>& values(Index head) const { return m_values[static_cast<std::size_t>(head)]; }

private:
    Index m_block_size;
    Index m_heads;
    Index m_head_dim;
    std::vector<RequestId> m_owner;
    std::vector<BlockId> m_free;  ///< kept sorted descending so the lowest id pops first
    std::vector<Matrix<double>> m_keys;
    std::vector<Matrix<double>> m_values;
};

/// Logical-to-physical map of one request.
struct BlockTable {
    std::vector<BlockId> blocks;
    Index length = 0;  ///< filled logical positions
};

/// table[p / block_size] * block_size + p % block_size.
Index resolve_slot(const BlockTable& table, Index block_size, Index p);

/**
 * A request in the paged cache. `next_position` is the autoregressive
 * position of the next generated token and survives compaction unchanged,
 * while `table.length` is the compact physical length.
 */
struct PagedSequence {
    RequestId id = 0;
    BlockTable table;
    Index next_position = 0;
};

/// Appends one token (one key/value row per head), allocating a block when the last is full.
void append_token(BlockPool& pool, PagedSequence& seq, const MatrixXd& keys, const MatrixXd& values);

/// Materialized copy plan: src[h][t] = pi_old(keep[h][t]), dst[t] = pi_new(t).
struct SlotMapping {
    std::vector<std::vector<Index>> src;
    std::vector<Index> dst;
};

SlotMapping plan_compaction(const BlockTable& old_table, const BlockTable& new_table, Index block_size,
                            std::span<const KeepIndexSet> keep);

/**
 * Head-wise compaction of one request: allocates compact replacement blocks,
 * copies K_new[dst[t], h] <- K_old[src[h][t], h] for every head, swaps in the
 * new table and frees the old blocks. Every keep set must have the same size,
 * which becomes the new length. On allocation failure nothing is modified.
 */
SlotMapping compact(BlockPool& pool, PagedSequence& seq, std::span<const KeepIndexSet> keep);

/// Dense view of a request, read through the ordinary table mapping only.
DenseKv<double> read_sequence(const BlockPool& pool, const BlockTable& table);

struct VerifyResult {
    bool ok = false;
    double max_entry_diff = 0.0;
    double max_output_diff = 0.0;
    std::string diagnostic;

    explicit operator bool() const noexcept { return ok; }
};

/**
 * Compares a compacted cache with the densely gathered one: every entry and
 * the attention output of `queries` (one row per head) must agree within tol.
 */
VerifyResult verify_compaction(const DenseKv<double>& compacted, const DenseKv<double>& dense, const MatrixXd& queries,
                               double tol = 1e-6);

struct CompactCheckOptions {
    Index cases = 1000;
    std::uint64_t seed = 42;
    Index max_len = 96;     ///< max pre-compaction length; 1 forces the degenerate T = 1 shape
    bool corrupt = false;   ///< perturb one compacted slot per case (must be detected)
};

struct CompactCheckReport {
    Index passed = 0;
    Index failed = 0;
    Index conservation_failures = 0;
    std::string first_failure;

    bool all_passed() const noexcept { return failed == 0 && conservation_failures == 0; }
};

/// Randomized equivalence suite: paged compaction vs dense gather, plus block accounting.
CompactCheckReport compact_check(const CompactCheckOptions& opts);

}  // namespace amskv
