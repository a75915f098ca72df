// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/paged.hpp"

#include "fuzz.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace amskv;

namespace {

// Builds a request of length T with random rows; returns the dense original.
DenseKv<double> fill(BlockPool& pool, PagedSequence& seq, Index T, fuzz::Rng& rng) {
    DenseKv<double> dense(static_cast<std::size_t>(pool.heads()));
    for (auto& h : dense) {
        h.keys.resize(T, pool.head_dim());
        h.values.resize(T, pool.head_dim());
    }
    for (Index t = 0; t < T; ++t) {
        MatrixXd k(pool.heads(), pool.head_dim()), v(pool.heads(), pool.head_dim());
        for (Index i = 0; i < k.size(); ++i) {
            k.data()[i] = fuzz::uniform_real(rng, -1, 1);
            v.data()[i] = fuzz::uniform_real(rng, -1, 1);
        }
        append_token(pool, seq, k, v);
        for (Index h = 0; h < pool.heads(); ++h) {
            dense[static_cast<std::size_t>(h)].keys.row(t) = k.row(h);
            dense[static_cast<std::size_t>(h)].values.row(t) = v.row(h);
        }
    }
    return dense;
}

std::vector<KeepIndexSet> random_keeps(fuzz::Rng& rng, Index heads, Index T, Index n) {
    std::vector<KeepIndexSet> keep;
    for (Index h = 0; h < heads; ++h) {
        std::vector<Index> all(static_cast<std::size_t>(T));
        std::iota(all.begin(), all.end(), Index{0});
        std::shuffle(all.begin(), all.end(), rng);
        all.resize(static_cast<std::size_t>(n));
        keep.emplace_back(std::move(all));
    }
    return keep;
}

}  // namespace

TEST(ResolveSlot, Examples) {
    const BlockTable t{{7, 3}, 32};
    EXPECT_EQ(resolve_slot(t, 16, 20), 52);
    EXPECT_EQ(resolve_slot(t, 16, 0), 112);
    EXPECT_EQ(resolve_slot(t, 16, 31), 63);
    EXPECT_THROW(resolve_slot(t, 16, 32), ContractViolation);
    const BlockTable ones{{4, 0, 9}, 3};
    EXPECT_EQ(resolve_slot(ones, 1, 2), 9);
}

TEST(BlockPool, AllocationIsAllOrNothing) {
    BlockPool pool(4, 2, 1, 1);
    const auto a = pool.allocate(0, 3);
    EXPECT_EQ(a, (std::vector<BlockId>{0, 1, 2}));
    EXPECT_THROW(pool.allocate(1, 2), AllocationError);
    EXPECT_EQ(pool.free_blocks(), 1);
    EXPECT_TRUE(pool.conserved());
    EXPECT_THROW(pool.release(1, a), ContractViolation);
    pool.release(0, a);
    EXPECT_EQ(pool.free_blocks(), 4);
    EXPECT_EQ(pool.owner(0), -1);
}

TEST(Compact, IdentityPrefixKeepsContents) {
    fuzz::Rng rng(79);
    BlockPool pool(8, 4, 2, 3);
    PagedSequence seq{0, {}, 0};
    const auto dense = fill(pool, seq, 10, rng);
    std::vector<KeepIndexSet> keep(2, KeepIndexSet({0, 1, 2, 3, 4, 5}));
    compact(pool, seq, keep);
    EXPECT_EQ(seq.table.length, 6);
    EXPECT_EQ(seq.next_position, 10);
    const auto out = read_sequence(pool, seq.table);
    for (std::size_t h = 0; h < 2; ++h) EXPECT_EQ(out[h].keys, dense[h].keys.topRows(6));
}

TEST(Compact, HeadsKeepDifferentPositions) {
    fuzz::Rng rng(83);
    BlockPool pool(16, 2, 3, 4);
    PagedSequence seq{0, {}, 0};
    const auto dense = fill(pool, seq, 9, rng);
    const std::vector<KeepIndexSet> keep{KeepIndexSet({0, 4, 8}), KeepIndexSet({1, 2, 3}), KeepIndexSet({5, 6, 7})};
    compact(pool, seq, keep);
    const auto expect = gather_cache<double>(dense, keep);
    const auto got = read_sequence(pool, seq.table);
    const MatrixXd q = MatrixXd::Random(3, 4);
    const auto v = verify_compaction(got, expect, q);
    EXPECT_TRUE(v) << v.diagnostic;
    EXPECT_EQ(v.max_entry_diff, 0.0);
}

TEST(Compact, NeedsOnlyTheCompactBlockCount) {
    fuzz::Rng rng(89);
    // 10 tokens in 5 blocks of 2; keeping 3 needs 2 fresh blocks
    BlockPool tight(6, 2, 1, 2);
    PagedSequence seq{0, {}, 0};
    fill(tight, seq, 10, rng);
    EXPECT_THROW(tight.allocate(1, 2), AllocationError);
    const std::vector<KeepIndexSet> keep{KeepIndexSet({1, 5, 9})};
    const auto before = seq.table.blocks;
    EXPECT_THROW(compact(tight, seq, keep), AllocationError);
    EXPECT_EQ(seq.table.blocks, before);
    EXPECT_EQ(seq.table.length, 10);
    EXPECT_TRUE(tight.conserved());

    BlockPool exact(7, 2, 1, 2);
    PagedSequence seq2{0, {}, 0};
    fill(exact, seq2, 10, rng);
    compact(exact, seq2, keep);
    EXPECT_EQ(exact.allocated_blocks(), 2);
    EXPECT_EQ(exact.free_blocks(), 5);
    EXPECT_TRUE(exact.conserved());
}

TEST(Compact, UnequalKeepSizesAreRejectedWithoutLeaks) {
    fuzz::Rng rng(97);
    BlockPool pool(12, 2, 2, 2);
    PagedSequence seq{0, {}, 0};
    fill(pool, seq, 8, rng);
    const Index allocated = pool.allocated_blocks();
    const std::vector<KeepIndexSet> keep{KeepIndexSet({0, 1}), KeepIndexSet({0, 1, 2})};
    EXPECT_THROW(compact(pool, seq, keep), ContractViolation);
    EXPECT_EQ(pool.allocated_blocks(), allocated);
    EXPECT_TRUE(pool.conserved());
}

TEST(Compact, SecondIdentityCompactionIsANoOp) {
    fuzz::Rng rng(101);
    BlockPool pool(20, 4, 2, 3);
    PagedSequence seq{0, {}, 0};
    fill(pool, seq, 17, rng);
    const auto keep = random_keeps(rng, 2, 17, 7);
    compact(pool, seq, keep);
    const auto once = read_sequence(pool, seq.table);
    const std::vector<KeepIndexSet> all(2, KeepIndexSet::all(7));
    compact(pool, seq, all);
    const auto twice = read_sequence(pool, seq.table);
    for (std::size_t h = 0; h < 2; ++h) {
        EXPECT_EQ(once[h].keys, twice[h].keys);
        EXPECT_EQ(once[h].values, twice[h].values);
    }
}

TEST(Verify, DetectsSingleEntryPerturbation) {
    fuzz::Rng rng(103);
    BlockPool pool(10, 4, 2, 3);
    PagedSequence seq{0, {}, 0};
    const auto dense = fill(pool, seq, 12, rng);
    const auto keep = random_keeps(rng, 2, 12, 5);
    compact(pool, seq, keep);
    auto got = read_sequence(pool, seq.table);
    const auto expect = gather_cache<double>(dense, keep);
    const MatrixXd q = MatrixXd::Random(2, 3);
    ASSERT_TRUE(verify_compaction(got, expect, q));
    got[1].values(3, 2) += 1e-3;
    const auto v = verify_compaction(got, expect, q);
    EXPECT_FALSE(v);
    EXPECT_FALSE(v.diagnostic.empty());
    got[1].values(3, 2) -= 1e-3;
    got[0].keys.conservativeResize(4, 3);
    EXPECT_FALSE(verify_compaction(got, expect, q));
}

// Random lengths, keep sizes and block sizes against the dense gather, with an interleaved second request.
TEST(Compact, MatchesDenseGatherOnRandomCases) {
    fuzz::Rng rng(107);
    for (int trial = 0; trial < 300; ++trial) {
        const Index heads = fuzz::uniform_int(rng, 1, 4);
        const Index dim = fuzz::uniform_int(rng, 1, 6);
        const Index bs = fuzz::uniform_int(rng, 1, 8);
        const Index T = fuzz::uniform_int(rng, 1, 60);
        const Index n = fuzz::uniform_int(rng, 1, T);
        BlockPool pool(2 * ((T + bs - 1) / bs) + 3, bs, heads, dim);
        const auto other = pool.allocate(9, fuzz::uniform_int(rng, 0, 3));
        PagedSequence seq{0, {}, 0};
        const auto dense = fill(pool, seq, T, rng);
        const auto keep = random_keeps(rng, heads, T, n);
        compact(pool, seq, keep);
        const MatrixXd q = MatrixXd::Random(heads, dim);
        const auto v = verify_compaction(read_sequence(pool, seq.table), gather_cache<double>(dense, keep), q);
        ASSERT_TRUE(v) << v.diagnostic;
        ASSERT_TRUE(pool.conserved());
        ASSERT_EQ(pool.allocated_blocks(), static_cast<Index>(seq.table.blocks.size() + other.size()));
        for (BlockId b : other) ASSERT_EQ(pool.owner(b), 9);
    }
}

TEST(CompactCheck, PassesAndDetectsCorruption) {
    CompactCheckOptions opts;
    opts.cases = 200;
    EXPECT_TRUE(compact_check(opts).all_passed());
    opts.max_len = 1;
    EXPECT_TRUE(compact_check(opts).all_passed());
    opts.max_len = 40;
    opts.corrupt = true;
    const auto r = compact_check(opts);
    EXPECT_EQ(r.failed, opts.cases);
    EXPECT_FALSE(r.first_failure.empty());
}
