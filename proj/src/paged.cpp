// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/paged.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace amskv {

BlockPool::BlockPool(Index num_blocks, Index block_size, Index heads, Index head_dim)
    : m_block_size(block_size), m_heads(heads), m_head_dim(head_dim),
      m_owner(static_cast<std::size_t>(num_blocks), -1) {
    AMSKV_EXPECT(num_blocks >= 0 && block_size >= 1 && heads >= 1 && head_dim >= 1, "invalid block pool shape");
    for (Index b = num_blocks - 1; b >= 0; --b) m_free.push_back(static_cast<BlockId>(b));
    for (Index h = 0; h < heads; ++h) {
        m_keys.emplace_back(Matrix<double>::Zero(num_blocks * block_size, head_dim));
        m_values.emplace_back(Matrix<double>::Zero(num_blocks * block_size, head_dim));
    }
}

RequestId BlockPool::owner(BlockId b) const {
    AMSKV_EXPECT(b >= 0 && b < total_blocks(), "block id out of range");
    return m_owner[static_cast<std::size_t>(b)];
}

std::vector<BlockId> BlockPool::allocate(RequestId owner, Index n) {
    AMSKV_EXPECT(owner >= 0, "request ids must be non-negative");
    AMSKV_EXPECT(n >= 0, "cannot allocate a negative block count");
    if (n > free_blocks())
        throw AllocationError("block pool exhausted: need " + std::to_string(n) + ", have " + std::to_string(free_blocks()));
    std::vector<BlockId> out;
    out.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const BlockId b = m_free.back();
        m_free.pop_back();
        m_owner[static_cast<std::size_t>(b)] = owner;
        out.push_back(b);
    }
    return out;
}

void BlockPool::release(RequestId owner, std::span<const BlockId> blocks) {
    for (BlockId b : blocks) AMSKV_EXPECT(this->owner(b) == owner, "releasing a block not owned by the request");
    for (BlockId b : blocks) {
        m_owner[static_cast<std::size_t>(b)] = -1;
        m_free.push_back(b);
    }
    std::sort(m_free.begin(), m_free.end(), std::greater<>());
}

bool BlockPool::conserved() const {
    Index owned = 0;
    for (RequestId o : m_owner) owned += (o >= 0);
    if (owned + free_blocks() != total_blocks()) return false;
    for (BlockId b : m_free)
        if (m_owner[static_cast<std::size_t>(b)] != -1) return false;
    auto sorted = m_free;
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

Index resolve_slot(const BlockTable& table, Index block_size, Index p) {
    AMSKV_EXPECT(p >= 0 && p < table.length, "logical position beyond sequence length");
    const auto blk = static_cast<std::size_t>(p / block_size);
    AMSKV_EXPECT(blk < table.blocks.size(), "block table shorter than its length");
    return static_cast<Index>(table.blocks[blk]) * block_size + p % block_size;
}

void append_token(BlockPool& pool, PagedSequence& seq, const MatrixXd& keys, const MatrixXd& values) {
    AMSKV_EXPECT(keys.rows() == pool.heads() && keys.cols() == pool.head_dim(), "keys must be [heads x D]");
    AMSKV_EXPECT(values.rows() == pool.heads() && values.cols() == pool.head_dim(), "values must be [heads x D]");
    const Index bs = pool.block_size();
    if (seq.table.length == static_cast<Index>(seq.table.blocks.size()) * bs) {
        const auto fresh = pool.allocate(seq.id, 1);
        seq.table.blocks.push_back(fresh.front());
    }
    ++seq.table.length;
    const Index slot = resolve_slot(seq.table, bs, seq.table.length - 1);
    for (Index h = 0; h < pool.heads(); ++h) {
        pool.keys(h).row(slot) = keys.row(h);
        pool.values(h).row(slot) = values.row(h);
    }
    ++seq.next_position;
}

SlotMapping plan_compaction(const BlockTable& old_table, const BlockTable& new_table, Index block_size,
                            std::span<const KeepIndexSet> keep) {
    SlotMapping map;
    map.dst.reserve(static_cast<std::size_t>(new_table.length));
    for (Index t = 0; t < new_table.length; ++t) map.dst.push_back(resolve_slot(new_table, block_size, t));
    for (const auto& k : keep) {
        AMSKV_EXPECT(k.size() == new_table.length, "every head must keep exactly the compact length");
        std::vector<Index> src;
        src.reserve(static_cast<std::size_t>(k.size()));
        for (Index p : k) src.push_back(resolve_slot(old_table, block_size, p));
        map.src.push_back(std::move(src));
    }
    return map;
}

SlotMapping compact(BlockPool& pool, PagedSequence& seq, std::span<const KeepIndexSet> keep) {
    AMSKV_EXPECT(static_cast<Index>(keep.size()) == pool.heads(), "one keep set per head");
    AMSKV_EXPECT(!keep.empty() && !keep.front().empty(), "compaction needs a non-empty keep set");
    const Index n = keep.front().size();
    const Index bs = pool.block_size();

    BlockTable fresh;
    fresh.blocks = pool.allocate(seq.id, (n + bs - 1) / bs);
    fresh.length = n;

    SlotMapping map;
    try {
        map = plan_compaction(seq.table, fresh, bs, keep);
    } catch (...) {
        pool.release(seq.id, fresh.blocks);
        throw;
    }
    // Fresh blocks never alias the old ones, so the copy order is irrelevant.
    for (Index h = 0; h < pool.heads(); ++h) {
        const auto& src = map.src[static_cast<std::size_t>(h)];
        for (Index t = 0; t < n; ++t) {
            const auto u = static_cast<std::size_t>(t);
            pool.keys(h).row(map.dst[u]) = pool.keys(h).row(src[u]);
            pool.values(h).row(map.dst[u]) = pool.values(h).row(src[u]);
        }
    }
    pool.release(seq.id, seq.table.blocks);
    seq.table = std::move(fresh);
    return map;
}

DenseKv<double> read_sequence(const BlockPool& pool, const BlockTable& table) {
    DenseKv<double> out(static_cast<std::size_t>(pool.heads()));
    for (Index h = 0; h < pool.heads(); ++h) {
        auto& head = out[static_cast<std::size_t>(h)];
        head.keys.resize(table.length, pool.head_dim());
        head.values.resize(table.length, pool.head_dim());
        for (Index p = 0; p < table.length; ++p) {
            const Index slot = resolve_slot(table, pool.block_size(), p);
            head.keys.row(p) = pool.keys(h).row(slot);
            head.values.row(p) = pool.values(h).row(slot);
        }
    }
    return out;
}

VerifyResult verify_compaction(const DenseKv<double>& compacted, const DenseKv<double>& dense, const MatrixXd& queries,
                               double tol) {
    VerifyResult r;
    if (compacted.size() != dense.size() || static_cast<Index>(dense.size()) != queries.rows()) {
        r.diagnostic = "head count mismatch";
        return r;
    }
    for (std::size_t h = 0; h < dense.size(); ++h) {
        const auto& a = compacted[h];
        const auto& b = dense[h];
        if (a.keys.rows() != b.keys.rows() || a.keys.cols() != b.keys.cols() || a.values.rows() != b.values.rows() ||
            a.values.cols() != b.values.cols()) {
            std::ostringstream os;
            os << "shape mismatch in head " << h << ": " << a.keys.rows() << "x" << a.keys.cols() << " vs "
               << b.keys.rows() << "x" << b.keys.cols();
            r.diagnostic = os.str();
            return r;
        }
        if (b.keys.rows() == 0) continue;
        r.max_entry_diff = std::max({r.max_entry_diff, (a.keys - b.keys).cwiseAbs().maxCoeff(),
                                     (a.values - b.values).cwiseAbs().maxCoeff()});
        const VectorXd q = queries.row(static_cast<Index>(h)).transpose();
        const VectorXd out_a = attend(q, a);
        const VectorXd out_b = attend(q, b);
        r.max_output_diff = std::max(r.max_output_diff, (out_a - out_b).cwiseAbs().maxCoeff());
    }
    r.ok = r.max_entry_diff <= tol && r.max_output_diff <= tol;
    if (!r.ok) {
        std::ostringstream os;
        os << "max entry diff " << r.max_entry_diff << ", max attention diff " << r.max_output_diff;
        r.diagnostic = os.str();
    }
    return r;
}

CompactCheckReport compact_check(const CompactCheckOptions& opts) {
    AMSKV_EXPECT(opts.cases >= 0 && opts.max_len >= 1, "invalid compact-check options");
    std::mt19937_64 rng(opts.seed);
    auto uniform_int = [&](Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); };
    std::normal_distribution<double> normal(0.0, 1.0);
    auto random_matrix = [&](Index r, Index c) {
        MatrixXd m(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j) m(i, j) = normal(rng);
        return m;
    };
    constexpr Index block_sizes[] = {1, 2, 3, 4, 8, 16};

    CompactCheckReport report;
    for (Index c = 0; c < opts.cases; ++c) {
        const Index heads = uniform_int(1, 4);
        const Index dim = uniform_int(1, 8);
        const Index bs = block_sizes[uniform_int(0, 5)];
        const Index T = uniform_int(1, opts.max_len);
        const Index n = uniform_int(1, T);
        const Index other_cap = uniform_int(0, 4);
        BlockPool pool((T + bs - 1) / bs + (n + bs - 1) / bs + other_cap, bs, heads, dim);

        // Another request grabs and returns blocks while ours grows, fragmenting the pool.
        const RequestId other = 1;
        std::vector<BlockId> other_blocks;
        PagedSequence seq{0, {}, 0};
        DenseKv<double> original(static_cast<std::size_t>(heads));
        for (auto& h : original) {
            h.keys.resize(T, dim);
            h.values.resize(T, dim);
        }
        bool conserved = true;
        for (Index t = 0; t < T; ++t) {
            const Index op = uniform_int(0, 9);
            if (op == 0 && static_cast<Index>(other_blocks.size()) < other_cap) {
                auto got = pool.allocate(other, 1);
                other_blocks.push_back(got.front());
            } else if (op == 1 && !other_blocks.empty()) {
                const auto at = static_cast<std::size_t>(uniform_int(0, static_cast<Index>(other_blocks.size()) - 1));
                pool.release(other, std::span<const BlockId>(&other_blocks[at], 1));
                other_blocks.erase(other_blocks.begin() + static_cast<std::ptrdiff_t>(at));
            }
            const MatrixXd k = random_matrix(heads, dim);
            const MatrixXd v = random_matrix(heads, dim);
            append_token(pool, seq, k, v);
            for (Index h = 0; h < heads; ++h) {
                original[static_cast<std::size_t>(h)].keys.row(t) = k.row(h);
                original[static_cast<std::size_t>(h)].values.row(t) = v.row(h);
            }
            conserved = conserved && pool.conserved();
        }

        std::vector<KeepIndexSet> keep;
        for (Index h = 0; h < heads; ++h) {
            std::vector<Index> all(static_cast<std::size_t>(T));
            for (Index p = 0; p < T; ++p) all[static_cast<std::size_t>(p)] = p;
            std::shuffle(all.begin(), all.end(), rng);
            all.resize(static_cast<std::size_t>(n));
            keep.emplace_back(std::move(all));
        }

        const Index position_before = seq.next_position;
        compact(pool, seq, keep);
        conserved = conserved && pool.conserved() && seq.next_position == position_before &&
                    pool.allocated_blocks() == static_cast<Index>(seq.table.blocks.size() + other_blocks.size());

        if (opts.corrupt) {
            const Index h = uniform_int(0, heads - 1);
            const Index slot = resolve_slot(seq.table, bs, uniform_int(0, n - 1));
            pool.keys(h)(slot, uniform_int(0, dim - 1)) += 1.0;
        }

        const auto compacted = read_sequence(pool, seq.table);
        const auto dense = gather_cache(original, std::span<const KeepIndexSet>(keep));
        const auto verdict = verify_compaction(compacted, dense, random_matrix(heads, dim));

        pool.release(seq.id, seq.table.blocks);
        pool.release(other, other_blocks);
        conserved = conserved && pool.conserved() && pool.free_blocks() == pool.total_blocks();

        if (verdict.ok)
            ++report.passed;
        else {
            ++report.failed;
            if (report.first_failure.empty())
                report.first_failure = "case " + std::to_string(c) + ": " + verdict.diagnostic;
        }
        if (!conserved) ++report.conservation_failures;
    }
    return report;
}

}  // namespace amskv
