// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amskv/selector.hpp"
#include "amskv/types.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace amskv {

/// Keys and values of one KV head, one row per cache position.
template <typename Scalar>
struct HeadKv {
    Matrix<Scalar> keys;    ///< [T x D]
    Matrix<Scalar> values;  ///< [T x D]

    Index length() const noexcept { return keys.rows(); }
};

/// Dense per-head cache of one request.
template <typename Scalar>
using DenseKv = std::vector<HeadKv<Scalar>>;

template <typename Scalar>
Matrix<Scalar> gather_rows(const Matrix<Scalar>& src, std::span<const Index> rows) {
    Matrix<Scalar> out(static_cast<Index>(rows.size()), src.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        AMSKV_EXPECT(rows[i] >= 0 && rows[i] < src.rows(), "gather index out of range");
        out.row(static_cast<Index>(i)) = src.row(rows[i]);
    }
    return out;
}

/// Head-wise gather along the sequence axis: head h keeps rows keep[h].
template <typename Scalar>
DenseKv<Scalar> gather_cache(const DenseKv<Scalar>& cache, std::span<const KeepIndexSet> keep, OpCounters* ops = nullptr) {
    AMSKV_EXPECT(keep.size() == cache.size(), "one keep set per head");
    DenseKv<Scalar> out(cache.size());
    for (std::size_t h = 0; h < cache.size(); ++h) {
        out[h].keys = gather_rows(cache[h].keys, keep[h].indices());
        out[h].values = gather_rows(cache[h].values, keep[h].indices());
        if (ops) ops->gather_ops += static_cast<std::uint64_t>(2 * keep[h].size() * cache[h].keys.cols());
    }
    return out;
}

/// Softmax of the scaled dot products q . k_t / sqrt(D).
template <typename Scalar, typename Derived>
Vector<Scalar> attention_weights(const Eigen::MatrixBase<Derived>& query, const Matrix<Scalar>& keys) {
    AMSKV_EXPECT(keys.rows() >= 1, "attention over an empty cache");
    AMSKV_EXPECT(query.size() == keys.cols(), "query and key dimensions differ");
    const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(keys.cols()));
    Vector<Scalar> logits = (keys * query.derived().template cast<Scalar>()) * scale;
    const Scalar peak = logits.maxCoeff();
    Vector<Scalar> w = (logits.array() - peak).exp().matrix();
    return w / w.sum();
}

/// Single-query attention output over one head.
template <typename Scalar, typename Derived>
Vector<Scalar> attend(const Eigen::MatrixBase<Derived>& query, const HeadKv<Scalar>& head) {
    const Vector<Scalar> w = attention_weights<Scalar>(query, head.keys);
    return head.values.transpose() * w;
}

}  // namespace amskv
