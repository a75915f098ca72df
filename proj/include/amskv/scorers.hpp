// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amskv/mass.hpp"
#include "amskv/types.hpp"

#include <string>
#include <string_view>

namespace amskv {

// Token-importance scorers. Each returns one finite score per cache position
// (higher keeps); the selector treats them as black boxes.

enum class ScorerKind { recent, expected, keydiff, constant };

ScorerKind parse_scorer(std::string_view name);
std::string_view to_string(ScorerKind kind);

/// Attention of the most recent query. Positions it cannot see take the row maximum.
template <typename Scalar>
Vector<Scalar> score_recent_attention(const UsageWindow<Scalar>& w) {
    if (w.num_rows() == 0) throw UsageError("no usage evidence");
    const Index T = w.length();
    const Index v = w.visible.back();
    AMSKV_EXPECT(v >= 1 && v <= T, "row visibility out of range");
    auto row = w.attention.row(w.num_rows() - 1);
    Vector<Scalar> g(T);
    g.head(v) = row.head(v).transpose();
    g.tail(T - v).setConstant(row.head(v).maxCoeff());
    return g;
}

/// Stand-in for an expected-attention scorer: windowed mean attention with max padding.
template <typename Scalar>
Vector<Scalar> score_expected_attention_proxy(const UsageWindow<Scalar>& w, Index window) {
    return aggregate_usage(w, window);
}

/// ||k_t - k_{t-1}||_2, with g_0 copied from g_1 (0 for a single key).
template <typename Derived>
Vector<typename Derived::Scalar> score_key_diff(const Eigen::MatrixBase<Derived>& keys) {
    using Scalar = typename Derived::Scalar;
    const Index T = keys.rows();
    Vector<Scalar> g = Vector<Scalar>::Zero(T);
    for (Index t = 1; t < T; ++t) g(t) = (keys.row(t) - keys.row(t - 1)).norm();
    if (T >= 2) g(0) = g(1);
    return g;
}

template <typename Scalar = double>
Vector<Scalar> score_constant(Index T, Scalar value) {
    AMSKV_EXPECT(T >= 0, "score length must be non-negative");
    return Vector<Scalar>::Constant(T, value);
}

}  // namespace amskv
