// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amskv/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace amskv {

/**
 * Recent attention rows for one (batch, head). Row r is the attention
 * distribution of one decoding query over the cache; because of the causal
 * mask it only observes positions [0, visible[r]). Entries past `visible[r]`
 * are ignored.
 */
template <typename Scalar>
struct UsageWindow {
    Matrix<Scalar> attention;    ///< [rows x T]
    std::vector<Index> visible;  ///< non-decreasing, each in [1, T]

    Index num_rows() const noexcept { return attention.rows(); }
    Index length() const noexcept { return attention.cols(); }

    /// Window whose rows all observe the whole cache.
    static UsageWindow fully_visible(Matrix<Scalar> rows) {
        UsageWindow w;
        w.visible.assign(static_cast<std::size_t>(rows.rows()), rows.cols());
        w.attention = std::move(rows);
        return w;
    }

    void validate(Scalar tol = Scalar(1e-6)) const {
        AMSKV_EXPECT(static_cast<Index>(visible.size()) == attention.rows(), "one visibility bound per row");
        for (Index r = 0; r < attention.rows(); ++r) {
            const Index v = visible[static_cast<std::size_t>(r)];
            AMSKV_EXPECT(v >= 1 && v <= attention.cols(), "row visibility out of range");
            auto seen = attention.row(r).head(v);
            AMSKV_EXPECT((seen.array() >= Scalar(0)).all(), "attention rows must be non-negative");
            AMSKV_EXPECT(std::abs(seen.sum() - Scalar(1)) <= tol, "attention rows must sum to one");
        }
    }
};

/**
 * Mean attention paid to each cache position by the last `window` rows.
 * A row that cannot see position t contributes the largest observed entry of
 * the used rows instead, so freshly generated tokens are not underestimated.
 */
template <typename Scalar>
Vector<Scalar> aggregate_usage(const UsageWindow<Scalar>& w, Index window, OpCounters* ops = nullptr) {
    if (w.num_rows() == 0) throw UsageError("no usage evidence");
    AMSKV_EXPECT(window >= 1, "usage window must be >= 1");
    AMSKV_EXPECT(static_cast<Index>(w.visible.size()) == w.num_rows(), "one visibility bound per row");

    const Index T = w.length();
    const Index used = std::min(window, w.num_rows());
    const Index first = w.num_rows() - used;

    Vector<Scalar> sum = Vector<Scalar>::Zero(T);
    Vector<Scalar> missing = Vector<Scalar>::Zero(T);
    Scalar peak = -std::numeric_limits<Scalar>::infinity();
    for (Index r = first; r < w.num_rows(); ++r) {
        const Index v = w.visible[static_cast<std::size_t>(r)];
        AMSKV_EXPECT(v >= 1 && v <= T, "row visibility out of range");
        auto seen = w.attention.row(r).head(v).transpose();
        sum.head(v) += seen;
        missing.tail(T - v).array() += Scalar(1);
        peak = std::max(peak, seen.maxCoeff());
    }
    if (ops) ops->mass_ops += static_cast<std::uint64_t>(used * T);
    return (sum + missing * peak) / static_cast<Scalar>(used);
}

/**
 * Centered moving average with an odd kernel. Near the ends the window
 * shrinks to the positions that exist.
 */
template <typename Derived>
Vector<typename Derived::Scalar> smooth(const Eigen::MatrixBase<Derived>& u, Index kernel, OpCounters* ops = nullptr) {
    using Scalar = typename Derived::Scalar;
    if (kernel < 1 || kernel % 2 == 0) throw ConfigError("smoothing kernel must be odd and >= 1");
    const Index T = u.size();
    Vector<Scalar> out(T);
    if (kernel == 1) {
        out = u;
        return out;
    }
    const Index half = kernel / 2;
    for (Index t = 0; t < T; ++t) {
        const Index lo = std::max<Index>(0, t - half);
        const Index hi = std::min<Index>(T, t + half + 1);
        out(t) = u.segment(lo, hi - lo).sum() / static_cast<Scalar>(hi - lo);
    }
    if (ops) ops->mass_ops += static_cast<std::uint64_t>(T * kernel);
    return out;
}

/// m_i = (max(u_i, 0) + eps) / sum_v (max(u_v, 0) + eps).
template <typename Derived>
Vector<typename Derived::Scalar> normalize_mass(const Eigen::MatrixBase<Derived>& u, typename Derived::Scalar eps,
                                                OpCounters* ops = nullptr) {
    using Scalar = typename Derived::Scalar;
    AMSKV_EXPECT(eps > Scalar(0), "epsilon must be positive");
    AMSKV_EXPECT(u.size() >= 1, "mass needs at least one position");
    Vector<Scalar> num = (u.array().max(Scalar(0)) + eps).matrix();
    if (ops) ops->mass_ops += static_cast<std::uint64_t>(u.size());
    return num / num.sum();
}

/// Divides by the sum; the input must have a positive total.
template <typename Derived>
Vector<typename Derived::Scalar> normalize(const Eigen::MatrixBase<Derived>& v) {
    const auto total = v.sum();
    AMSKV_EXPECT(total > 0, "cannot normalize a vector with non-positive total");
    return v / total;
}

/**
 * Decayed per-(layer, head) accumulation of past mass. At each event the
 * credit absorbs the current mass and is mixed back into it, which damps
 * event-to-event jitter in segments and quotas.
 */
class EmaCreditStore {
public:
    EmaCreditStore(Index layers, Index heads, double decay, double mix, bool enabled = true);

    Index layers() const noexcept { return m_layers; }
    Index heads() const noexcept { return m_heads; }
    bool enabled() const noexcept { return m_enabled; }

    /// Empty until the first event for that head.
    const VectorXd& credit(Index layer, Index head) const;
    void set_credit(Index layer, Index head, VectorXd credit);

    /**
     * c <- decay * c + (1 - decay) * m_cur, then returns
     * normalize(mix * m_cur + (1 - mix) * normalize(c)). When disabled the
     * input is returned and the credit is left alone. An empty credit starts
     * at zero.
     */
    VectorXd update_and_mix(Index layer, Index head, const VectorXd& m_cur, OpCounters* ops = nullptr);

    /// Gathers credit by `keep`; positions [|keep|, new_len) start at zero.
    void remap(Index layer, Index head, std::span<const Index> keep, Index new_len);

private:
    std::size_t slot(Index layer, Index head) const;

    Index m_layers;
    Index m_heads;
    double m_decay;
    double m_mix;
    bool m_enabled;
    std::vector<VectorXd> m_credit;
};

}  // namespace amskv
