// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

// Random instance generators shared by the unit and acceptance suites.

#pragma once

#include "amskv/config.hpp"
#include "amskv/mass.hpp"
#include "amskv/types.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace amskv::fuzz {

using Rng = std::mt19937_64;

inline Index uniform_int(Rng& rng, Index lo, Index hi) {
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

/**
 * Non-negative vector with a mix of shapes: flat, heavy-tailed, sparse
 * spikes, a cold block and exact ties. Not normalized.
 */
inline VectorXd random_usage(Rng& rng, Index T) {
    VectorXd u(T);
    switch (uniform_int(rng, 0, 4)) {
        case 0:
            for (Index t = 0; t < T; ++t) u(t) = uniform_real(rng, 0.0, 1.0);
            break;
        case 1: {
            std::exponential_distribution<double> e(1.0);
            for (Index t = 0; t < T; ++t) u(t) = std::pow(e(rng), 3.0);
            break;
        }
        case 2:
            u.setZero();
            for (Index k = uniform_int(rng, 0, std::max<Index>(1, T / 8)); k > 0; --k)
                u(uniform_int(rng, 0, T - 1)) = uniform_real(rng, 0.1, 10.0);
            break;
        case 3: {
            for (Index t = 0; t < T; ++t) u(t) = uniform_real(rng, 0.5, 1.5);
            const Index a = uniform_int(rng, 0, T - 1);
            const Index b = std::min(T, a + uniform_int(rng, 1, std::max<Index>(1, T / 3)));
            u.segment(a, b - a) *= 1e-4;
            break;
        }
        default:
            // quantized values produce exact ties
            for (Index t = 0; t < T; ++t) u(t) = static_cast<double>(uniform_int(rng, 0, 3));
            break;
    }
    return u;
}

/// A probability vector over T positions.
inline VectorXd random_mass(Rng& rng, Index T) {
    return normalize_mass(random_usage(rng, T), 1e-6);
}

/// Attention rows over a growing cache: row r sees the first visible[r] positions, the last row sees all T.
inline UsageWindow<double> random_window(Rng& rng, Index T, Index rows) {
    UsageWindow<double> w;
    w.attention = Matrix<double>::Zero(rows, T);
    w.visible.resize(static_cast<std::size_t>(rows));
    Index v = T;
    for (Index r = rows - 1; r >= 0; --r) {
        w.visible[static_cast<std::size_t>(r)] = v;
        if (coin(rng, 0.7)) v = std::max<Index>(1, v - 1);
    }
    for (Index r = 0; r < rows; ++r) {
        const Index vis = w.visible[static_cast<std::size_t>(r)];
        const VectorXd row = random_usage(rng, vis).array() + 1e-9;
        w.attention.row(r).head(vis) = (row / row.sum()).transpose();
    }
    return w;
}

/// A valid config with every knob randomized; t_keep is left to the caller.
inline CompressionConfig random_config(Rng& rng) {
    CompressionConfig c = default_config();
    c.segment_mass = uniform_real(rng, 0.01, 1.0);
    c.min_seg_len = uniform_int(rng, 1, 24);
    c.max_seg_len = c.min_seg_len + uniform_int(rng, 0, 64);
    c.min_quota = uniform_int(rng, 0, 3);
    c.n_sink = uniform_int(rng, 0, 8);
    c.n_last = uniform_int(rng, 0, 16);
    c.ema_decay = uniform_real(rng, 0.05, 0.95);
    c.mass_mix = uniform_real(rng, 0.0, 1.0);
    c.window = uniform_int(rng, 1, 64);
    c.hs_buffer = c.window + uniform_int(rng, 0, 64);
    c.smooth_kernel = 2 * uniform_int(rng, 0, 3) + 1;
    c.chunk_len = uniform_int(rng, 1, 32);
    c.ema_on = coin(rng);
    c.mass_weighted_quotas_on = coin(rng, 0.8);
    c.fixed_length_segments_on = coin(rng, 0.2);
    return c;
}

}  // namespace amskv::fuzz
