// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/sim/workload.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace amskv;
using namespace amskv::sim;

namespace {

// Emits `n` tokens and returns the attention of the last one in head 0.
VectorXd attention_after(AttentionSource& src, Index n) {
    std::vector<TokenId> ids;
    MatrixXd keys(0, src.head_dim()), k, v;
    VectorXd row;
    for (Index t = 0; t < n; ++t) {
        src.emit_token(t, k, v);
        ids.push_back(t);
        keys.conservativeResize(t + 1, Eigen::NoChange);
        keys.row(t) = k.row(0);
        row = src.attention_row(0, ids, keys);
    }
    return row;
}

}  // namespace

TEST(Rng, DeterministicAndInRange) {
    Rng a(7), b(7), c(8);
    std::vector<std::uint64_t> xa, xb, xc;
    for (int i = 0; i < 16; ++i) {
        xa.push_back(a.next());
        xb.push_back(b.next());
        xc.push_back(c.next());
    }
    EXPECT_EQ(xa, xb);
    EXPECT_NE(xa, xc);
    for (int i = 0; i < 10000; ++i) {
        const double u = a.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        ASSERT_LT(a.below(5), 5u);
    }
}

TEST(Workload, ParseRoundTrip) {
    for (auto k : {WorkloadKind::uniform, WorkloadKind::heavy_hitter, WorkloadKind::drifting_focus,
                   WorkloadKind::low_region_adversarial, WorkloadKind::toy})
        EXPECT_EQ(parse_workload(to_string(k)), k);
    EXPECT_THROW(parse_workload("needle"), ConfigError);
}

TEST(Workload, RowsAreDistributions) {
    for (auto k : {WorkloadKind::uniform, WorkloadKind::heavy_hitter, WorkloadKind::drifting_focus,
                   WorkloadKind::low_region_adversarial, WorkloadKind::toy}) {
        WorkloadSpec spec;
        spec.kind = k;
        spec.steps = 300;
        auto src = make_source(spec);
        const VectorXd row = attention_after(*src, 300);
        ASSERT_EQ(row.size(), 300);
        EXPECT_NEAR(row.sum(), 1.0, 1e-12) << to_string(k);
        EXPECT_TRUE((row.array() > 0.0).all()) << to_string(k);
    }
}

TEST(Workload, SameSeedSameStream) {
    WorkloadSpec spec;
    spec.kind = WorkloadKind::heavy_hitter;
    spec.steps = 200;
    spec.seed = 3;
    auto a = make_source(spec);
    auto b = make_source(spec);
    EXPECT_EQ(attention_after(*a, 200), attention_after(*b, 200));
    spec.seed = 4;
    auto c = make_source(spec);
    auto d = make_source(WorkloadSpec{spec.kind, 200, 3});
    EXPECT_NE(attention_after(*c, 200), attention_after(*d, 200));
}

TEST(Workload, ColdRegionIsStrictlyLowest) {
    WorkloadSpec spec;
    spec.kind = WorkloadKind::low_region_adversarial;
    spec.steps = 400;
    SyntheticWorkload src(spec);
    const VectorXd row = attention_after(src, 400);
    const VectorXd cold = row.segment(spec.cold_start, spec.cold_span);
    double warm_min = std::numeric_limits<double>::infinity();
    for (Index p = 0; p < 400; ++p)
        if (p < spec.cold_start || p >= spec.cold_start + spec.cold_span) warm_min = std::min(warm_min, row(p));
    EXPECT_LT(cold.maxCoeff(), warm_min);
}

TEST(Workload, HeavyHittersDominate) {
    WorkloadSpec spec;
    spec.kind = WorkloadKind::heavy_hitter;
    spec.steps = 512;
    SyntheticWorkload src(spec);
    attention_after(src, 512);
    Index hitters = 0;
    for (TokenId id = 0; id < 512; ++id) hitters += src.salience(0, id, 511) > 5.0;
    // hitter ids are drawn with replacement, so a collision may merge two
    EXPECT_LE(hitters, spec.hitter_count);
    EXPECT_GE(hitters, spec.hitter_count - 4);
}

TEST(Workload, FocusFollowsTheQuery) {
    WorkloadSpec spec;
    spec.steps = 1000;
    SyntheticWorkload src(spec);
    attention_after(src, 1000);
    // the bump sits at drift_rate * query = 400 for query 800
    EXPECT_GT(src.salience(0, 400, 800) / src.salience(0, 400, 100), 1.5);
}

TEST(Workload, RejectsBadParameters) {
    WorkloadSpec spec;
    spec.cold_factor = 0.0;
    spec.kind = WorkloadKind::low_region_adversarial;
    EXPECT_THROW(SyntheticWorkload{spec}, ConfigError);
}
