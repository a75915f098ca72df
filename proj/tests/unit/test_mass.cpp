// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/mass.hpp"

#include "fuzz.hpp"

#include <gtest/gtest.h>

using namespace amskv;

namespace {

VectorXd vec(std::initializer_list<double> v) {
    VectorXd out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

}  // namespace

TEST(AggregateUsage, AveragesLastWindowWithCausalMaxPadding) {
    UsageWindow<double> w;
    w.attention = MatrixXd(3, 3);
    w.attention << 0.9, 0.1, 0.0,  // dropped: outside the window
        0.6, 0.4, 0.0,             // sees 2 positions
        0.2, 0.3, 0.5;
    w.visible = {2, 2, 3};
    const VectorXd u = aggregate_usage(w, 2);
    // peak over observed entries of the used rows is 0.6
    EXPECT_NEAR(u(0), (0.6 + 0.2) / 2, 1e-15);
    EXPECT_NEAR(u(1), (0.4 + 0.3) / 2, 1e-15);
    EXPECT_NEAR(u(2), (0.6 + 0.5) / 2, 1e-15);
}

TEST(AggregateUsage, MissingObservationTakesTheWindowPeak) {
    UsageWindow<double> w;
    w.attention = MatrixXd(2, 3);
    w.attention << 0.5, 0.5, 0.0, 0.2, 0.3, 0.5;
    w.visible = {2, 3};
    const VectorXd u = aggregate_usage(w, 2);
    EXPECT_NEAR(u(0), 0.35, 1e-15);
    EXPECT_NEAR(u(1), 0.4, 1e-15);
    EXPECT_NEAR(u(2), 0.5, 1e-15);
}

TEST(AggregateUsage, EmptyWindowIsUsageError) {
    UsageWindow<double> w;
    w.attention = MatrixXd(0, 4);
    EXPECT_THROW(aggregate_usage(w, 8), UsageError);
}

TEST(AggregateUsage, FullyVisibleIsPlainMean) {
    fuzz::Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        const Index T = fuzz::uniform_int(rng, 1, 40);
        const Index R = fuzz::uniform_int(rng, 1, 10);
        MatrixXd rows(R, T);
        for (Index r = 0; r < R; ++r) rows.row(r) = fuzz::random_mass(rng, T).transpose();
        const auto w = UsageWindow<double>::fully_visible(rows);
        const Index W = fuzz::uniform_int(rng, 1, 12);
        const Index used = std::min(W, R);
        const VectorXd expect = rows.bottomRows(used).colwise().mean().transpose();
        EXPECT_LT((aggregate_usage(w, W) - expect).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(Smooth, CenteredAverageShrinksAtEdges) {
    const VectorXd u = vec({3, 0, 0, 6});
    const VectorXd s = smooth(u, 3);
    EXPECT_DOUBLE_EQ(s(0), 1.5);
    EXPECT_DOUBLE_EQ(s(1), 1.0);
    EXPECT_DOUBLE_EQ(s(2), 2.0);
    EXPECT_DOUBLE_EQ(s(3), 3.0);
    EXPECT_EQ(smooth(u, 1), u);
    EXPECT_THROW(smooth(u, 2), ConfigError);
}

TEST(NormalizeMass, EpsilonFloorAndClip) {
    const VectorXd m = normalize_mass(vec({-1.0, 0.0, 2.0}), 1.0);
    // (0+1, 0+1, 2+1) / 5
    EXPECT_DOUBLE_EQ(m(0), 0.2);
    EXPECT_DOUBLE_EQ(m(1), 0.2);
    EXPECT_DOUBLE_EQ(m(2), 0.6);
}

TEST(NormalizeMass, VanishingEpsilonIsPlainRatio) {
    const VectorXd m = normalize_mass(vec({1.0, 3.0}), 1e-15);
    EXPECT_NEAR(m(0), 0.25, 1e-14);
    EXPECT_NEAR(m(1), 0.75, 1e-14);
}

TEST(NormalizeMass, AllZeroUsageIsUniform) {
    const VectorXd m = normalize_mass(VectorXd::Zero(5), 1e-6);
    for (Index i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(m(i), 0.2);
}

// Sums to one, strictly positive, and preserves the order of the clipped usage.
TEST(NormalizeMass, PropertiesOnRandomInputs) {
    fuzz::Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const Index T = fuzz::uniform_int(rng, 1, 200);
        VectorXd u = fuzz::random_usage(rng, T);
        for (Index t = 0; t < T; ++t)
            if (fuzz::coin(rng, 0.1)) u(t) = -u(t);
        const double eps = std::pow(10.0, fuzz::uniform_real(rng, -9, -1));
        const VectorXd m = normalize_mass(u, eps);
        ASSERT_NEAR(m.sum(), 1.0, 1e-9);
        ASSERT_TRUE((m.array() > 0.0).all());
        const Index a = fuzz::uniform_int(rng, 0, T - 1);
        const Index b = fuzz::uniform_int(rng, 0, T - 1);
        const double ua = std::max(u(a), 0.0), ub = std::max(u(b), 0.0);
        if (ua < ub) ASSERT_LE(m(a), m(b));
        if (ua == ub) ASSERT_EQ(m(a), m(b));
    }
}

TEST(NormalizeMass, WorksInSinglePrecision) {
    Eigen::VectorXf u(3);
    u << 1.0f, 2.0f, 3.0f;
    const Eigen::VectorXf m = normalize_mass(u, 1e-6f);
    EXPECT_NEAR(m.sum(), 1.0f, 1e-6f);
}

TEST(EmaCredit, FirstEventMixesAgainstItsOwnCredit) {
    EmaCreditStore store(1, 1, 0.9, 0.9);
    const VectorXd m = vec({0.5, 0.25, 0.25});
    // c = 0.1 m, normalize(c) = m, so the mix returns m itself
    const VectorXd used = store.update_and_mix(0, 0, m);
    EXPECT_LT((used - m).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((store.credit(0, 0) - 0.1 * m).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(EmaCredit, RecurrenceMatchesHandComputation) {
    EmaCreditStore store(1, 1, 0.5, 0.5);
    const VectorXd m1 = vec({1.0, 0.0});
    const VectorXd m2 = vec({0.0, 1.0});
    store.update_and_mix(0, 0, m1);
    const VectorXd used = store.update_and_mix(0, 0, m2);
    // c = 0.5 * (0.5, 0) + 0.5 * (0, 1) = (0.25, 0.5); normalize -> (1/3, 2/3)
    EXPECT_NEAR(store.credit(0, 0)(0), 0.25, 1e-15);
    EXPECT_NEAR(store.credit(0, 0)(1), 0.5, 1e-15);
    EXPECT_NEAR(used(0), 0.5 * (1.0 / 3.0), 1e-15);
    EXPECT_NEAR(used(1), 0.5 + 0.5 * (2.0 / 3.0), 1e-15);
}

TEST(EmaCredit, MixesDecayedCreditWithCurrentMass) {
    EmaCreditStore store(1, 1, 0.5, 0.5);
    store.set_credit(0, 0, vec({1.0, 0.0}));
    const VectorXd used = store.update_and_mix(0, 0, vec({0.0, 1.0}));
    EXPECT_NEAR(store.credit(0, 0)(0), 0.5, 1e-15);
    EXPECT_NEAR(store.credit(0, 0)(1), 0.5, 1e-15);
    EXPECT_NEAR(used(0), 0.25, 1e-15);
    EXPECT_NEAR(used(1), 0.75, 1e-15);
}

TEST(EmaCredit, FullCurrentWeightIgnoresCredit) {
    fuzz::Rng rng(13);
    EmaCreditStore store(1, 1, 0.9, 1.0);
    for (int i = 0; i < 20; ++i) {
        store.set_credit(0, 0, fuzz::random_mass(rng, 16) * fuzz::uniform_real(rng, 0.1, 5.0));
        const VectorXd m = fuzz::random_mass(rng, 16);
        ASSERT_LT((store.update_and_mix(0, 0, m) - m).cwiseAbs().maxCoeff(), 1e-15);
    }
}

// Stationary mass: the normalized credit approaches m geometrically at rate lambda.
TEST(EmaCredit, StationaryMassConvergesGeometrically) {
    fuzz::Rng rng(19);
    for (double lambda : {0.5, 0.8, 0.9}) {
        EmaCreditStore store(1, 1, lambda, 0.5);
        const VectorXd m = fuzz::random_mass(rng, 40);
        store.set_credit(0, 0, fuzz::random_mass(rng, 40));
        auto gap = [&] {
            const VectorXd c = store.credit(0, 0);
            return (c / c.sum() - m).lpNorm<1>();
        };
        double prev = gap();
        for (int it = 0; it < 50; ++it) {
            store.update_and_mix(0, 0, m);
            const double now = gap();
            ASSERT_LE(now, lambda * prev + 1e-15);
            prev = now;
        }
        if (lambda <= 0.8) EXPECT_LT(prev, 1e-3);
    }
}

TEST(EmaCredit, DisabledIsIdentity) {
    EmaCreditStore store(1, 2, 0.9, 0.5, false);
    const VectorXd m = vec({0.1, 0.9});
    EXPECT_EQ(store.update_and_mix(0, 1, m), m);
    EXPECT_EQ(store.credit(0, 1).size(), 0);
}

TEST(EmaCredit, MisalignedCreditIsUsageError) {
    EmaCreditStore store(1, 1, 0.9, 0.9);
    store.update_and_mix(0, 0, vec({0.5, 0.5}));
    EXPECT_THROW(store.update_and_mix(0, 0, vec({0.2, 0.3, 0.5})), UsageError);
}

TEST(EmaCredit, RemapGathersAndZeroFills) {
    EmaCreditStore store(2, 2, 0.9, 0.9);
    store.set_credit(1, 1, vec({0.1, 0.2, 0.3, 0.4}));
    const std::vector<Index> keep{1, 3};
    store.remap(1, 1, keep, 4);
    EXPECT_EQ(store.credit(1, 1), vec({0.2, 0.4, 0.0, 0.0}));
    store.remap(0, 0, keep, 4);  // empty credit stays empty
    EXPECT_EQ(store.credit(0, 0).size(), 0);
    EXPECT_THROW(store.remap(1, 1, std::vector<Index>{}, 4), ContractViolation);
}

TEST(EmaCredit, MixedMassIsADistribution) {
    fuzz::Rng rng(5);
    EmaCreditStore store(1, 1, 0.8, 0.7);
    Index T = 30;
    for (int event = 0; event < 50; ++event) {
        const VectorXd used = store.update_and_mix(0, 0, fuzz::random_mass(rng, T));
        ASSERT_NEAR(used.sum(), 1.0, 1e-12);
        ASSERT_TRUE((used.array() >= 0.0).all());
        std::vector<Index> keep;
        for (Index p = 0; p < T; ++p)
            if (p == 0 || fuzz::coin(rng)) keep.push_back(p);
        T = static_cast<Index>(keep.size()) + fuzz::uniform_int(rng, 0, 10);
        store.remap(0, 0, keep, T);
    }
}

TEST(EmaCredit, RejectsBadCoefficients) {
    EXPECT_THROW(EmaCreditStore(1, 1, 1.0, 0.5), ConfigError);
    EXPECT_THROW(EmaCreditStore(1, 1, 0.5, 1.5), ConfigError);
}
