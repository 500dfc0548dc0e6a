// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "btq/error.hpp"
#include "btq/path_integral.hpp"
#include "btq/plane.hpp"
#include "btq/rng.hpp"
#include "helpers.hpp"

using namespace btq;
using btq_test::close;
using btq_test::to_pt;

TEST(Bridge, PinnedEndpointsAndUniformTimes) {
    const BridgeSpec spec{{0.5, -1.0}, {2.0, 3.0}, 2.5, 10, 0.7};
    const auto path = sample_bridge(spec, 9);
    ASSERT_EQ(path.points.size(), 11u);
    EXPECT_EQ(path.points.front(), spec.start);
    EXPECT_EQ(path.points.back(), spec.end);
    EXPECT_EQ(path.times.front(), 0.0);
    EXPECT_EQ(path.times.back(), 2.5);
    for (int m = 0; m <= 10; ++m) EXPECT_NEAR(path.times[m], 0.25 * m, 1e-15);
}

TEST(Bridge, SameSeedSamePath) {
    const BridgeSpec spec{{0.0, 0.0}, {1.0, 1.0}, 4.0, 64, 1.0};
    const auto a = sample_bridge(spec, 5), b = sample_bridge(spec, 5), c = sample_bridge(spec, 6);
    EXPECT_EQ(a.points, b.points);
    EXPECT_NE(a.points, c.points);
}

TEST(Bridge, RejectsBadSpecs) {
    EXPECT_THROW(sample_bridge({{0, 0}, {1, 1}, 0.0, 8, 1.0}, 1), Error);
    EXPECT_THROW(sample_bridge({{0, 0}, {1, 1}, 1.0, 1, 1.0}, 1), Error);
    EXPECT_THROW(sample_bridge({{0, 0}, {1, 1}, 1.0, 8, -1.0}, 1), Error);
    EXPECT_THROW(sample_bridge({{NAN, 0}, {1, 1}, 1.0, 8, 1.0}, 1), Error);
}

TEST(Bridge, MomentsMatchBridgeCovariance) {
    const double r = 3.0, hbar = 0.8;
    const BridgeSpec spec{{0.4, -0.2}, {1.6, 0.7}, r, 6, hbar};
    const int n = 40000;
    const int i1 = 2, i2 = 4;  // s = r/3, 2r/3
    double sp[2] = {}, sq[2] = {}, cpp[3] = {}, cqq[3] = {}, cpq = 0.0;
    for (int s = 0; s < n; ++s) {
        const auto path = sample_bridge(spec, derive_seed(77, {s}));
        const auto& a = path.points[i1];
        const auto& b = path.points[i2];
        sp[0] += a.p, sp[1] += b.p, sq[0] += a.q, sq[1] += b.q;
        cpp[0] += a.p * a.p, cpp[1] += a.p * b.p, cpp[2] += b.p * b.p;
        cqq[0] += a.q * a.q, cqq[1] += a.q * b.q, cqq[2] += b.q * b.q;
        cpq += a.p * a.q;
    }
    const double s1 = r / 3, s2 = 2 * r / 3;
    auto mean = [&](double x0, double x1, double s) { return x0 + (s / r) * (x1 - x0); };
    const double v11 = hbar * hbar * (s1 - s1 * s1 / r), v12 = hbar * hbar * (s1 - s1 * s2 / r),
                 v22 = hbar * hbar * (s2 - s2 * s2 / r);
    const double mp1 = mean(0.4, 1.6, s1), mp2 = mean(0.4, 1.6, s2);
    const double mq1 = mean(-0.2, 0.7, s1), mq2 = mean(-0.2, 0.7, s2);
    EXPECT_NEAR(sp[0] / n, mp1, 4.0 * std::sqrt(v11 / n));
    EXPECT_NEAR(sp[1] / n, mp2, 4.0 * std::sqrt(v22 / n));
    EXPECT_NEAR(sq[0] / n, mq1, 4.0 * std::sqrt(v11 / n));
    EXPECT_NEAR(sq[1] / n, mq2, 4.0 * std::sqrt(v22 / n));
    auto cov_tol = [&](double va, double vb, double vab) { return 4.0 * std::sqrt((va * vb + vab * vab) / n); };
    EXPECT_NEAR(cpp[0] / n - mp1 * mp1, v11, cov_tol(v11, v11, v11));
    EXPECT_NEAR(cpp[1] / n - mp1 * mp2, v12, cov_tol(v11, v22, v12));
    EXPECT_NEAR(cpp[2] / n - mp2 * mp2, v22, cov_tol(v22, v22, v22));
    EXPECT_NEAR(cqq[1] / n - mq1 * mq2, v12, cov_tol(v11, v22, v12));
    EXPECT_NEAR(cpq / n - mp1 * mq1, 0.0, cov_tol(v11, v11, 0.0));
}

TEST(Bridge, AreaIsMidpointRule) {
    const BridgeSpec spec{{0.3, 0.1}, {-0.5, 1.2}, 2.0, 40, 1.0};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto path = sample_bridge(spec, seed);
        std::vector<oracle::Pt> pts;
        for (const auto& x : path.points) pts.push_back(to_pt(x));
        EXPECT_NEAR(stratonovich_area(path), oracle::midpoint_area(pts), 1e-12);
    }
    // unit square traversed counter-clockwise
    PathSample square{{0, 1, 2, 3, 4}, {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}};
    EXPECT_DOUBLE_EQ(stratonovich_area(square), 1.0);
}

TEST(Bridge, SymbolIntegralAndAction) {
    const auto geom = btq_test::make_torus(1);
    const FourierSymbol h(geom, {{0, 1, {0.5, 0.0}}, {0, -1, {0.5, 0.0}}});
    PathSample path{{0.0, 0.5, 1.0}, {{0.0, 0.0}, {0.3, 0.4}, {1.0, 0.2}}};
    const double expected = 0.25 * (h(path.points[0]) + h(path.points[1])) + 0.25 * (h(path.points[1]) + h(path.points[2]));
    EXPECT_NEAR(symbol_integral(path, h), expected, 1e-15);
    EXPECT_NEAR(action(path, h, 0.6), stratonovich_area(path) - 0.6 * expected, 1e-15);
}

TEST(Bridge, WienerPrefactorIsNormalized) {
    for (const double r : {0.5, 2.0}) {
        const double hbar = 0.9;
        const PlanePoint x{0.2, -0.4};
        const double half = 9.0 * hbar * std::sqrt(r);
        const Complex total =
            oracle::plane_integral([&](oracle::Pt y) { return Complex(wiener_prefactor({y.p, y.q}, x, r, hbar)); },
                                   to_pt(x), half, 201, 1.0 / kTwoPi);
        EXPECT_NEAR(total.real(), 1.0, 1e-10);
    }
}

TEST(Bridge, ReferenceIsContinuumLimitOfDiscreteOracle) {
    const PlanePoint xp{0.9, 1.1}, x{0.3, 0.7};
    for (const double hbar : {1.0, 0.6}) {
        const double r = 2.0;
        const Complex ref = bridge_reference_t0(xp, x, r, hbar);
        double prev = 1.0;
        for (const int M : {16, 64, 256}) {
            const double err = std::abs(oracle::discrete_estimator_t0(to_pt(xp), to_pt(x), r, M, hbar) - ref);
            EXPECT_LT(err, 0.5 * prev);
            prev = err;
        }
        EXPECT_LT(prev, 2e-3);
    }
    // r -> infinity gives the plane kernel
    EXPECT_TRUE(close(bridge_reference_t0(xp, x, 60.0, 1.0), kernel_K(xp, x, 1.0), 1e-12));
}
