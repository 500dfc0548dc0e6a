// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <utility>

#include "btq/error.hpp"
#include "btq/phase_space.hpp"
#include "fast_cos.hpp"
#include "helpers.hpp"

using namespace btq;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no btq::Error thrown";
    return ErrorCode::IoError;
}

}  // namespace

TEST(Geometry, AcceptsIntegralLevelAndSnapsB) {
    const double a = 2.0;
    const double b = kTwoPi * 3.0 / a * (1.0 + 1e-11);
    const auto g = TorusGeometry::validate(a, b, 1.0);
    EXPECT_EQ(g.level(), 3);
    EXPECT_NEAR(g.a() * g.b() / (kTwoPi * g.hbar()), 3.0, 1e-12 * 3.0);
}

TEST(Geometry, RejectsNonIntegralLevel) {
    EXPECT_EQ(code_of([] { (void)TorusGeometry::validate(1.0, 1.0, 1.0); }), ErrorCode::NonIntegralLevel);
    EXPECT_EQ(code_of([] { (void)TorusGeometry::validate(2.0, kTwoPi * 1.5 / 2.0, 1.0); }),
              ErrorCode::NonIntegralLevel);
}

TEST(Geometry, RejectsNonPositiveInputs) {
    EXPECT_EQ(code_of([] { (void)TorusGeometry::validate(-1.0, 1.0, 1.0); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { (void)TorusGeometry::validate(1.0, 1.0, 0.0); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { (void)TorusGeometry::validate(1.0, NAN, 1.0); }), ErrorCode::InvalidArgument);
}

TEST(Geometry, UncheckedKeepsInputs) {
    const auto g = TorusGeometry::unchecked(1.0, 1.0, 1.0);
    EXPECT_EQ(g.b(), 1.0);
    EXPECT_EQ(g.level(), 0);
}

TEST(Geometry, WrapLandsInFundamentalDomain) {
    const auto g = btq_test::make_torus(2, 1.0, 2.0);
    btq_test::PointSource src(3, -50.0, 50.0);
    for (int i = 0; i < 200; ++i) {
        const auto x = src.next();
        const auto w = wrap_to_torus(x, g);
        EXPECT_GE(w.p, 0.0);
        EXPECT_LT(w.p, g.a());
        EXPECT_GE(w.q, 0.0);
        EXPECT_LT(w.q, g.b());
        const double m = (x.p - w.p) / g.a(), n = (x.q - w.q) / g.b();
        EXPECT_NEAR(m, std::round(m), 1e-9);
        EXPECT_NEAR(n, std::round(n), 1e-9);
    }
}

TEST(GridVectors, WithinRadiusIsCompleteAndOrdered) {
    const auto g = btq_test::make_torus(1);
    const double radius = 3.1 * g.a();
    const auto vs = grid_vectors_within(g, radius);
    std::set<std::pair<int, int>> seen;
    for (const auto& v : vs) {
        EXPECT_LE(std::hypot(v.g1, v.g2), radius);
        EXPECT_TRUE(seen.insert({v.m, v.n}).second);
    }
    int expected = 0;
    for (int m = -5; m <= 5; ++m)
        for (int n = -5; n <= 5; ++n)
            if (std::hypot(m * g.a(), n * g.b()) <= radius) ++expected;
    EXPECT_EQ(static_cast<int>(vs.size()), expected);
    for (std::size_t i = 1; i < vs.size(); ++i)
        EXPECT_LE(std::abs(vs[i - 1].m) + std::abs(vs[i - 1].n), std::abs(vs[i].m) + std::abs(vs[i].n));
    EXPECT_EQ(vs.front(), GridVector(0, 0, g));
}

TEST(GridVectors, NearIsCentred) {
    const auto g = btq_test::make_torus(1);
    const PlanePoint c{7.3, -4.1};
    for (const auto& v : grid_vectors_near(g, c, 4.0)) EXPECT_LE(std::hypot(c.p - v.g1, c.q - v.g2), 4.0);
}

TEST(GridVectors, TruncationRadiusBoundsTail) {
    const auto g = btq_test::make_torus(1);
    const double tol = 1e-10;
    const double rho = gaussian_truncation_radius(g, tol);
    const PlanePoint d{0.37, -0.81};
    double tail = 0.0;
    for (int m = -30; m <= 30; ++m)
        for (int n = -30; n <= 30; ++n) {
            const double dist = std::hypot(d.p - m * g.a(), d.q - n * g.b());
            if (dist > rho) tail += std::exp(-dist * dist / (4.0 * g.hbar()));
        }
    EXPECT_LT(tail, tol);
}

TEST(Character, WrapsIntoDualCell) {
    const auto g = btq_test::make_torus(2);
    const double c1 = kTwoPi * g.hbar() / g.a(), c2 = kTwoPi * g.hbar() / g.b();
    const CharacterK k(1.25 * c1, -0.25 * c2, g);
    EXPECT_NEAR(k.k1(), 0.25 * c1, 1e-12);
    EXPECT_NEAR(k.k2(), 0.75 * c2, 1e-12);
    const auto grid = CharacterK::uniform_grid(g, 2, 3);
    ASSERT_EQ(grid.size(), 6u);
    for (const auto& kk : grid) {
        EXPECT_GE(kk.k1(), 0.0);
        EXPECT_LT(kk.k1(), c1);
        EXPECT_GE(kk.k2(), 0.0);
        EXPECT_LT(kk.k2(), c2);
    }
}

TEST(Symbol, RealSeriesMatchesComplexSeries) {
    const auto g = btq_test::make_torus(2, 0.5, 1.5);
    const FourierSymbol h(g, {{0, 0, {0.3, 0.0}},
                              {1, 0, {0.5, 0.2}},
                              {-1, 0, {0.5, -0.2}},
                              {2, -1, {-0.1, 0.4}},
                              {-2, 1, {-0.1, -0.4}}});
    btq_test::PointSource src(5, -3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const auto x = src.next();
        Complex ref = 0.0;
        for (const auto& t : h.terms())
            ref += t.c * std::polar(1.0, kTwoPi * (t.m * x.p / g.a() + t.n * x.q / g.b()));
        EXPECT_NEAR(h(x), ref.real(), 1e-13);
        EXPECT_NEAR(ref.imag(), 0.0, 1e-13);
        EXPECT_NEAR(h.evaluate_complex(x).imag(), 0.0, 1e-13);
        EXPECT_NEAR(std::abs(h(x)), 0.0, h.sup_bound() + 1e-12);
        // grid periodicity
        EXPECT_NEAR(h({x.p + g.a(), x.q - 2.0 * g.b()}), h(x), 1e-12);
    }
    EXPECT_DOUBLE_EQ(h.constant_term(), 0.3);
    EXPECT_FALSE(h.is_constant());
    EXPECT_NEAR(h.sup_bound(), 0.3 + 2.0 * std::abs(Complex(0.5, 0.2)) + 2.0 * std::abs(Complex(-0.1, 0.4)), 1e-14);
}

TEST(Symbol, ConstantSymbol) {
    const auto g = btq_test::make_torus(1);
    const auto h = FourierSymbol::constant(g, -1.5);
    EXPECT_TRUE(h.is_constant());
    EXPECT_EQ(h({0.2, 9.0}), -1.5);
}

TEST(Symbol, RejectsMissingOrWrongMirror) {
    const auto g = btq_test::make_torus(1);
    EXPECT_EQ(code_of([&] { FourierSymbol(g, {{1, 0, {0.5, 0.0}}}); }), ErrorCode::NonHermitianCoefficients);
    EXPECT_EQ(code_of([&] { FourierSymbol(g, {{1, 0, {0.5, 0.1}}, {-1, 0, {0.5, 0.1}}}); }),
              ErrorCode::NonHermitianCoefficients);
    EXPECT_EQ(code_of([&] { FourierSymbol(g, {{0, 0, {1.0, 0.5}}}); }), ErrorCode::NonHermitianCoefficients);
    EXPECT_EQ(code_of([&] { FourierSymbol(g, {{0, 0, {1.0, 0.0}}, {0, 0, {1.0, 0.0}}}); }),
              ErrorCode::InvalidArgument);
}

TEST(FastCos, MatchesStdCos) {
    std::mt19937_64 rng(11);
    for (const double scale : {1.0, 10.0, 1e3, 1e5, 1.5e6}) {
        std::uniform_real_distribution<double> dist(-scale, scale);
        double worst = 0.0;
        for (int i = 0; i < 200000; ++i) {
            const double x = dist(rng);
            worst = std::max(worst, std::abs(detail::fast_cos(x) - std::cos(x)));
        }
        EXPECT_LT(worst, 4e-16) << "scale " << scale;
    }
    for (const double x : {0.0, kPi / 4, kPi / 2, kPi, 3 * kPi / 2, 1e7, -3e9})
        EXPECT_NEAR(detail::fast_cos(x), std::cos(x), 4e-16) << x;
    EXPECT_TRUE(std::isnan(detail::fast_cos(NAN)));
}
