// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "btq/phase_space.hpp"
#include "oracles.hpp"

namespace btq_test {

inline oracle::Pt to_pt(btq::PlanePoint x) { return {x.p, x.q}; }
inline btq::PlanePoint to_plane(oracle::Pt x) { return {x.p, x.q}; }

inline ::testing::AssertionResult close(std::complex<double> actual, std::complex<double> expected, double tol) {
    const double d = std::abs(actual - expected);
    if (d <= tol) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "got " << actual << ", expected " << expected << ", |diff| = " << d
                                         << " > " << tol;
}

/// Points uniform in [lo, hi)^2 from a fixed seed.
class PointSource {
public:
    PointSource(std::uint64_t seed, double lo, double hi) : rng_(seed), dist_(lo, hi) {}
    btq::PlanePoint next() { return {dist_(rng_), dist_(rng_)}; }

private:
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> dist_;
};

/// Torus with a = 2 pi hbar N / b for an aspect ratio a/b.
inline btq::TorusGeometry make_torus(int level, double hbar = 1.0, double aspect = 1.0) {
    const double area = btq::kTwoPi * hbar * level;
    return btq::TorusGeometry::validate(std::sqrt(area * aspect), std::sqrt(area / aspect), hbar);
}

inline oracle::Torus oracle_torus(const btq::TorusGeometry& g, const btq::CharacterK& k) {
    return {g.a(), g.b(), g.hbar(), k.k1(), k.k2()};
}

}  // namespace btq_test
