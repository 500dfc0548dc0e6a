// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "btq/error.hpp"
#include "btq/extrapolation.hpp"
#include "helpers.hpp"

using namespace btq;
using btq_test::close;

namespace {

const std::vector<double> kSchedule{2.0, 4.0, 8.0, 16.0};

std::vector<RSample> exponential_data(Complex A, Complex B, double c, double sigma, std::mt19937_64* rng) {
    std::normal_distribution<double> z(0.0, sigma / std::sqrt(2.0));
    std::vector<RSample> out;
    for (const double r : kSchedule) {
        Complex v = A + B * std::exp(-c * r);
        if (rng) v += Complex(z(*rng), z(*rng));
        out.push_back({r, v, sigma});
    }
    return out;
}

std::vector<RSample> inverse_data(const std::vector<double>& rs, Complex A, Complex C1, Complex C2, double sigma,
                                  std::mt19937_64* rng) {
    std::normal_distribution<double> z(0.0, sigma / std::sqrt(2.0));
    std::vector<RSample> out;
    for (const double r : rs) {
        Complex v = A + C1 / r + C2 / (r * r);
        if (rng) v += Complex(z(*rng), z(*rng));
        out.push_back({r, v, sigma});
    }
    return out;
}

ExtrapolationOptions inverse(int order, double decay = 0.0) { return {ExtrapolationModel::InversePower, order, decay}; }

// A + C1 / r + D exp(-d r)
std::vector<RSample> decaying_data(const std::vector<double>& rs, Complex A, Complex C1, Complex D, double d, double sigma,
                                   std::mt19937_64* rng) {
    std::normal_distribution<double> z(0.0, sigma / std::sqrt(2.0));
    std::vector<RSample> out;
    for (const double r : rs) {
        Complex v = A + C1 / r + D * std::exp(-d * r);
        if (rng) v += Complex(z(*rng), z(*rng));
        out.push_back({r, v, sigma});
    }
    return out;
}

struct Coverage {
    int within1 = 0;
    int within2 = 0;
};

// Counts trials whose pull |A_fit - A| / error is below 1 and below 2.
template <class Trial>
Coverage coverage(int trials, Trial&& pull) {
    Coverage c;
    for (int i = 0; i < trials; ++i) {
        const double p = pull();
        c.within1 += p < 1.0;
        c.within2 += p < 2.0;
    }
    return c;
}

}  // namespace

TEST(Extrapolation, ExactExponentialDataIsRecovered) {
    const Complex A(0.3, -0.7), B(1.5, 0.4);
    const auto fit = extrapolate_r(exponential_data(A, B, 0.45, 0.0, nullptr));
    EXPECT_TRUE(close(fit.limit, A, 1e-7));
    EXPECT_TRUE(close(fit.amplitude, B, 1e-6));
    EXPECT_NEAR(fit.rate, 0.45, 1e-6);
    EXPECT_FALSE(fit.constant_model);
    EXPECT_TRUE(fit.stable);
    EXPECT_EQ(fit.model, ExtrapolationModel::Exponential);
}

TEST(Extrapolation, ConstantDataSelectsConstantModel) {
    const auto fit = extrapolate_r(exponential_data({0.2, 0.1}, {0.0, 0.0}, 1.0, 0.0, nullptr));
    EXPECT_TRUE(fit.constant_model);
    EXPECT_TRUE(close(fit.limit, {0.2, 0.1}, 1e-14));
}

TEST(Extrapolation, ErrorBarsAreCalibrated) {
    std::mt19937_64 rng(41);
    const Complex A(0.5, 0.2), B(0.8, -0.3);
    const auto cover = coverage(100, [&] {
        const auto fit = fit_r_extrapolation(exponential_data(A, B, 0.6, 0.01, &rng));
        return std::abs(fit.limit - A) / fit.error;
    });
    EXPECT_GE(cover.within2, 90);
    EXPECT_LE(cover.within1, 90);
}

// Errors growing steeply with r leave the rate poorly determined; the limit
// then moves a lot along the rate, which the error has to reflect.
TEST(Extrapolation, ErrorBarsAreCalibratedWithGrowingNoise) {
    std::mt19937_64 rng(43);
    std::normal_distribution<double> z(0.0, 1.0 / std::sqrt(2.0));
    const Complex A(0.9, -0.3), B(0.12, 0.05);
    const double rs[] = {2, 4, 8, 16}, sig[] = {0.002, 0.005, 0.02, 0.5};
    const auto cover = coverage(100, [&] {
        std::vector<RSample> data;
        for (int i = 0; i < 4; ++i) {
            data.push_back({rs[i], A + B * std::exp(-rs[i]) + sig[i] * Complex(z(rng), z(rng)), sig[i]});
        }
        const auto fit = fit_r_extrapolation(data);
        return std::abs(fit.limit - A) / fit.error;
    });
    EXPECT_GE(cover.within2, 90);
    EXPECT_LE(cover.within1, 90);
}

TEST(Extrapolation, NoPlateauIsUnstable) {
    std::vector<RSample> growing;
    for (const double r : kSchedule) growing.push_back({r, Complex(0.1 * r, 0.0), 1e-3});
    const auto fit = fit_r_extrapolation(growing);
    EXPECT_FALSE(fit.stable);
    EXPECT_FALSE(fit.diagnostic.empty());
    try {
        (void)extrapolate_r(growing);
        FAIL() << "expected ExtrapolationUnstable";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ExtrapolationUnstable);
    }
}

TEST(Extrapolation, RequiresEnoughDistinctDurations) {
    std::vector<RSample> two{{2.0, 1.0, 0.1}, {4.0, 1.0, 0.1}};
    EXPECT_THROW((void)fit_r_extrapolation(two), Error);
    std::vector<RSample> dup{{2.0, 1.0, 0.1}, {2.0, 1.0, 0.1}, {4.0, 1.0, 0.1}};
    EXPECT_THROW((void)fit_r_extrapolation(dup), Error);
    std::vector<RSample> bad{{2.0, 1.0, 0.1}, {-4.0, 1.0, 0.1}, {8.0, 1.0, 0.1}};
    EXPECT_THROW((void)fit_r_extrapolation(bad), Error);
    // inverse powers of order 2 need four durations
    EXPECT_THROW((void)fit_r_extrapolation(inverse_data({3, 4, 6}, 1.0, 1.0, 1.0, 0.1, nullptr), inverse(2)), Error);
    // and a decay term costs one more
    EXPECT_THROW((void)fit_r_extrapolation(inverse_data({3, 4, 6}, 1.0, 1.0, 1.0, 0.1, nullptr), inverse(1, 1.0)),
                 Error);
    EXPECT_THROW((void)fit_r_extrapolation(inverse_data({3, 4, 6, 8}, 1.0, 1.0, 1.0, 0.1, nullptr), inverse(1, -1.0)),
                 Error);
}

TEST(Extrapolation, InversePowerExactData) {
    const Complex A(-0.02, 0.03), C1(0.15, -0.1), C2(0.4, 0.2);
    const auto fit = extrapolate_r(inverse_data({3, 4, 6, 8}, A, C1, C2, 0.0, nullptr), inverse(2));
    EXPECT_TRUE(close(fit.limit, A, 1e-12));
    ASSERT_EQ(fit.coefficients.size(), 2u);
    EXPECT_TRUE(close(fit.coefficients[0], C1, 1e-11));
    EXPECT_TRUE(close(fit.coefficients[1], C2, 1e-10));
    EXPECT_EQ(fit.amplitude, fit.coefficients[0]);
    EXPECT_EQ(fit.model, ExtrapolationModel::InversePower);
    EXPECT_EQ(fit.rate, 0.0);
}

TEST(Extrapolation, InversePowerErrorBarsAreCalibrated) {
    std::mt19937_64 rng(42);
    const Complex A(0.1, 0.0), C1(0.15, 0.05), C2(0.1, -0.2);
    const auto cover = coverage(100, [&] {
        const auto fit = fit_r_extrapolation(inverse_data({3, 4, 6, 8, 12}, A, C1, C2, 1e-3, &rng), inverse(2));
        return std::abs(fit.limit - A) / fit.error;
    });
    EXPECT_GE(cover.within2, 90);
    EXPECT_LE(cover.within1, 90);
}

TEST(Extrapolation, DecayTermExactData) {
    const Complex A(0.3, -0.1), C1(0.05, 0.02), D(-0.4, 0.6);
    const auto fit = extrapolate_r(decaying_data({3, 4, 6, 8}, A, C1, D, 0.8, 0.0, nullptr), inverse(1, 0.8));
    EXPECT_TRUE(close(fit.limit, A, 1e-12));
    ASSERT_EQ(fit.coefficients.size(), 1u);
    EXPECT_TRUE(close(fit.coefficients[0], C1, 1e-11));
    EXPECT_TRUE(close(fit.decay_amplitude, D, 1e-10));
    EXPECT_EQ(fit.rate, 0.8);
    EXPECT_EQ(fit.dof, 2);
}

TEST(Extrapolation, DecayTermErrorBarsAreCalibrated) {
    std::mt19937_64 rng(7);
    const Complex A(-0.2, 0.4), C1(0.1, -0.05), D(0.3, 0.2);
    const auto cover = coverage(100, [&] {
        const auto fit = fit_r_extrapolation(decaying_data({3, 4, 6, 8, 12}, A, C1, D, 1.0, 1e-3, &rng), inverse(1, 1.0));
        return std::abs(fit.limit - A) / fit.error;
    });
    EXPECT_GE(cover.within2, 90);
    EXPECT_LE(cover.within1, 90);
}

TEST(Extrapolation, DecayTermRemovesTransientBias) {
    // a slow exponential leaks into the 1/r^2 term on a short schedule
    const std::vector<double> rs{3, 4, 6, 8};
    const auto data = decaying_data(rs, 0.0, 0.02, 0.2, 1.0, 1e-3, nullptr);
    const auto plain = fit_r_extrapolation(data, inverse(2));
    const auto with_decay = fit_r_extrapolation(data, inverse(1, 1.0));
    EXPECT_GT(std::abs(plain.limit), 2e-3);
    EXPECT_LT(std::abs(with_decay.limit), 1e-12);
}

TEST(Extrapolation, ExponentialModelIsBiasedOnSlowTails) {
    // data approaching A like 1/r: the exponential model settles early and misses A
    std::vector<double> rs{2, 4, 8, 16};
    const auto data = inverse_data(rs, 0.0, 0.3, 0.0, 0.0, nullptr);
    const auto exp_fit = fit_r_extrapolation(data);
    const auto inv_fit = fit_r_extrapolation(data, inverse(2));
    EXPECT_GT(std::abs(exp_fit.limit), 1e-3);
    EXPECT_LT(std::abs(inv_fit.limit), 1e-12);
}

TEST(Extrapolation, ResultsAdapter) {
    std::vector<EstimatorResult> results;
    for (const double r : kSchedule) {
        EstimatorResult e;
        e.r = r;
        e.value = Complex(1.0, 0.5) + 0.2 * std::exp(-r);
        e.std_error = 0.0;
        results.push_back(e);
    }
    const auto samples = to_r_samples(results);
    ASSERT_EQ(samples.size(), 4u);
    EXPECT_EQ(samples[2].r, 8.0);
    EXPECT_TRUE(close(extrapolate_r(results).limit, {1.0, 0.5}, 1e-7));
}

TEST(Extrapolation, ModelNames) {
    EXPECT_EQ(parse_extrapolation_model("exponential"), ExtrapolationModel::Exponential);
    EXPECT_EQ(parse_extrapolation_model("inverse_power"), ExtrapolationModel::InversePower);
    EXPECT_STREQ(to_string(ExtrapolationModel::InversePower), "inverse_power");
    EXPECT_THROW((void)parse_extrapolation_model("cubic"), Error);
}
