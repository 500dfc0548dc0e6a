// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "btq/config.hpp"
#include "btq/error.hpp"

using namespace btq;

namespace {

const char* kBase = R"(
geometry:
  level: 2
  hbar: 0.5
  aspect: 2
symbol:
  coefficients:
    - [1, 0, 0.5]
    - [-1, 0, 0.5]
    - [0, 1, 0.25, 0.1]
    - [0, -1, 0.25, -0.1]
)";

Error config_error(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const Error& e) {
        return e;
    }
    ADD_FAILURE() << "no error for:\n" << text;
    return Error(ErrorCode::IoError, "none");
}

}  // namespace

TEST(Config, DefaultsAndGeometryByLevel) {
    const auto c = parse_config(kBase);
    EXPECT_NEAR(c.geometry.a * c.geometry.b, kTwoPi * 0.5 * 2, 1e-12);
    EXPECT_NEAR(c.geometry.a / c.geometry.b, 2.0, 1e-12);
    EXPECT_EQ(make_geometry(c).level(), 2);
    EXPECT_EQ(c.symbol.size(), 4u);
    EXPECT_EQ(c.symbol[2].c, Complex(0.25, 0.1));
    EXPECT_EQ(c.mc.r, (std::vector<double>{2, 4, 8, 16}));
    EXPECT_EQ(c.mc.n_samples, 100000);
    EXPECT_FALSE(c.mc.target_error.has_value());
    EXPECT_EQ(c.dynamics.t, std::vector<double>{0.0});
    EXPECT_EQ(c.comparison.pull_pass, 3.0);
    EXPECT_EQ(c.output.directory, "out");
    EXPECT_EQ(make_characters(c, make_geometry(c)).size(), 1u);
}

TEST(Config, SerializeRoundTrip) {
    auto c = parse_config(std::string(kBase) + R"(
character:
  grid: [2, 3]
dynamics:
  t: [0.1, 0.25]
  pairs:
    - [0.1, 0.2, 0.3, 0.4]
mc:
  r: [3, 4.5, 6, 8]
  target_error: 1.0e-3
  extrapolation: inverse_power
  order: 1
  decay_term: true
  control_variate: true
  seed: 18446744073709551615
output:
  directory: "some dir/with: colon"
)");
    EXPECT_EQ(c.mc.seed, 18446744073709551615ULL);
    const auto text = serialize_config(c);
    EXPECT_EQ(parse_config(text), c);
    EXPECT_EQ(serialize_config(parse_config(text)), text);
    EXPECT_EQ(make_characters(c, make_geometry(c)).size(), 6u);
}

TEST(Config, UnknownKeysNameTheirPath) {
    const auto e = config_error(std::string(kBase) + "mc:\n  n_sample: 10\n");
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    EXPECT_NE(std::string(e.what()).find("mc.n_sample"), std::string::npos);
    EXPECT_EQ(config_error(std::string(kBase) + "extra: 1\n").code(), ErrorCode::ConfigError);
}

TEST(Config, TypeAndRangeErrors) {
    EXPECT_EQ(config_error("geometry: [1, 2]\nsymbol:\n  coefficients: []\n").code(), ErrorCode::ConfigError);
    EXPECT_EQ(config_error("symbol:\n  coefficients: []\n").code(), ErrorCode::ConfigError);
    EXPECT_EQ(config_error(std::string(kBase) + "mc:\n  n_samples: lots\n").code(), ErrorCode::ConfigError);
    EXPECT_EQ(config_error(std::string(kBase) + "mc:\n  r: [2, -4, 8]\n").code(), ErrorCode::ConfigError);
    EXPECT_EQ(config_error(std::string(kBase) + "mc:\n  r: [2, 4, 8]\n  extrapolation: inverse_power\n").code(),
              ErrorCode::ConfigError);
    EXPECT_EQ(config_error(std::string(kBase) + "mc:\n  extrapolation: spline\n").code(), ErrorCode::ConfigError);
    EXPECT_EQ(config_error(std::string(kBase) + "mc:\n  decay_term: true\n").code(), ErrorCode::ConfigError);
    EXPECT_EQ(config_error(std::string(kBase) + "mc:\n  r: [2, 4, 8, 16]\n  extrapolation: inverse_power\n  "
                                                "decay_term: true\n").code(),
              ErrorCode::ConfigError);
    EXPECT_EQ(config_error(std::string(kBase) + "dynamics:\n  pairs: [[1, 2, 3]]\n").code(), ErrorCode::ConfigError);
    EXPECT_EQ(config_error(std::string(kBase) + "comparison:\n  pull_max: 1\n").code(), ErrorCode::ConfigError);
    EXPECT_EQ(config_error(std::string(kBase) + "output:\n  mc_report: a/b.csv\n").code(), ErrorCode::ConfigError);
    EXPECT_EQ(config_error("geometry: {a: 1, b: 1\n").code(), ErrorCode::ConfigError);
}

TEST(Config, ModuleErrorsPropagate) {
    EXPECT_EQ(config_error("geometry: {a: 1, b: 1}\nsymbol:\n  coefficients: []\n").code(),
              ErrorCode::NonIntegralLevel);
    EXPECT_EQ(config_error("geometry: {level: 1}\nsymbol:\n  coefficients: [[1, 0, 0.5]]\n").code(),
              ErrorCode::NonHermitianCoefficients);
}

TEST(Config, DefaultPairsAndSteps) {
    const auto c = parse_config(kBase);
    const auto g = make_geometry(c);
    const auto pairs = point_pairs(c, g);
    ASSERT_EQ(pairs.size(), 6u);
    EXPECT_NEAR(pairs[0].x.p, 1.25 * g.a() / 3.0, 1e-14);
    EXPECT_NEAR(pairs[0].x.q, 1.25 * g.b() / 3.0, 1e-14);
    EXPECT_EQ(pairs[0].x, pairs[0].x_prime);
    McConfig mc;
    mc.steps_per_unit = 16;
    EXPECT_EQ(steps_for(mc, 3.0, 1.0), 48);
    EXPECT_EQ(steps_for(mc, 0.01, 1.0), 2);
    EXPECT_EQ(steps_for(mc, 2.0, 0.7), static_cast<int>(std::ceil(16 * 2.0 * 0.7)));
}

TEST(Config, ShippedConfigsLoad) {
    const std::filesystem::path dir = BTQ_SOURCE_DIR "/configs";
    int n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".yaml") continue;
        SCOPED_TRACE(entry.path().string());
        const auto c = load_config(entry.path());
        EXPECT_EQ(parse_config(serialize_config(c)), c);
        ++n;
    }
    EXPECT_GE(n, 3);
    EXPECT_THROW((void)load_config(dir / "does_not_exist.yaml"), Error);
}
