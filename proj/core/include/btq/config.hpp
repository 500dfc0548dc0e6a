// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration: a YAML document with the sections geometry,
// character, symbol, dynamics, mc, quadrature, comparison and output. Unknown
// keys are rejected. See configs/README.md for the grammar.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "btq/extrapolation.hpp"
#include "btq/phase_space.hpp"

namespace btq {

struct GeometryConfig {
    double a = 0.0;
    double b = 0.0;
    double hbar = 1.0;
    bool operator==(const GeometryConfig&) const = default;
};

/// Either one explicit character or an n1 x n2 uniform grid over the dual torus.
struct CharacterConfig {
    double k1 = 0.0;
    double k2 = 0.0;
    int grid1 = 0;  // > 0 selects the grid form
    int grid2 = 0;
    bool operator==(const CharacterConfig&) const = default;
};

struct PointPair {
    PlanePoint x_prime;
    PlanePoint x;
    bool operator==(const PointPair&) const = default;
};

struct DynamicsConfig {
    std::vector<double> t{0.0};
    std::vector<PointPair> pairs;  // empty: default_point_pairs
    bool operator==(const DynamicsConfig&) const = default;
};

struct McConfig {
    std::vector<double> r{2.0, 4.0, 8.0, 16.0};  // bridge durations
    double steps_per_unit = 64.0;                 // M = max(2, ceil(steps_per_unit r hbar))
    std::int64_t n_samples = 100000;
    std::uint64_t seed = 0;
    double truncation_tol = 1e-4;  // grid-sum truncation of the torus estimator
    bool control_variate = false;
    bool levy_correction = true;  // sub-step area weighting, see DkParams
    std::optional<double> target_error;  // per-r standard error; enables the variance budget
    std::int64_t pilot_samples = 16384;
    std::int64_t max_samples = 4000000;
    ExtrapolationModel extrapolation = ExtrapolationModel::Exponential;
    int order = 2;
    bool decay_term = false;  // adds D exp(-hbar r) to the inverse-power model
    bool operator==(const McConfig&) const = default;
};

struct QuadratureConfig {
    int points_per_level = 48;  // torus grid is (points_per_level N)^2
    double gram_tol = 1e-8;
    double theta_tol = 1e-14;
    double kernel_tol = 1e-14;
    bool operator==(const QuadratureConfig&) const = default;
};

struct ComparisonConfig {
    double pull_pass = 3.0;
    double pull_max = 5.0;
    double pass_fraction = 0.95;
    bool operator==(const ComparisonConfig&) const = default;
};

struct OutputConfig {
    std::string directory = "out";
    std::string operator_report = "operator.csv";
    std::string mc_report = "mc.csv";
    std::string extrapolation_report = "extrapolation.csv";
    std::string budget_report = "budget.csv";
    std::string comparison_report = "comparison.csv";
    bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
    GeometryConfig geometry;
    CharacterConfig character;
    std::vector<FourierTerm> symbol;
    DynamicsConfig dynamics;
    McConfig mc;
    QuadratureConfig quadrature;
    ComparisonConfig comparison;
    OutputConfig output;
    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses YAML text. Throws Error{ConfigError} with the offending key path,
/// or the module error (NonIntegralLevel, NonHermitianCoefficients, ...) raised
/// by validate_config.
[[nodiscard]] ExperimentConfig parse_config(const std::string& yaml_text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical YAML; parse_config(serialize_config(c)) == c.
[[nodiscard]] std::string serialize_config(const ExperimentConfig& config);

/// Semantic checks: geometry integrality, Hermitian symbol, positive sizes.
void validate_config(const ExperimentConfig& config);

[[nodiscard]] TorusGeometry make_geometry(const ExperimentConfig& config);
[[nodiscard]] FourierSymbol make_symbol(const ExperimentConfig& config, const TorusGeometry& geom);
[[nodiscard]] std::vector<CharacterK> make_characters(const ExperimentConfig& config, const TorusGeometry& geom);

/// Six representative pairs drawn from the 3 x 3 grid of points
/// ((i + 1/4) a/3, (j + 1/4) b/3): the diagonal pair, nearest neighbours along
/// p, q and the diagonal, a wrap-around pair and a far pair.
[[nodiscard]] std::vector<PointPair> default_point_pairs(const TorusGeometry& geom);

[[nodiscard]] std::vector<PointPair> point_pairs(const ExperimentConfig& config, const TorusGeometry& geom);

[[nodiscard]] int steps_for(const McConfig& mc, double r, double hbar);

}  // namespace btq
