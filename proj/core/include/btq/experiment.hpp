// SPDX-License-Identifier: Apache-2.0
//
// Configuration-driven runs: the operator route (basis, Hamiltonian matrix,
// propagator kernel), the path-integral route (Monte Carlo over the r
// schedule, extrapolation) and their comparison.
#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "btq/config.hpp"
#include "btq/csv.hpp"
#include "btq/extrapolation.hpp"
#include "btq/path_integral.hpp"
#include "btq/torus.hpp"

namespace btq {

/// Identifies one (character, point pair, time) row.
struct RowKey {
    int k_index = 0;
    double k1 = 0.0;
    double k2 = 0.0;
    int pair_index = 0;
    PointPair pair;
    double t = 0.0;
};

struct OperatorRow {
    RowKey key;
    Complex value;  // propagator kernel (x'; x) from the Hamiltonian matrix
};

struct OperatorRoute {
    std::vector<OperatorRow> rows;
    std::vector<Eigen::MatrixXcd> hamiltonians;  // one per character
    std::vector<double> gram_residuals;
    std::vector<double> unitarity_defects;       // worst over t, per character
};

/// Per (character, pair, r) Monte Carlo run; all times share the bridges.
struct McRun {
    int k_index = 0;
    int pair_index = 0;
    double r = 0.0;
    int steps = 0;
    std::int64_t pilot_samples = 0;
    double pilot_sigma = 0.0;      // per-sample standard deviation from the pilot, worst over t
    std::int64_t requested = 0;    // samples the budget asked for
    std::int64_t used = 0;
    double achieved_error = 0.0;   // worst std_error over t
    bool budget_ok = true;
    std::size_t terms = 0;
    std::vector<EstimatorResult> results;  // one per t
};

struct ExtrapolatedRow {
    RowKey key;
    ExtrapolationResult fit;
};

struct McRoute {
    std::vector<McRun> runs;
    std::vector<ExtrapolatedRow> rows;
    bool budget_ok = true;
};

struct ComparisonRow {
    RowKey key;
    Complex operator_value;
    Complex mc_value;
    double error = 0.0;
    double pull = 0.0;
    bool stable = true;
    bool pass = false;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    double pass_fraction = 0.0;
    double max_pull = 0.0;
    bool passed = false;
    std::vector<std::string> warnings;
};

/// Progress messages (one line each); may be empty.
using ProgressSink = std::function<void(const std::string&)>;

OperatorRoute run_operator_route(const ExperimentConfig& config);

/// Monte Carlo over mc.r with jobs worker threads. With mc.target_error set, a
/// pilot of mc.pilot_samples sizes each run to reach the target per-r error,
/// capped at mc.max_samples (reported as a budget failure when the cap binds).
McRoute run_mc_route(const ExperimentConfig& config, int jobs, const ProgressSink& progress = {});

/// Rows are matched by key. Throws Error{MissingRoute} when either route is
/// absent. Pull = |operator - mc| / error; rows whose extrapolation was
/// unstable fail. Passes when at least pass_fraction of the rows have
/// pull < pull_pass and none exceed pull_max; an empty report passes with a
/// warning.
ComparisonReport compare_propagators(const OperatorRoute* op, const McRoute* mc, const ComparisonConfig& thresholds);

CsvTable operator_table(const ExperimentConfig& config, const OperatorRoute& route);
CsvTable mc_table(const ExperimentConfig& config, const McRoute& route);
CsvTable extrapolation_table(const ExperimentConfig& config, const McRoute& route);
CsvTable budget_table(const ExperimentConfig& config, const McRoute& route);
CsvTable comparison_table(const ExperimentConfig& config, const ComparisonReport& report);

enum class RunMode { Operator, MonteCarlo, Compare };

struct RunSummary {
    std::vector<std::filesystem::path> written;
    std::optional<ComparisonReport> comparison;
    bool budget_ok = true;
};

/// Runs the requested routes and writes the reports into config.output.directory.
/// Every file is written atomically; on failure the files already written by
/// this call are removed before the error propagates.
RunSummary run_experiment(const ExperimentConfig& config, RunMode mode, int jobs, const ProgressSink& progress = {});

}  // namespace btq
