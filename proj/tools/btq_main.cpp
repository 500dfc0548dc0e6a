// SPDX-License-Identifier: Apache-2.0
//
// btq: command-line driver.
//   btq validate --config PATH
//   btq operator --config PATH [--out DIR]
//   btq mc       --config PATH [--seed INT] [--out DIR] [--jobs INT]
//   btq compare  --config PATH [--seed INT] [--out DIR] [--jobs INT]
//   btq selftest [--seed INT]
// Exit codes: 0 pass, 1 comparison or self-test failure, 2 configuration or
// validation error.
#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "btq/config.hpp"
#include "btq/error.hpp"
#include "btq/experiment.hpp"
#include "btq/selftest.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    int jobs = 1;
};

btq::ExperimentConfig load(const Options& o) {
    btq::ExperimentConfig cfg = btq::load_config(o.config);
    if (o.seed) cfg.mc.seed = *o.seed;
    if (o.out) cfg.output.directory = *o.out;
    btq::validate_config(cfg);
    return cfg;
}

void print_comparison(const btq::ComparisonReport& report) {
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "comparison: " << report.rows.size() << " rows, "
              << static_cast<int>(report.pass_fraction * 100.0 + 0.5) << "% with pull below threshold, max pull "
              << report.max_pull << " -> " << (report.passed ? "PASS" : "FAIL") << "\n";
}

int run(btq::RunMode mode, const Options& o) {
    const btq::ExperimentConfig cfg = load(o);
    auto progress = [](const std::string& line) { std::cerr << line << "\n"; };
    const btq::RunSummary summary = btq::run_experiment(cfg, mode, o.jobs, progress);
    for (const auto& p : summary.written) std::cout << "wrote " << p.string() << "\n";
    if (!summary.budget_ok) std::cerr << "warning: variance budget exceeded for some runs (see budget report)\n";
    if (summary.comparison) {
        print_comparison(*summary.comparison);
        return summary.comparison->passed ? kExitPass : kExitFail;
    }
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Berezin-Toeplitz quantization on the plane and torus, cross-checked by path integrals"};
    app.require_subcommand(1);
    Options opts;

    auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config, "experiment configuration (YAML)")->required();
    };
    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("--seed", opts.seed, "master seed (overrides mc.seed)");
        cmd->add_option("--out", opts.out, "output directory (overrides output.directory)");
        cmd->add_option("--jobs", opts.jobs, "worker threads")->check(CLI::PositiveNumber);
    };

    auto* validate = app.add_subcommand("validate", "check a configuration without running anything");
    add_config(validate);
    auto* op = app.add_subcommand("operator", "operator route: basis, Hamiltonian matrix, propagator kernel");
    add_config(op);
    add_run_flags(op);
    auto* mc = app.add_subcommand("mc", "path-integral route: Monte Carlo over the r schedule and extrapolation");
    add_config(mc);
    add_run_flags(mc);
    auto* cmp = app.add_subcommand("compare", "both routes and the comparison report");
    add_config(cmp);
    add_run_flags(cmp);
    auto* self = app.add_subcommand("selftest", "run the built-in invariant checks");
    self->add_option("--seed", opts.seed, "seed for randomized checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitConfig;
    }

    try {
        if (*validate) {
            const auto cfg = load(opts);
            std::cout << "config OK: " << cfg.symbol.size() << " symbol terms, " << cfg.dynamics.t.size()
                      << " times, " << cfg.mc.r.size() << " r values\n";
            return kExitPass;
        }
        if (*op) return run(btq::RunMode::Operator, opts);
        if (*mc) return run(btq::RunMode::MonteCarlo, opts);
        if (*cmp) return run(btq::RunMode::Compare, opts);
        if (*self) {
            bool all = true;
            for (const auto& r : btq::run_selftests(opts.seed.value_or(1))) {
                std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
                all = all && r.passed;
            }
            return all ? kExitPass : kExitFail;
        }
    } catch (const btq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
            case btq::ErrorCode::ConfigError:
            case btq::ErrorCode::InvalidArgument:
            case btq::ErrorCode::NonIntegralLevel:
            case btq::ErrorCode::NonHermitianCoefficients:
                return kExitConfig;
            default:
                return kExitFail;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitPass;
}
