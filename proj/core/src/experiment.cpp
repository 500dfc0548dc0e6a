// SPDX-License-Identifier: Apache-2.0
#include "btq/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <system_error>
#include <tuple>

#include "btq/error.hpp"
#include "btq/rng.hpp"

namespace btq {

namespace fs = std::filesystem;

namespace {

constexpr std::int64_t kMcTag = 0x6d63;     // "mc"
constexpr std::int64_t kPilotTag = 0x706c;  // "pl"

struct Setup {
    TorusGeometry geom;
    FourierSymbol h;
    std::vector<CharacterK> ks;
    std::vector<PointPair> pairs;
};

Setup make_setup(const ExperimentConfig& config) {
    validate_config(config);
    TorusGeometry geom = make_geometry(config);
    FourierSymbol h = make_symbol(config, geom);
    auto ks = make_characters(config, geom);
    auto pairs = point_pairs(config, geom);
    return {geom, std::move(h), std::move(ks), std::move(pairs)};
}

RowKey make_key(const CharacterK& k, int ki, const PointPair& pair, int pi, double t) {
    return {ki, k.k1(), k.k2(), pi, pair, t};
}

std::vector<std::string> common_comments(const ExperimentConfig& c, const std::string& title) {
    const auto& g = c.geometry;
    std::vector<std::string> out{title, "generated " + utc_timestamp()};
    std::ostringstream os;
    os << "geometry a=" << format_number(g.a) << " b=" << format_number(g.b) << " hbar=" << format_number(g.hbar);
    out.push_back(os.str());
    return out;
}

std::vector<std::string> key_cells(const RowKey& key) {
    return {std::to_string(key.k_index), format_number(key.k1),         format_number(key.k2),
            std::to_string(key.pair_index), format_number(key.pair.x_prime.p), format_number(key.pair.x_prime.q),
            format_number(key.pair.x.p), format_number(key.pair.x.q),  format_number(key.t)};
}

const std::vector<std::string> kKeyHeader{"k_index", "k1", "k2", "pair", "xp_p", "xp_q", "x_p", "x_q", "t"};

std::vector<std::string> with_key_header(std::initializer_list<const char*> rest) {
    auto h = kKeyHeader;
    h.insert(h.end(), rest.begin(), rest.end());
    return h;
}

// Summand modulus bound of the per-term estimator: 1 for the plain estimator,
// min(2, |t| sup|h| / hbar) with the t = 0 control variate.
double summand_bound(const McConfig& mc, const FourierSymbol& h, double t, double hbar) {
    if (!mc.control_variate) return 1.0;
    return std::min(2.0, std::abs(t) * h.sup_bound() / hbar);
}

}  // namespace

OperatorRoute run_operator_route(const ExperimentConfig& config) {
    const Setup s = make_setup(config);
    const auto& q = config.quadrature;
    const int n = q.points_per_level * s.geom.level();
    const TorusQuadrature quad{n, n, q.gram_tol};
    OperatorRoute route;
    for (std::size_t ki = 0; ki < s.ks.size(); ++ki) {
        const CharacterK& k = s.ks[ki];
        const BasisSet basis(s.geom, k, q.theta_tol);
        const Eigen::MatrixXcd gram = gram_matrix(basis, quad);
        const auto dim = gram.rows();
        route.gram_residuals.push_back((gram - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff());
        const HermitianOperatorMatrix H = assemble_hamiltonian(s.h, basis, quad);
        route.hamiltonians.push_back(H.entries());
        double worst = 0.0;
        for (const double t : config.dynamics.t) {
            const PropagatorMatrix U = propagator_matrix(H, t, s.geom.hbar());
            worst = std::max(worst, U.unitarity_defect());
            for (std::size_t pi = 0; pi < s.pairs.size(); ++pi) {
                const auto& pair = s.pairs[pi];
                route.rows.push_back({make_key(k, static_cast<int>(ki), pair, static_cast<int>(pi), t),
                                      propagator_kernel(pair.x_prime, pair.x, U, basis)});
            }
        }
        route.unitarity_defects.push_back(worst);
    }
    return route;
}

McRoute run_mc_route(const ExperimentConfig& config, int jobs, const ProgressSink& progress) {
    if (jobs < 1) throw Error(ErrorCode::InvalidArgument, "jobs must be >= 1");
    const Setup s = make_setup(config);
    const McConfig& mc = config.mc;
    const double hbar = s.geom.hbar();
    const auto& ts = config.dynamics.t;
    McRoute route;

    for (std::size_t ki = 0; ki < s.ks.size(); ++ki) {
        const CharacterK& k = s.ks[ki];
        for (std::size_t pi = 0; pi < s.pairs.size(); ++pi) {
            const auto& pair = s.pairs[pi];
            const auto terms = torus_terms(pair.x_prime, pair.x, s.geom, mc.truncation_tol);
            std::vector<std::vector<RSample>> per_t(ts.size());
            for (std::size_t ri = 0; ri < mc.r.size(); ++ri) {
                McRun run;
                run.k_index = static_cast<int>(ki);
                run.pair_index = static_cast<int>(pi);
                run.r = mc.r[ri];
                run.steps = steps_for(mc, run.r, hbar);
                run.terms = terms.size();
                const auto ki64 = static_cast<std::int64_t>(ki);
                const auto pi64 = static_cast<std::int64_t>(pi);
                const auto ri64 = static_cast<std::int64_t>(ri);
                DkParams params{run.r, run.steps, mc.n_samples, derive_seed(mc.seed, {kMcTag, ki64, pi64, ri64}),
                                hbar, jobs, mc.control_variate, mc.levy_correction};
                run.requested = mc.n_samples;
                if (mc.target_error) {
                    DkParams pilot = params;
                    pilot.n_samples = mc.pilot_samples;
                    pilot.seed = derive_seed(mc.seed, {kPilotTag, ki64, pi64, ri64});
                    const auto pres = dk_estimate_torus(pair.x_prime, pair.x, s.h, ts, pilot, s.geom, k, terms);
                    double sigma = 0.0;
                    for (const auto& e : pres) sigma = std::max(sigma, e.std_error);
                    run.pilot_samples = mc.pilot_samples;
                    run.pilot_sigma = sigma * std::sqrt(static_cast<double>(mc.pilot_samples));
                    const double need = std::ceil(std::pow(run.pilot_sigma / *mc.target_error, 2));
                    run.requested = need > 9e18 ? std::numeric_limits<std::int64_t>::max()
                                                : std::max<std::int64_t>(mc.n_samples, static_cast<std::int64_t>(need));
                    run.budget_ok = run.requested <= mc.max_samples;
                    params.n_samples = std::min(run.requested, mc.max_samples);
                }
                run.used = params.n_samples;
                run.results = dk_estimate_torus(pair.x_prime, pair.x, s.h, ts, params, s.geom, k, terms);
                for (std::size_t ti = 0; ti < ts.size(); ++ti) {
                    run.achieved_error = std::max(run.achieved_error, run.results[ti].std_error);
                    // The known t = 0 transient decays exponentially; removing it leaves
                    // the power-law approach that the extrapolation models.
                    per_t[ti].push_back({run.r, run.results[ti].value - run.results[ti].transient,
                                         run.results[ti].std_error});
                }
                route.budget_ok = route.budget_ok && run.budget_ok;
                if (progress) {
                    std::ostringstream os;
                    os << "mc k" << ki << " pair " << pi << " r=" << run.r << " M=" << run.steps << " n=" << run.used
                       << " terms=" << run.terms << " err=" << run.achieved_error
                       << (run.budget_ok ? "" : " (variance budget exceeded)");
                    progress(os.str());
                }
                route.runs.push_back(std::move(run));
            }
            const ExtrapolationOptions opts{mc.extrapolation, mc.order,
                                             mc.decay_term ? s.geom.hbar() : 0.0};
            for (std::size_t ti = 0; ti < ts.size(); ++ti) {
                route.rows.push_back({make_key(k, static_cast<int>(ki), pair, static_cast<int>(pi), ts[ti]),
                                      fit_r_extrapolation(per_t[ti], opts)});
            }
        }
    }
    return route;
}

ComparisonReport compare_propagators(const OperatorRoute* op, const McRoute* mc, const ComparisonConfig& thresholds) {
    if (op == nullptr) throw Error(ErrorCode::MissingRoute, "operator route results are missing");
    if (mc == nullptr) throw Error(ErrorCode::MissingRoute, "path-integral route results are missing");
    using Index = std::tuple<int, int, double>;
    std::map<Index, const OperatorRow*> by_key;
    for (const auto& row : op->rows) by_key[{row.key.k_index, row.key.pair_index, row.key.t}] = &row;

    ComparisonReport report;
    std::size_t good = 0;
    for (const auto& row : mc->rows) {
        const auto it = by_key.find({row.key.k_index, row.key.pair_index, row.key.t});
        if (it == by_key.end()) {
            throw Error(ErrorCode::MissingRoute, "no operator value for pair " + std::to_string(row.key.pair_index) +
                                                     " at t=" + format_number(row.key.t));
        }
        ComparisonRow c;
        c.key = row.key;
        c.operator_value = it->second->value;
        c.mc_value = row.fit.limit;
        c.error = row.fit.error;
        const double diff = std::abs(c.operator_value - c.mc_value);
        if (c.error > 0.0) {
            c.pull = diff / c.error;
        } else {
            c.pull = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
        c.stable = row.fit.stable;
        c.pass = c.stable && c.pull < thresholds.pull_pass;
        if (c.pass) ++good;
        if (!c.stable) {
            report.warnings.push_back("pair " + std::to_string(c.key.pair_index) + " t=" + format_number(c.key.t) +
                                      ": unstable extrapolation: " + row.fit.diagnostic);
        }
        report.max_pull = std::max(report.max_pull, c.pull);
        report.rows.push_back(c);
    }
    if (report.rows.empty()) {
        report.warnings.push_back("no comparison rows; passing vacuously");
        report.pass_fraction = 1.0;
        report.passed = true;
        return report;
    }
    report.pass_fraction = static_cast<double>(good) / static_cast<double>(report.rows.size());
    report.passed = report.pass_fraction >= thresholds.pass_fraction && report.max_pull <= thresholds.pull_max;
    return report;
}

CsvTable operator_table(const ExperimentConfig& config, const OperatorRoute& route) {
    CsvTable t;
    t.comments = common_comments(config, "operator-route propagator kernel");
    std::ostringstream os;
    os << "quadrature points_per_level=" << config.quadrature.points_per_level
       << " theta_tol=" << format_number(config.quadrature.theta_tol);
    for (std::size_t i = 0; i < route.gram_residuals.size(); ++i) {
        os << " gram_residual[" << i << "]=" << format_number(route.gram_residuals[i])
           << " unitarity_defect[" << i << "]=" << format_number(route.unitarity_defects[i]);
    }
    t.comments.push_back(os.str());
    t.header = with_key_header({"re", "im"});
    for (const auto& row : route.rows) {
        auto cells = key_cells(row.key);
        cells.push_back(format_number(row.value.real()));
        cells.push_back(format_number(row.value.imag()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

CsvTable mc_table(const ExperimentConfig& config, const McRoute& route) {
    const Setup s = make_setup(config);
    CsvTable t;
    t.comments = common_comments(config, "path-integral estimates per r");
    t.comments.push_back("master seed=" + std::to_string(config.mc.seed));
    t.header = with_key_header({"r", "M", "n_samples", "seed", "terms", "truncation_tol", "control_variate",
                                "levy_correction", "re", "im", "std_error", "transient_re", "transient_im"});
    for (const auto& run : route.runs) {
        const auto& pair = s.pairs[static_cast<std::size_t>(run.pair_index)];
        const auto& k = s.ks[static_cast<std::size_t>(run.k_index)];
        for (const auto& e : run.results) {
            auto cells = key_cells(make_key(k, run.k_index, pair, run.pair_index, e.t));
            cells.push_back(format_number(e.r));
            cells.push_back(std::to_string(e.steps));
            cells.push_back(std::to_string(e.n_samples));
            cells.push_back(std::to_string(e.seed));
            cells.push_back(std::to_string(e.terms));
            cells.push_back(format_number(config.mc.truncation_tol));
            cells.push_back(config.mc.control_variate ? "1" : "0");
            cells.push_back(config.mc.levy_correction ? "1" : "0");
            cells.push_back(format_number(e.value.real()));
            cells.push_back(format_number(e.value.imag()));
            cells.push_back(format_number(e.std_error));
            cells.push_back(format_number(e.transient.real()));
            cells.push_back(format_number(e.transient.imag()));
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

CsvTable extrapolation_table(const ExperimentConfig& config, const McRoute& route) {
    CsvTable t;
    t.comments = common_comments(config, "r -> infinity extrapolation");
    std::ostringstream os;
    os << "model=" << to_string(config.mc.extrapolation) << " order=" << config.mc.order
       << " decay_term=" << (config.mc.decay_term ? 1 : 0) << " r=";
    for (std::size_t i = 0; i < config.mc.r.size(); ++i) os << (i ? ";" : "") << format_number(config.mc.r[i]);
    t.comments.push_back(os.str());
    t.header = with_key_header({"model", "A_re", "A_im", "A_error", "B_re", "B_im", "c", "D_re", "D_im", "plateau",
                                "chi2", "dof", "stable"});
    for (const auto& row : route.rows) {
        auto cells = key_cells(row.key);
        const auto& f = row.fit;
        cells.push_back(f.constant_model ? "constant" : to_string(f.model));
        for (double v : {f.limit.real(), f.limit.imag(), f.error, f.amplitude.real(), f.amplitude.imag(), f.rate,
                         f.decay_amplitude.real(), f.decay_amplitude.imag(), f.plateau, f.chi2}) {
            cells.push_back(format_number(v));
        }
        cells.push_back(std::to_string(f.dof));
        cells.push_back(f.stable ? "1" : "0");
        t.rows.push_back(std::move(cells));
    }
    return t;
}

CsvTable budget_table(const ExperimentConfig& config, const McRoute& route) {
    const Setup s = make_setup(config);
    const auto& mc = config.mc;
    CsvTable t;
    t.comments = common_comments(config, "variance budget");
    t.comments.push_back("target_error=" + (mc.target_error ? format_number(*mc.target_error) : std::string("none")) +
                         " max_samples=" + std::to_string(mc.max_samples) +
                         " pilot_samples=" + std::to_string(mc.pilot_samples));
    t.header = {"k_index", "pair", "r", "M", "terms", "a_priori_error", "pilot_sigma", "requested", "used",
                "achieved_error", "budget_ok"};
    double tmax = 0.0;
    for (double v : config.dynamics.t) tmax = std::max(tmax, std::abs(v));
    for (const auto& run : route.runs) {
        const auto& pair = s.pairs[static_cast<std::size_t>(run.pair_index)];
        const auto terms = torus_terms(pair.x_prime, pair.x, s.geom, mc.truncation_tol);
        const double bound = summand_bound(mc, s.h, tmax, s.geom.hbar()) *
                             torus_error_bound(pair.x_prime, pair.x, run.r, s.geom.hbar(), run.used, terms);
        t.rows.push_back({std::to_string(run.k_index), std::to_string(run.pair_index), format_number(run.r),
                          std::to_string(run.steps), std::to_string(run.terms), format_number(bound),
                          format_number(run.pilot_sigma), std::to_string(run.requested), std::to_string(run.used),
                          format_number(run.achieved_error), run.budget_ok ? "1" : "0"});
    }
    return t;
}

CsvTable comparison_table(const ExperimentConfig& config, const ComparisonReport& report) {
    CsvTable t;
    t.comments = common_comments(config, "operator route vs path-integral route");
    std::ostringstream os;
    os << "pull_pass=" << format_number(config.comparison.pull_pass)
       << " pull_max=" << format_number(config.comparison.pull_max)
       << " pass_fraction=" << format_number(config.comparison.pass_fraction)
       << " observed_fraction=" << format_number(report.pass_fraction)
       << " max_pull=" << format_number(report.max_pull) << " suite=" << (report.passed ? "PASS" : "FAIL");
    t.comments.push_back(os.str());
    for (const auto& w : report.warnings) t.comments.push_back("warning: " + w);
    t.header = with_key_header({"operator_re", "operator_im", "mc_re", "mc_im", "error", "pull", "stable", "pass"});
    for (const auto& row : report.rows) {
        auto cells = key_cells(row.key);
        for (double v : {row.operator_value.real(), row.operator_value.imag(), row.mc_value.real(),
                         row.mc_value.imag(), row.error, row.pull}) {
            cells.push_back(format_number(v));
        }
        cells.push_back(row.stable ? "1" : "0");
        cells.push_back(row.pass ? "1" : "0");
        t.rows.push_back(std::move(cells));
    }
    return t;
}

RunSummary run_experiment(const ExperimentConfig& config, RunMode mode, int jobs, const ProgressSink& progress) {
    validate_config(config);
    const fs::path dir = config.output.directory;
    RunSummary summary;
    auto emit = [&](const fs::path& name, const std::string& text) {
        const fs::path path = dir / name;
        write_text_atomic(path, text);
        summary.written.push_back(path);
    };
    auto say = [&](const std::string& msg) {
        if (progress) progress(msg);
    };
    try {
        const Setup s = make_setup(config);
        say("geometry: N=" + std::to_string(s.geom.level()) + ", " + std::to_string(s.ks.size()) + " character(s), " +
            std::to_string(s.pairs.size()) + " point pair(s)");
        std::optional<OperatorRoute> op;
        std::optional<McRoute> mc;
        if (mode == RunMode::Operator || mode == RunMode::Compare) {
            op = run_operator_route(config);
            say("operator route done");
        }
        if (mode == RunMode::MonteCarlo || mode == RunMode::Compare) {
            mc = run_mc_route(config, jobs, progress);
            summary.budget_ok = mc->budget_ok;
        }
        emit("config.used.yaml", serialize_config(config));
        if (op) {
            emit(config.output.operator_report, to_csv_text(operator_table(config, *op)));
            for (std::size_t i = 0; i < op->hamiltonians.size(); ++i) {
                const fs::path path = dir / ("hamiltonian_k" + std::to_string(i) + ".csv");
                write_matrix_csv(path, op->hamiltonians[i],
                                 common_comments(config, "Hamiltonian matrix, character " + std::to_string(i)));
                summary.written.push_back(path);
            }
        }
        if (mc) {
            emit(config.output.mc_report, to_csv_text(mc_table(config, *mc)));
            emit(config.output.extrapolation_report, to_csv_text(extrapolation_table(config, *mc)));
            emit(config.output.budget_report, to_csv_text(budget_table(config, *mc)));
        }
        if (op && mc) {
            summary.comparison = compare_propagators(&*op, &*mc, config.comparison);
            emit(config.output.comparison_report, to_csv_text(comparison_table(config, *summary.comparison)));
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& p : summary.written) fs::remove(p, ec);
        throw;
    }
    return summary;
}

}  // namespace btq
