// SPDX-License-Identifier: Apache-2.0
#include "btq/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "btq/csv.hpp"
#include "btq/error.hpp"

namespace btq {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw Error(ErrorCode::ConfigError, path + ": " + msg);
}

void require_map(const YAML::Node& node, const std::string& path) {
    if (!node.IsMap()) fail(path, "expected a mapping");
}

void check_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> allowed) {
    require_map(node, path);
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!ok.contains(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
    }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

template <class T>
T scalar(const YAML::Node& node, const std::string& path) {
    if (!node.IsScalar()) fail(path, "expected a scalar");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        fail(path, "cannot read '" + node.Scalar() + "'");
    }
}

double number(const YAML::Node& node, const std::string& path) {
    const double v = scalar<double>(node, path);
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
}

template <class T>
void read_opt(const YAML::Node& parent, const std::string& path, const char* key, T& out) {
    if (const auto n = parent[key]) out = scalar<T>(n, join(path, key));
}

void read_number(const YAML::Node& parent, const std::string& path, const char* key, double& out) {
    if (const auto n = parent[key]) out = number(n, join(path, key));
}

std::vector<double> number_list(const YAML::Node& node, const std::string& path) {
    if (!node.IsSequence()) fail(path, "expected a list");
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(number(node[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

void parse_geometry(const YAML::Node& node, GeometryConfig& g) {
    const std::string path = "geometry";
    check_keys(node, path, {"a", "b", "hbar", "level", "aspect"});
    read_number(node, path, "hbar", g.hbar);
    const bool explicit_sides = node["a"] || node["b"];
    const bool by_level = node["level"] || node["aspect"];
    if (explicit_sides && by_level) fail(path, "give either (a, b) or (level, aspect), not both");
    if (by_level) {
        if (!node["level"]) fail(join(path, "level"), "missing");
        const int level = scalar<int>(node["level"], join(path, "level"));
        double aspect = 1.0;
        read_number(node, path, "aspect", aspect);
        if (level < 1) fail(join(path, "level"), "must be >= 1");
        if (!(aspect > 0.0)) fail(join(path, "aspect"), "must be > 0");
        if (!(g.hbar > 0.0)) fail(join(path, "hbar"), "must be > 0");
        const double area = kTwoPi * g.hbar * level;
        g.a = std::sqrt(area * aspect);
        g.b = area / g.a;
    } else {
        if (!node["a"] || !node["b"]) fail(path, "needs a and b (or level)");
        g.a = number(node["a"], join(path, "a"));
        g.b = number(node["b"], join(path, "b"));
    }
}

void parse_character(const YAML::Node& node, CharacterConfig& c) {
    const std::string path = "character";
    check_keys(node, path, {"k1", "k2", "grid"});
    if (const auto grid = node["grid"]) {
        if (node["k1"] || node["k2"]) fail(path, "give either k1/k2 or grid, not both");
        if (!grid.IsSequence() || grid.size() != 2) fail(join(path, "grid"), "expected [n1, n2]");
        c.grid1 = scalar<int>(grid[0], join(path, "grid[0]"));
        c.grid2 = scalar<int>(grid[1], join(path, "grid[1]"));
        if (c.grid1 < 1 || c.grid2 < 1) fail(join(path, "grid"), "sizes must be >= 1");
        return;
    }
    read_number(node, path, "k1", c.k1);
    read_number(node, path, "k2", c.k2);
}

void parse_symbol(const YAML::Node& node, std::vector<FourierTerm>& terms) {
    const std::string path = "symbol";
    check_keys(node, path, {"coefficients"});
    const auto rows = node["coefficients"];
    if (!rows) fail(join(path, "coefficients"), "missing");
    if (!rows.IsSequence()) fail(join(path, "coefficients"), "expected a list of [m, n, re, im]");
    terms.clear();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string p = join(path, "coefficients[" + std::to_string(i) + "]");
        const auto row = rows[i];
        if (!row.IsSequence() || (row.size() != 3 && row.size() != 4)) fail(p, "expected [m, n, re] or [m, n, re, im]");
        FourierTerm t;
        t.m = scalar<int>(row[0], p + "[0]");
        t.n = scalar<int>(row[1], p + "[1]");
        const double re = number(row[2], p + "[2]");
        const double im = row.size() == 4 ? number(row[3], p + "[3]") : 0.0;
        t.c = {re, im};
        terms.push_back(t);
    }
}

void parse_dynamics(const YAML::Node& node, DynamicsConfig& d) {
    const std::string path = "dynamics";
    check_keys(node, path, {"t", "pairs"});
    if (const auto t = node["t"]) d.t = number_list(t, join(path, "t"));
    if (const auto pairs = node["pairs"]) {
        if (!pairs.IsSequence()) fail(join(path, "pairs"), "expected a list of [p', q', p, q]");
        d.pairs.clear();
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const std::string p = join(path, "pairs[" + std::to_string(i) + "]");
            const auto v = number_list(pairs[i], p);
            if (v.size() != 4) fail(p, "expected [p', q', p, q]");
            d.pairs.push_back({{v[0], v[1]}, {v[2], v[3]}});
        }
    }
}

void parse_mc(const YAML::Node& node, McConfig& mc) {
    const std::string path = "mc";
    check_keys(node, path,
               {"r", "steps_per_unit", "n_samples", "seed", "truncation_tol", "control_variate", "levy_correction", "target_error",
                "pilot_samples", "max_samples", "extrapolation", "order", "decay_term"});
    if (const auto r = node["r"]) mc.r = number_list(r, join(path, "r"));
    read_number(node, path, "steps_per_unit", mc.steps_per_unit);
    read_opt(node, path, "n_samples", mc.n_samples);
    read_opt(node, path, "seed", mc.seed);
    read_number(node, path, "truncation_tol", mc.truncation_tol);
    read_opt(node, path, "control_variate", mc.control_variate);
    read_opt(node, path, "levy_correction", mc.levy_correction);
    if (const auto te = node["target_error"]) {
        if (te.IsNull()) {
            mc.target_error.reset();
        } else {
            mc.target_error = number(te, join(path, "target_error"));
        }
    }
    read_opt(node, path, "pilot_samples", mc.pilot_samples);
    read_opt(node, path, "max_samples", mc.max_samples);
    if (const auto e = node["extrapolation"]) {
        const auto name = scalar<std::string>(e, join(path, "extrapolation"));
        try {
            mc.extrapolation = parse_extrapolation_model(name);
        } catch (const Error&) {
            fail(join(path, "extrapolation"), "expected exponential or inverse_power, got '" + name + "'");
        }
    }
    read_opt(node, path, "order", mc.order);
    read_opt(node, path, "decay_term", mc.decay_term);
}

void parse_quadrature(const YAML::Node& node, QuadratureConfig& q) {
    const std::string path = "quadrature";
    check_keys(node, path, {"points_per_level", "gram_tol", "theta_tol", "kernel_tol"});
    read_opt(node, path, "points_per_level", q.points_per_level);
    read_number(node, path, "gram_tol", q.gram_tol);
    read_number(node, path, "theta_tol", q.theta_tol);
    read_number(node, path, "kernel_tol", q.kernel_tol);
}

void parse_comparison(const YAML::Node& node, ComparisonConfig& c) {
    const std::string path = "comparison";
    check_keys(node, path, {"pull_pass", "pull_max", "pass_fraction"});
    read_number(node, path, "pull_pass", c.pull_pass);
    read_number(node, path, "pull_max", c.pull_max);
    read_number(node, path, "pass_fraction", c.pass_fraction);
}

void parse_output(const YAML::Node& node, OutputConfig& o) {
    const std::string path = "output";
    check_keys(node, path,
               {"directory", "operator_report", "mc_report", "extrapolation_report", "budget_report",
                "comparison_report"});
    read_opt(node, path, "directory", o.directory);
    read_opt(node, path, "operator_report", o.operator_report);
    read_opt(node, path, "mc_report", o.mc_report);
    read_opt(node, path, "extrapolation_report", o.extrapolation_report);
    read_opt(node, path, "budget_report", o.budget_report);
    read_opt(node, path, "comparison_report", o.comparison_report);
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

std::string num(double v) { return format_number(v); }

std::string list(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
    return out + "]";
}

void check(bool ok, const std::string& path, const std::string& msg) {
    if (!ok) fail(path, msg);
}

void check_report_name(const std::string& name, const std::string& path) {
    check(!name.empty(), path, "must not be empty");
    check(name.find('/') == std::string::npos && name != "." && name != "..", path, "must be a plain file name");
}

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("YAML syntax: ") + e.what());
    }
    if (!root.IsMap()) throw Error(ErrorCode::ConfigError, "top level must be a mapping");
    check_keys(root, "", {"geometry", "character", "symbol", "dynamics", "mc", "quadrature", "comparison", "output"});
    for (const char* required : {"geometry", "symbol"}) {
        if (!root[required]) fail(required, "required section missing");
    }
    ExperimentConfig cfg;
    parse_geometry(root["geometry"], cfg.geometry);
    if (const auto n = root["character"]) parse_character(n, cfg.character);
    parse_symbol(root["symbol"], cfg.symbol);
    if (const auto n = root["dynamics"]) parse_dynamics(n, cfg.dynamics);
    if (const auto n = root["mc"]) parse_mc(n, cfg.mc);
    if (const auto n = root["quadrature"]) parse_quadrature(n, cfg.quadrature);
    if (const auto n = root["comparison"]) parse_comparison(n, cfg.comparison);
    if (const auto n = root["output"]) parse_output(n, cfg.output);
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "geometry:\n"
       << "  a: " << num(c.geometry.a) << "\n"
       << "  b: " << num(c.geometry.b) << "\n"
       << "  hbar: " << num(c.geometry.hbar) << "\n";
    os << "character:\n";
    if (c.character.grid1 > 0) {
        os << "  grid: [" << c.character.grid1 << ", " << c.character.grid2 << "]\n";
    } else {
        os << "  k1: " << num(c.character.k1) << "\n  k2: " << num(c.character.k2) << "\n";
    }
    os << "symbol:\n  coefficients:";
    if (c.symbol.empty()) os << " []";
    os << "\n";
    for (const auto& t : c.symbol) {
        os << "    - [" << t.m << ", " << t.n << ", " << num(t.c.real()) << ", " << num(t.c.imag()) << "]\n";
    }
    os << "dynamics:\n  t: " << list(c.dynamics.t) << "\n  pairs:";
    if (c.dynamics.pairs.empty()) os << " []";
    os << "\n";
    for (const auto& p : c.dynamics.pairs) {
        os << "    - " << list({p.x_prime.p, p.x_prime.q, p.x.p, p.x.q}) << "\n";
    }
    const auto& mc = c.mc;
    os << "mc:\n"
       << "  r: " << list(mc.r) << "\n"
       << "  steps_per_unit: " << num(mc.steps_per_unit) << "\n"
       << "  n_samples: " << mc.n_samples << "\n"
       << "  seed: " << mc.seed << "\n"
       << "  truncation_tol: " << num(mc.truncation_tol) << "\n"
       << "  control_variate: " << (mc.control_variate ? "true" : "false") << "\n"
       << "  levy_correction: " << (mc.levy_correction ? "true" : "false") << "\n"
       << "  target_error: " << (mc.target_error ? num(*mc.target_error) : std::string("null")) << "\n"
       << "  pilot_samples: " << mc.pilot_samples << "\n"
       << "  max_samples: " << mc.max_samples << "\n"
       << "  extrapolation: " << to_string(mc.extrapolation) << "\n"
       << "  order: " << mc.order << "\n"
       << "  decay_term: " << (mc.decay_term ? "true" : "false") << "\n";
    const auto& q = c.quadrature;
    os << "quadrature:\n"
       << "  points_per_level: " << q.points_per_level << "\n"
       << "  gram_tol: " << num(q.gram_tol) << "\n"
       << "  theta_tol: " << num(q.theta_tol) << "\n"
       << "  kernel_tol: " << num(q.kernel_tol) << "\n";
    os << "comparison:\n"
       << "  pull_pass: " << num(c.comparison.pull_pass) << "\n"
       << "  pull_max: " << num(c.comparison.pull_max) << "\n"
       << "  pass_fraction: " << num(c.comparison.pass_fraction) << "\n";
    const auto& o = c.output;
    os << "output:\n"
       << "  directory: " << quoted(o.directory) << "\n"
       << "  operator_report: " << quoted(o.operator_report) << "\n"
       << "  mc_report: " << quoted(o.mc_report) << "\n"
       << "  extrapolation_report: " << quoted(o.extrapolation_report) << "\n"
       << "  budget_report: " << quoted(o.budget_report) << "\n"
       << "  comparison_report: " << quoted(o.comparison_report) << "\n";
    return os.str();
}

void validate_config(const ExperimentConfig& c) {
    const TorusGeometry geom = make_geometry(c);
    static_cast<void>(make_symbol(c, geom));

    check(!c.dynamics.t.empty(), "dynamics.t", "needs at least one time");
    for (const auto& p : c.dynamics.pairs) {
        check(p.x.finite() && p.x_prime.finite(), "dynamics.pairs", "points must be finite");
    }

    const auto& mc = c.mc;
    for (std::size_t i = 0; i < mc.r.size(); ++i) {
        check(mc.r[i] > 0.0, "mc.r[" + std::to_string(i) + "]", "must be > 0");
    }
    const std::set<double> distinct(mc.r.begin(), mc.r.end());
    const bool inverse = mc.extrapolation == ExtrapolationModel::InversePower;
    check(inverse || !mc.decay_term, "mc.decay_term", "only applies to the inverse_power model");
    const std::size_t need = inverse ? static_cast<std::size_t>(mc.order) + 2 + (mc.decay_term ? 1 : 0) : 3;
    check(distinct.size() >= need, "mc.r", "needs at least " + std::to_string(need) + " distinct values for the " +
                                              to_string(mc.extrapolation) + " model");
    check(mc.order >= 1 && mc.order <= 6, "mc.order", "must be in 1..6");
    check(mc.steps_per_unit > 0.0, "mc.steps_per_unit", "must be > 0");
    check(mc.n_samples >= 2, "mc.n_samples", "must be >= 2");
    check(mc.truncation_tol > 0.0 && mc.truncation_tol < 1.0, "mc.truncation_tol", "must be in (0, 1)");
    if (mc.target_error) check(*mc.target_error > 0.0, "mc.target_error", "must be > 0");
    check(mc.pilot_samples >= 2, "mc.pilot_samples", "must be >= 2");
    check(mc.max_samples >= mc.n_samples, "mc.max_samples", "must be >= n_samples");

    const auto& q = c.quadrature;
    check(q.points_per_level >= 4, "quadrature.points_per_level", "must be >= 4");
    check(q.gram_tol > 0.0, "quadrature.gram_tol", "must be > 0");
    check(q.theta_tol > 0.0 && q.theta_tol < 1.0, "quadrature.theta_tol", "must be in (0, 1)");
    check(q.kernel_tol > 0.0 && q.kernel_tol < 1.0, "quadrature.kernel_tol", "must be in (0, 1)");

    const auto& cmp = c.comparison;
    check(cmp.pull_pass > 0.0, "comparison.pull_pass", "must be > 0");
    check(cmp.pull_max >= cmp.pull_pass, "comparison.pull_max", "must be >= pull_pass");
    check(cmp.pass_fraction >= 0.0 && cmp.pass_fraction <= 1.0, "comparison.pass_fraction", "must be in [0, 1]");

    check(!c.output.directory.empty(), "output.directory", "must not be empty");
    check_report_name(c.output.operator_report, "output.operator_report");
    check_report_name(c.output.mc_report, "output.mc_report");
    check_report_name(c.output.extrapolation_report, "output.extrapolation_report");
    check_report_name(c.output.budget_report, "output.budget_report");
    check_report_name(c.output.comparison_report, "output.comparison_report");
}

TorusGeometry make_geometry(const ExperimentConfig& c) {
    return TorusGeometry::validate(c.geometry.a, c.geometry.b, c.geometry.hbar);
}

FourierSymbol make_symbol(const ExperimentConfig& c, const TorusGeometry& geom) { return FourierSymbol(geom, c.symbol); }

std::vector<CharacterK> make_characters(const ExperimentConfig& c, const TorusGeometry& geom) {
    if (c.character.grid1 > 0) return CharacterK::uniform_grid(geom, c.character.grid1, c.character.grid2);
    return {CharacterK(c.character.k1, c.character.k2, geom)};
}

std::vector<PointPair> default_point_pairs(const TorusGeometry& geom) {
    // Quarter offsets keep every point off the cell centre, where the N = 1
    // theta function with k = 0 vanishes and the kernel would be trivially zero.
    auto cell = [&](int i, int j) { return PlanePoint{(i + 0.25) * geom.a() / 3.0, (j + 0.25) * geom.b() / 3.0}; };
    return {
        {cell(1, 1), cell(1, 1)}, {cell(2, 1), cell(1, 1)}, {cell(1, 2), cell(1, 1)},
        {cell(2, 2), cell(1, 1)}, {cell(0, 0), cell(2, 2)}, {cell(2, 0), cell(0, 2)},
    };
}

std::vector<PointPair> point_pairs(const ExperimentConfig& c, const TorusGeometry& geom) {
    return c.dynamics.pairs.empty() ? default_point_pairs(geom) : c.dynamics.pairs;
}

int steps_for(const McConfig& mc, double r, double hbar) {
    return std::max(2, static_cast<int>(std::ceil(mc.steps_per_unit * r * hbar)));
}

}  // namespace btq
