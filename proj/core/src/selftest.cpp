// SPDX-License-Identifier: Apache-2.0
#include "btq/selftest.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "btq/config.hpp"
#include "btq/path_integral.hpp"
#include "btq/plane.hpp"
#include "btq/rng.hpp"
#include "btq/torus.hpp"

namespace btq {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

TorusGeometry square(int level) {
    const double b = std::sqrt(kTwoPi);
    return TorusGeometry::validate(level * b, b, 1.0);
}

SelfTestResult kernel_hermitian(std::uint64_t seed) {
    Xoshiro256pp rng(seed);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const PlanePoint x{u(rng), u(rng)};
        const PlanePoint y{u(rng), u(rng)};
        worst = std::max(worst, std::abs(kernel_K(x, y, 1.0) - std::conj(kernel_K(y, x, 1.0))));
    }
    return {"plane kernel Hermitian symmetry", worst <= 1e-15, "max defect " + fmt(worst)};
}

SelfTestResult group_law() {
    int failures = 0;
    for (int level = 1; level <= 3; ++level) {
        const auto geom = square(level);
        for (const auto& k : CharacterK::uniform_grid(geom, 2, 2)) {
            for (int m1 = -2; m1 <= 2; ++m1)
                for (int n1 = -2; n1 <= 2; ++n1)
                    for (int m2 = -2; m2 <= 2; ++m2)
                        for (int n2 = -2; n2 <= 2; ++n2) {
                            if (!check_group_law(geom, k, GridVector(m1, n1, geom), GridVector(m2, n2, geom))) ++failures;
                        }
        }
    }
    return {"torus group law, N = 1..3", failures == 0, std::to_string(failures) + " failures"};
}

SelfTestResult gram_identity() {
    double worst = 0.0;
    for (int level = 1; level <= 3; ++level) {
        const auto geom = square(level);
        const BasisSet basis(geom, CharacterK(0.3, -0.7, geom));
        const auto g = gram_matrix(basis, TorusQuadrature::default_for(geom));
        worst = std::max(worst, (g - Eigen::MatrixXcd::Identity(level, level)).cwiseAbs().maxCoeff());
    }
    return {"basis Gram matrix is the identity", worst <= 1e-8, "max deviation " + fmt(worst)};
}

SelfTestResult kernel_routes(std::uint64_t seed) {
    Xoshiro256pp rng(seed + 1);
    const auto geom = square(2);
    const CharacterK k(0.4, 0.9, geom);
    const BasisSet basis(geom, k);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const PlanePoint x{u(rng) * geom.a(), u(rng) * geom.b()};
        const PlanePoint y{u(rng) * geom.a(), u(rng) * geom.b()};
        const Complex series = basis.phi_all(x).dot(basis.phi_all(y));
        worst = std::max(worst, std::abs(series - kernel_Kk(x, y, geom, k)));
    }
    return {"basis and grid-sum kernels agree", worst <= 1e-7, "max difference " + fmt(worst)};
}

SelfTestResult constant_hamiltonian() {
    const auto geom = square(3);
    const BasisSet basis(geom, CharacterK(0.0, 0.0, geom));
    const auto H = assemble_hamiltonian(FourierSymbol::constant(geom, 1.7), basis, TorusQuadrature::default_for(geom));
    const double dev = (H.entries() - 1.7 * Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff();
    return {"constant symbol gives c times identity", dev <= 1e-8, "max deviation " + fmt(dev)};
}

SelfTestResult unitarity() {
    const auto geom = square(3);
    const FourierSymbol h(geom, {{1, 0, {0.5, 0}}, {-1, 0, {0.5, 0}}, {0, 1, {0.5, 0}}, {0, -1, {0.5, 0}}});
    const BasisSet basis(geom, CharacterK(0.2, 0.1, geom));
    const auto H = assemble_hamiltonian(h, basis, TorusQuadrature::default_for(geom));
    double worst = 0.0;
    for (double t : {0.1, 1.0, 10.0}) worst = std::max(worst, propagator_matrix(H, t, 1.0).unitarity_defect());
    return {"propagator is unitary", worst <= 1e-10, "max defect " + fmt(worst)};
}

SelfTestResult bridge_moments(std::uint64_t seed) {
    const BridgeSpec spec{{0.3, -0.2}, {1.1, 0.5}, 3.0, 6, 1.0};
    const int n = 20000;
    double mean = 0.0;
    double m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto path = sample_bridge(spec, derive_seed(seed, {i}));
        const double v = path.points[2].p;  // s = r/3
        mean += v;
        m2 += v * v;
    }
    mean /= n;
    const double var = m2 / n - mean * mean;
    const double expect_mean = 0.3 + (1.1 - 0.3) / 3.0;
    const double expect_var = 3.0 * (1.0 / 3.0) * (2.0 / 3.0);  // hbar^2 s (r - s) / r
    const double z_mean = std::abs(mean - expect_mean) / std::sqrt(expect_var / n);
    const double z_var = std::abs(var - expect_var) / (expect_var * std::sqrt(2.0 / n));
    return {"Brownian bridge marginal moments", z_mean < 5.0 && z_var < 5.0,
            "z(mean) " + fmt(z_mean) + ", z(var) " + fmt(z_var)};
}

SelfTestResult config_round_trip() {
    const std::string text =
        "geometry: {level: 2, hbar: 1}\n"
        "character: {k1: 0.25, k2: -0.5}\n"
        "symbol: {coefficients: [[0, 1, 0.5], [0, -1, 0.5]]}\n"
        "dynamics: {t: [0.2, 0.5]}\n"
        "mc: {r: [3, 4, 5, 6], extrapolation: inverse_power, control_variate: true, target_error: 0.01}\n";
    const auto first = parse_config(text);
    const auto second = parse_config(serialize_config(first));
    return {"config parse/serialize round trip", first == second, first == second ? "identical" : "differs"};
}

}  // namespace

std::vector<SelfTestResult> run_selftests(std::uint64_t seed) {
    const std::vector<std::function<SelfTestResult()>> checks{
        [&] { return kernel_hermitian(seed); },
        [] { return group_law(); },
        [] { return gram_identity(); },
        [&] { return kernel_routes(seed); },
        [] { return constant_hamiltonian(); },
        [] { return unitarity(); },
        [&] { return bridge_moments(seed); },
        [] { return config_round_trip(); },
    };
    const char* names[] = {"plane kernel Hermitian symmetry", "torus group law, N = 1..3",
                           "basis Gram matrix is the identity", "basis and grid-sum kernels agree",
                           "constant symbol gives c times identity", "propagator is unitary",
                           "Brownian bridge marginal moments", "config parse/serialize round trip"};
    std::vector<SelfTestResult> out;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        try {
            out.push_back(checks[i]());
        } catch (const std::exception& e) {
            out.push_back({names[i], false, std::string("exception: ") + e.what()});
        }
    }
    return out;
}

}  // namespace btq
