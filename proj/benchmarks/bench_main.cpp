// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot paths: the sampler inner loop, the plane
// projection, the torus kernel and basis, Hamiltonian assembly, fast_cos.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "btq/path_integral.hpp"
#include "btq/plane.hpp"
#include "btq/torus.hpp"
#include "fast_cos.hpp"

namespace {

using namespace btq;

TorusGeometry square(int level) {
    const double side = std::sqrt(kTwoPi * level);
    return TorusGeometry::validate(side, side, 1.0);
}

FourierSymbol cos_q(const TorusGeometry& g) {
    return FourierSymbol(g, {{0, 1, Complex(0.5, 0.0)}, {0, -1, Complex(0.5, 0.0)}});
}

// Cost per sampled step of the plane estimator.
void BM_EstimatorSteps(benchmark::State& state) {
    const auto g = square(1);
    const auto h = cos_q(g);
    DkParams p;
    p.r = 4.0;
    p.steps = static_cast<int>(state.range(0));
    p.n_samples = 2000;
    p.seed = 7;
    p.control_variate = true;
    const std::vector<double> ts{0.2, 0.5};
    for (auto _ : state) benchmark::DoNotOptimize(dk_estimate_plane({0.3, 0.4}, {1.1, 0.2}, h, ts, p));
    state.SetItemsProcessed(state.iterations() * p.n_samples * p.steps);
}
BENCHMARK(BM_EstimatorSteps)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ProjectK(benchmark::State& state) {
    const double hbar = 1.0;
    const auto n = static_cast<int>(state.range(0));
    const auto lattice = PlaneLattice::covering({0.0, 0.0}, 1.0, hbar, n);
    const auto psi = SampledState::sample(lattice, [&](PlanePoint y) { return kernel_K(y, {0.4, -0.2}, hbar); });
    for (auto _ : state) benchmark::DoNotOptimize(project_K(psi, hbar));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(lattice.size()));
}
BENCHMARK(BM_ProjectK)->Arg(48)->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_KernelKk(benchmark::State& state) {
    const auto g = square(static_cast<int>(state.range(0)));
    const CharacterK k(0.1, 0.2, g);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, g.a());
    std::vector<PlanePoint> pts(256);
    for (auto& x : pts) x = {u(rng), u(rng)};
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernel_Kk(pts[i % 256], pts[(i + 97) % 256], g, k));
        ++i;
    }
}
BENCHMARK(BM_KernelKk)->Arg(1)->Arg(4)->Arg(16);

void BM_BasisEvaluate(benchmark::State& state) {
    const auto g = square(static_cast<int>(state.range(0)));
    const BasisSet basis(g, CharacterK(0.1, 0.2, g));
    PlanePoint x{0.3, 0.7};
    for (auto _ : state) {
        benchmark::DoNotOptimize(basis.phi_all(x));
        x.p += 1e-3;
    }
}
BENCHMARK(BM_BasisEvaluate)->Arg(1)->Arg(4)->Arg(16);

void BM_AssembleHamiltonian(benchmark::State& state) {
    const auto g = square(static_cast<int>(state.range(0)));
    const BasisSet basis(g, CharacterK(0.0, 0.0, g));
    const auto h = cos_q(g);
    const auto quad = TorusQuadrature::default_for(g);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_hamiltonian(h, basis, quad));
}
BENCHMARK(BM_AssembleHamiltonian)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

template <double (*Cos)(double)>
void BM_Cos(benchmark::State& state) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    std::vector<double> xs(4096);
    for (auto& x : xs) x = u(rng);
    for (auto _ : state) {
        double acc = 0.0;
        for (const double x : xs) acc += Cos(x);
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
double std_cos(double x) { return std::cos(x); }
double fast(double x) { return detail::fast_cos(x); }
BENCHMARK(BM_Cos<std_cos>)->Name("BM_StdCos");
BENCHMARK(BM_Cos<fast>)->Name("BM_FastCos");

}  // namespace
BENCHMARK_MAIN();
