// SPDX-License-Identifier: Apache-2.0
//
// Wiener-regularized phase-space path integral. Brownian bridges are sampled
// exactly on a uniform time grid; the area term of the action uses the
// midpoint (Stratonovich) rule and the Hamiltonian term the trapezoid rule.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "btq/phase_space.hpp"

namespace btq {

/// Bridge from start (time 0) to end (time duration) with covariance
/// hbar^2 (min(s,u) - s u / r) per component.
struct BridgeSpec {
    PlanePoint start;
    PlanePoint end;
    double duration = 1.0;
    int steps = 2;
    double hbar = 1.0;

    void validate() const;
};

struct PathSample {
    std::vector<double> times;
    std::vector<PlanePoint> points;
};

PathSample sample_bridge(const BridgeSpec& spec, std::uint64_t seed);

/// 1/2 integral (b1 db2 - b2 db1) with the midpoint rule, equal to the
/// shoelace sum 1/2 sum_m (p_m q_{m+1} - p_{m+1} q_m).
[[nodiscard]] double stratonovich_area(const PathSample& path);

/// Trapezoid rule for integral_0^r h(b(s)) ds.
[[nodiscard]] double symbol_integral(const PathSample& path, const FourierSymbol& h);

/// S_r(b) = stratonovich_area(b) - (t/r) integral_0^r h(b(s)) ds.
[[nodiscard]] double action(const PathSample& path, const FourierSymbol& h, double t);

/// Conditional Wiener density (1/(2 pi hbar^2 r)) exp{-|x'-x|^2 / (2 hbar^2 r)}.
[[nodiscard]] double wiener_prefactor(PlanePoint x_prime, PlanePoint x, double r, double hbar);

/// Continuum value of the t = 0 estimator at finite r:
/// exp{i(p q' - p' q)/2hbar - |x'-x|^2 coth(hbar r/2)/(4 hbar)} / (1 - e^{-hbar r}).
[[nodiscard]] Complex bridge_reference_t0(PlanePoint x_prime, PlanePoint x, double r, double hbar);

/// Default step count ceil(64 r hbar), at least 2.
[[nodiscard]] int default_steps(double r, double hbar);

struct DkParams {
    double r = 4.0;
    int steps = 256;
    std::int64_t n_samples = 100000;
    std::uint64_t seed = 0;
    double hbar = 1.0;
    int jobs = 1;
    // Estimate only the t-dependent part e^{iA}(e^{-i tau} - 1) by sampling and
    // add the exact t = 0 value bridge_reference_t0; unbiased, lower variance.
    bool control_variate = false;
    // Weight each sample by the conditional expectation of the sub-step Levy
    // areas given the nodes, so that the t = 0 part is exact at any step count.
    // Without it the discretized area biases the estimate by about
    // exp(-hbar^2 r dt / 8).
    bool levy_correction = true;

    void validate() const;
};

struct EstimatorResult {
    Complex value;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
    double r = 0.0;
    int steps = 0;
    std::uint64_t seed = 0;
    double t = 0.0;
    int terms = 1;  // grid terms summed (1 on the plane)
    // With the control variate: the exactly known part of value(r) - value(inf)
    // coming from the t = 0 reference, bridge_reference_t0 - kernel_K (summed
    // over grid terms). Zero otherwise.
    Complex transient;
};

/// 2 pi hbar e^{r hbar/2} wiener_prefactor(x', x) <exp(i S_r / hbar)>, the
/// finite-r Wiener-regularized estimate of the propagator kernel (x'; x).
EstimatorResult dk_estimate_plane(PlanePoint x_prime, PlanePoint x, const FourierSymbol& h, double t,
                                  const DkParams& params);

/// Same bridges, several times t (one result per entry of ts).
std::vector<EstimatorResult> dk_estimate_plane(PlanePoint x_prime, PlanePoint x, const FourierSymbol& h,
                                               std::span<const double> ts, const DkParams& params);

/// f_{g,k}(x') = g1 k2 - g2 k1 + (g1 q' - g2 p' + g1 g2)/2.
[[nodiscard]] double f_gk(const GridVector& g, const CharacterK& k, PlanePoint x_prime) noexcept;

/// Seed of the grid term g: hash of (seed, m, n).
[[nodiscard]] std::uint64_t term_seed(std::uint64_t seed, const GridVector& g) noexcept;

/// Grid terms kept by the torus estimator: |x' - g - x| within the Gaussian
/// truncation radius for tol.
std::vector<GridVector> torus_terms(PlanePoint x_prime, PlanePoint x, const TorusGeometry& geom, double tol);

/// sum_g exp{i f_{g,k}(x')/hbar} dk_estimate_plane(x' - g, x), each term on
/// its own stream term_seed(seed, g).
EstimatorResult dk_estimate_torus(PlanePoint x_prime, PlanePoint x, const FourierSymbol& h, double t,
                                  const DkParams& params, const TorusGeometry& geom, const CharacterK& k, double tol);

std::vector<EstimatorResult> dk_estimate_torus(PlanePoint x_prime, PlanePoint x, const FourierSymbol& h,
                                               std::span<const double> ts, const DkParams& params,
                                               const TorusGeometry& geom, const CharacterK& k,
                                               std::span<const GridVector> terms);

/// Upper bound on the standard error of the torus estimator, available before
/// sampling: every summand has modulus 2 pi hbar e^{r hbar/2} w(x'-g, x).
[[nodiscard]] double torus_error_bound(PlanePoint x_prime, PlanePoint x, double r, double hbar,
                                       std::int64_t n_samples, std::span<const GridVector> terms);

}  // namespace btq
