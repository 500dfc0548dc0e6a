// SPDX-License-Identifier: Apache-2.0
//
// Anti-Wick quantization on the plane. States are sampled on a uniform
// rectangular lattice; integrals over R^2 use the trapezoid rule with the
// measure dp dq / (2 pi hbar).
#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "btq/phase_space.hpp"

namespace btq {

/// K(x'; x) = exp{-|x'-x|^2/(4 hbar) + i (p q' - p' q)/(2 hbar)}.
[[nodiscard]] Complex kernel_K(PlanePoint x_prime, PlanePoint x, double hbar) noexcept;

/// (eta_{x'}, eta_x); identical to kernel_K.
[[nodiscard]] inline Complex coherent_overlap(PlanePoint x_prime, PlanePoint x, double hbar) noexcept {
    return kernel_K(x_prime, x, hbar);
}

/// Cocycle of the Heisenberg-Weyl ray representation:
/// D(g) eta_x = weyl_phase(g, x) eta_{x+g} and D(g) D(x) = weyl_phase(g, x) D(g+x),
/// with weyl_phase(g, x) = exp{i (g_p q - g_q p) / (2 hbar)}.
[[nodiscard]] Complex weyl_phase(PlanePoint g, PlanePoint x, double hbar) noexcept;

/// Uniform n_p x n_q lattice on [center - half_width, center + half_width].
struct PlaneLattice {
    PlanePoint center;
    double half_width_p = 1.0;
    double half_width_q = 1.0;
    int n_p = 64;
    int n_q = 64;

    static constexpr int kDefaultPointsPerAxis = 64;
    static constexpr double kDefaultTailSigmas = 8.0;

    /// Lattice whose half-widths are span + tail_sigmas * sqrt(hbar).
    static PlaneLattice covering(PlanePoint center, double span, double hbar,
                                 int points_per_axis = kDefaultPointsPerAxis,
                                 double tail_sigmas = kDefaultTailSigmas);

    void validate() const;
    [[nodiscard]] double step_p() const noexcept { return 2.0 * half_width_p / (n_p - 1); }
    [[nodiscard]] double step_q() const noexcept { return 2.0 * half_width_q / (n_q - 1); }
    [[nodiscard]] double p_at(int i) const noexcept { return center.p - half_width_p + i * step_p(); }
    [[nodiscard]] double q_at(int j) const noexcept { return center.q - half_width_q + j * step_q(); }
    [[nodiscard]] PlanePoint at(int i, int j) const noexcept { return {p_at(i), q_at(j)}; }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(n_p) * n_q; }
    [[nodiscard]] std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(i) * n_q + j; }
    /// Trapezoid weight of node (i, j) including the 1/(2 pi hbar) measure.
    [[nodiscard]] double weight(int i, int j, double hbar) const noexcept;
};

/// A function on the plane sampled on a PlaneLattice (row-major in p).
struct SampledState {
    PlaneLattice lattice;
    std::vector<Complex> values;

    static SampledState sample(const PlaneLattice& lattice, const std::function<Complex(PlanePoint)>& f);
    static SampledState zeros(const PlaneLattice& lattice);

    [[nodiscard]] Complex& at(int i, int j) { return values[lattice.index(i, j)]; }
    [[nodiscard]] const Complex& at(int i, int j) const { return values[lattice.index(i, j)]; }
};

/// Estimated absolute error of the trapezoid realization of K on this state:
/// aliasing of the Gaussian-modulated integrand plus the largest boundary
/// value, relative to the peak of |psi|.
[[nodiscard]] double projection_error_estimate(const SampledState& psi, double hbar);

/// (K psi)(x') on the same lattice. Throws Error{LatticeTooCoarse} when the
/// estimated quadrature error exceeds tol.
SampledState project_K(const SampledState& psi, double hbar, double tol = 1e-8);

/// H psi = K(h psi).
SampledState antiwick_apply(const FourierSymbol& h, const SampledState& psi, double hbar, double tol = 1e-8);

/// <phi, psi> = integral of conj(phi) psi dp dq / (2 pi hbar) on the shared lattice.
[[nodiscard]] Complex inner_product(const SampledState& phi, const SampledState& psi, double hbar);

/// Evaluates (K psi)(y) at an arbitrary point; equals psi(y) when psi lies in the image of K.
[[nodiscard]] Complex evaluate_via_kernel(const SampledState& psi, PlanePoint y, double hbar);

}  // namespace btq
