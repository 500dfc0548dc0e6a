// SPDX-License-Identifier: Apache-2.0
//
// Quantization induced on the torus: twisted grid translations D_{g,k},
// the reproducing kernel K_k as a grid sum of coherent-state overlaps, the
// N-dimensional theta-function basis, the Toeplitz Hamiltonian and its
// propagator.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "btq/phase_space.hpp"
#include "btq/plane.hpp"

namespace btq {

/// exp{i (g1 k2 - g2 k1 + g1 g2 / 2) / hbar}, the scalar factor of D_{g,k}.
[[nodiscard]] Complex dgk_phase(const GridVector& g, const CharacterK& k, double hbar) noexcept;

/// Checks D_{g,k} D_{g',k} = D_{g+g',k}, i.e.
/// dgk(g) dgk(g') weyl_phase(g, g') = dgk(g+g') to within 1e-12.
[[nodiscard]] bool check_group_law(const TorusGeometry& geom, const CharacterK& k, const GridVector& g,
                                   const GridVector& g_prime);

/// Summand (eta_{x'}, D_{g,k} eta_x) = dgk(g) weyl_phase(g, x) K(x', x+g).
[[nodiscard]] Complex twisted_overlap(PlanePoint x_prime, PlanePoint x, const GridVector& g, const CharacterK& k,
                                      double hbar) noexcept;

/// K_k(x'; x), the grid sum truncated where the Gaussian tail falls below tol.
[[nodiscard]] Complex kernel_Kk(PlanePoint x_prime, PlanePoint x, const TorusGeometry& geom, const CharacterK& k,
                                double tol = 1e-14);

/// Tensor lattice on [0,a) x [0,b) for the periodic trapezoid rule.
struct TorusQuadrature {
    int n_p = 48;
    int n_q = 48;
    double gram_tol = 1e-8;

    static TorusQuadrature default_for(const TorusGeometry& geom);

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(n_p) * n_q; }
    [[nodiscard]] PlanePoint node(const TorusGeometry& geom, int i, int j) const noexcept {
        return {geom.a() * i / n_p, geom.b() * j / n_q};
    }
    /// Uniform weight including the 1/(2 pi hbar) measure.
    [[nodiscard]] double weight(const TorusGeometry& geom) const noexcept {
        return geom.area() / (static_cast<double>(n_p) * n_q) / (kTwoPi * geom.hbar());
    }
};

/// The functions phi_0..phi_{N-1} with K_k(x'; x) = sum_j conj(phi_j(x')) phi_j(x).
class BasisSet {
public:
    static constexpr double kThetaTolerance = 1e-14;

    BasisSet(const TorusGeometry& geom, const CharacterK& k, double theta_tol = kThetaTolerance);

    [[nodiscard]] int dimension() const noexcept { return geom_.level(); }
    [[nodiscard]] const TorusGeometry& geometry() const noexcept { return geom_; }
    [[nodiscard]] const CharacterK& character() const noexcept { return k_; }
    /// Number of theta terms kept on each side of the dominant one.
    [[nodiscard]] int truncation() const noexcept { return truncation_; }

    /// phi_j(x); throws Error{IndexOutOfRange} unless 0 <= j < N.
    [[nodiscard]] Complex phi(int j, PlanePoint x) const;
    /// (phi_0(x), ..., phi_{N-1}(x)).
    [[nodiscard]] Eigen::VectorXcd phi_all(PlanePoint x) const;

    /// Rows j, columns lattice nodes (row-major in p).
    [[nodiscard]] Eigen::MatrixXcd sample(const TorusQuadrature& quad) const;

private:
    [[nodiscard]] Complex phi_unchecked(int j, PlanePoint x) const noexcept;

    TorusGeometry geom_;
    CharacterK k_;
    double theta_window_;  // Gaussian argument beyond which terms are dropped
    int truncation_;
};

[[nodiscard]] inline Complex basis_phi(int j, PlanePoint x, const BasisSet& basis) { return basis.phi(j, x); }

/// G_ij = integral of conj(phi_i) phi_j over the torus.
[[nodiscard]] Eigen::MatrixXcd gram_matrix(const BasisSet& basis, const TorusQuadrature& quad);

/// Hermitian N x N matrix; construction enforces entries(i,j) = conj(entries(j,i)) within kTolerance.
class HermitianOperatorMatrix {
public:
    static constexpr double kTolerance = 1e-10;

    explicit HermitianOperatorMatrix(Eigen::MatrixXcd entries);

    [[nodiscard]] const Eigen::MatrixXcd& entries() const noexcept { return entries_; }
    [[nodiscard]] int dimension() const noexcept { return static_cast<int>(entries_.rows()); }
    [[nodiscard]] Eigen::VectorXd eigenvalues() const;
    /// Spectral norm.
    [[nodiscard]] double norm() const;

private:
    Eigen::MatrixXcd entries_;
};

/// Matrix of H_k = K_k(h .) in the orthonormal basis e_j = conj(phi_j):
/// entries(i, j) = integral of phi_i h conj(phi_j) dp dq / (2 pi hbar).
/// Throws Error{QuadratureBudgetExceeded} if the Gram residual exceeds quad.gram_tol.
HermitianOperatorMatrix assemble_hamiltonian(const FourierSymbol& h, const BasisSet& basis,
                                             const TorusQuadrature& quad);

struct PropagatorMatrix {
    Eigen::MatrixXcd entries;
    double t = 0.0;
    double hbar = 1.0;

    [[nodiscard]] double unitarity_defect() const;
};

/// exp(-i t H / hbar) by unitary diagonalization of (H + H^dagger)/2.
PropagatorMatrix propagator_matrix(const HermitianOperatorMatrix& H, double t, double hbar);

/// sum_ij conj(phi_i(x')) U_ij phi_j(x).
[[nodiscard]] Complex propagator_kernel(PlanePoint x_prime, PlanePoint x, const PropagatorMatrix& U,
                                        const BasisSet& basis);

/// Truncated exponential series sum_{n<=n_max} (-it/hbar)^n/n! sum_ij conj(phi_i(x')) (H^n)_ij phi_j(x).
[[nodiscard]] Complex propagator_series(PlanePoint x_prime, PlanePoint x, const HermitianOperatorMatrix& H,
                                        const BasisSet& basis, double t, int n_max);
[[nodiscard]] Complex propagator_series(PlanePoint x_prime, PlanePoint x, const FourierSymbol& h,
                                        const BasisSet& basis, double t, int n_max);

/// y -> sum_g (D_{g,k} psi)(y), the quotient map onto H_k. psi is read
/// through the plane kernel, so off-lattice values are those of K psi.
class SymmetrizedState {
public:
    SymmetrizedState(SampledState psi, const TorusGeometry& geom, const CharacterK& k, double tol);

    [[nodiscard]] Complex operator()(PlanePoint y) const;

private:
    SampledState psi_;
    TorusGeometry geom_;
    CharacterK k_;
    double reach_;
    bool zero_;
};

SymmetrizedState symmetrize_state(const SampledState& psi, const TorusGeometry& geom, const CharacterK& k,
                                  double tol = 1e-12);

}  // namespace btq
