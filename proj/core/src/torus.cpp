// SPDX-License-Identifier: Apache-2.0
#include "btq/torus.hpp"

#include <cmath>
#include <sstream>

#include "btq/error.hpp"

namespace btq {

Complex dgk_phase(const GridVector& g, const CharacterK& k, double hbar) noexcept {
    return std::polar(1.0, (g.g1 * k.k2() - g.g2 * k.k1() + 0.5 * g.g1 * g.g2) / hbar);
}

bool check_group_law(const TorusGeometry& geom, const CharacterK& k, const GridVector& g, const GridVector& g_prime) {
    const double hbar = geom.hbar();
    const GridVector sum(g.m + g_prime.m, g.n + g_prime.n, geom);
    const Complex lhs = dgk_phase(g, k, hbar) * dgk_phase(g_prime, k, hbar) * weyl_phase(g.point(), g_prime.point(), hbar);
    return std::abs(lhs - dgk_phase(sum, k, hbar)) <= 1e-12;
}

Complex twisted_overlap(PlanePoint x_prime, PlanePoint x, const GridVector& g, const CharacterK& k,
                        double hbar) noexcept {
    return dgk_phase(g, k, hbar) * weyl_phase(g.point(), x, hbar) * kernel_K(x_prime, x + g.point(), hbar);
}

Complex kernel_Kk(PlanePoint x_prime, PlanePoint x, const TorusGeometry& geom, const CharacterK& k, double tol) {
    const double radius = gaussian_truncation_radius(geom, tol);
    Complex acc{};
    for (const auto& g : grid_vectors_near(geom, x_prime - x, radius)) acc += twisted_overlap(x_prime, x, g, k, geom.hbar());
    return acc;
}

TorusQuadrature TorusQuadrature::default_for(const TorusGeometry& geom) {
    const int n = 48 * geom.level();
    return TorusQuadrature{n, n, 1e-8};
}

BasisSet::BasisSet(const TorusGeometry& geom, const CharacterK& k, double theta_tol) : geom_(geom), k_(k) {
    if (geom.level() < 1) throw Error(ErrorCode::InvalidArgument, "basis requires a level N >= 1");
    if (!(theta_tol > 0.0 && theta_tol < 1.0)) throw Error(ErrorCode::InvalidArgument, "theta tolerance must lie in (0,1)");
    // Dropped terms exp(-d^2/2hbar) stay below theta_tol times the dominant
    // term, which sits within b/2 of the Gaussian centre.
    const double b = geom.b();
    theta_window_ = std::sqrt(2.0 * geom.hbar() * std::log(1.0 / theta_tol) + 0.25 * b * b);
    truncation_ = static_cast<int>(std::ceil(theta_window_ / b)) + 1;
}

Complex BasisSet::phi(int j, PlanePoint x) const {
    if (j < 0 || j >= dimension()) {
        std::ostringstream os;
        os << "basis index " << j << " outside [0," << dimension() << ")";
        throw Error(ErrorCode::IndexOutOfRange, os.str());
    }
    return phi_unchecked(j, x);
}

Complex BasisSet::phi_unchecked(int j, PlanePoint x) const noexcept {
    const double hbar = geom_.hbar();
    const double a = geom_.a();
    const double b = geom_.b();
    const int level = geom_.level();
    const double shift = k_.k2() + b * j / level;
    const double center = x.q + shift;
    const auto n0 = static_cast<long>(std::lround(center / b));
    Complex theta{};
    for (long n = n0 - truncation_; n <= n0 + truncation_; ++n) {
        const double d = center - b * static_cast<double>(n);
        if (std::abs(d) > theta_window_) continue;
        theta += std::polar(std::exp(-d * d / (2.0 * hbar)), b * static_cast<double>(n) * (x.p + k_.k1()) / hbar);
    }
    const double norm = std::pow(4.0 * kPi * hbar / (a * a), 0.25);
    return norm * std::polar(1.0, -x.p * x.q / (2.0 * hbar) - x.p * shift / hbar) * theta;
}

Eigen::VectorXcd BasisSet::phi_all(PlanePoint x) const {
    Eigen::VectorXcd v(dimension());
    for (int j = 0; j < dimension(); ++j) v(j) = phi_unchecked(j, x);
    return v;
}

Eigen::MatrixXcd BasisSet::sample(const TorusQuadrature& quad) const {
    Eigen::MatrixXcd out(dimension(), static_cast<Eigen::Index>(quad.size()));
    Eigen::Index col = 0;
    for (int i = 0; i < quad.n_p; ++i)
        for (int j = 0; j < quad.n_q; ++j) out.col(col++) = phi_all(quad.node(geom_, i, j));
    return out;
}

Eigen::MatrixXcd gram_matrix(const BasisSet& basis, const TorusQuadrature& quad) {
    const Eigen::MatrixXcd phi = basis.sample(quad);
    // G_ij = w sum_l conj(phi_i(l)) phi_j(l)
    return quad.weight(basis.geometry()) * (phi.conjugate() * phi.transpose());
}

HermitianOperatorMatrix::HermitianOperatorMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
        throw Error(ErrorCode::InvalidArgument, "operator matrix must be square and non-empty");
    }
    const double defect = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (defect > kTolerance * std::max(1.0, entries_.cwiseAbs().maxCoeff())) {
        std::ostringstream os;
        os << "matrix is not Hermitian (max |H - H^dagger| = " << defect << ")";
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
}

Eigen::VectorXd HermitianOperatorMatrix::eigenvalues() const {
    const Eigen::MatrixXcd sym = 0.5 * (entries_ + entries_.adjoint());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(sym, Eigen::EigenvaluesOnly).eigenvalues();
}

double HermitianOperatorMatrix::norm() const { return eigenvalues().cwiseAbs().maxCoeff(); }

HermitianOperatorMatrix assemble_hamiltonian(const FourierSymbol& h, const BasisSet& basis,
                                             const TorusQuadrature& quad) {
    const auto& geom = basis.geometry();
    const Eigen::MatrixXcd phi = basis.sample(quad);
    const double w = quad.weight(geom);

    const Eigen::MatrixXcd gram = w * (phi.conjugate() * phi.transpose());
    const int n = basis.dimension();
    const double residual = (gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (residual > quad.gram_tol) {
        std::ostringstream os;
        os << "Gram residual " << residual << " exceeds " << quad.gram_tol << " on a " << quad.n_p << "x"
           << quad.n_q << " torus lattice";
        throw Error(ErrorCode::QuadratureBudgetExceeded, os.str());
    }

    Eigen::VectorXd hw(static_cast<Eigen::Index>(quad.size()));
    Eigen::Index col = 0;
    for (int i = 0; i < quad.n_p; ++i)
        for (int j = 0; j < quad.n_q; ++j) hw(col++) = w * h(quad.node(geom, i, j));
    Eigen::MatrixXcd entries = phi * hw.asDiagonal() * phi.adjoint();
    // Quadrature roundoff only; restore exact Hermitian symmetry.
    entries = 0.5 * (entries + entries.adjoint()).eval();
    return HermitianOperatorMatrix(std::move(entries));
}

double PropagatorMatrix::unitarity_defect() const {
    const auto n = entries.rows();
    return (entries * entries.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

PropagatorMatrix propagator_matrix(const HermitianOperatorMatrix& H, double t, double hbar) {
    const Eigen::MatrixXcd sym = 0.5 * (H.entries() + H.entries().adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sym);
    Eigen::VectorXcd phases(sym.rows());
    for (Eigen::Index i = 0; i < sym.rows(); ++i) phases(i) = std::polar(1.0, -t * eig.eigenvalues()(i) / hbar);
    const auto& v = eig.eigenvectors();
    return PropagatorMatrix{v * phases.asDiagonal() * v.adjoint(), t, hbar};
}

Complex propagator_kernel(PlanePoint x_prime, PlanePoint x, const PropagatorMatrix& U, const BasisSet& basis) {
    // Eigen's dot conjugates its left operand.
    return basis.phi_all(x_prime).dot(U.entries * basis.phi_all(x));
}

Complex propagator_series(PlanePoint x_prime, PlanePoint x, const HermitianOperatorMatrix& H, const BasisSet& basis,
                          double t, int n_max) {
    if (n_max < 0) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 0");
    const double hbar = basis.geometry().hbar();
    Eigen::VectorXcd term = basis.phi_all(x);
    Eigen::VectorXcd sum = term;
    const Complex step(0.0, -t / hbar);
    for (int n = 1; n <= n_max; ++n) {
        term = (step / static_cast<double>(n)) * (H.entries() * term);
        sum += term;
    }
    return basis.phi_all(x_prime).dot(sum);
}

Complex propagator_series(PlanePoint x_prime, PlanePoint x, const FourierSymbol& h, const BasisSet& basis, double t,
                          int n_max) {
    const auto H = assemble_hamiltonian(h, basis, TorusQuadrature::default_for(basis.geometry()));
    return propagator_series(x_prime, x, H, basis, t, n_max);
}

SymmetrizedState::SymmetrizedState(SampledState psi, const TorusGeometry& geom, const CharacterK& k, double tol)
    : psi_(std::move(psi)), geom_(geom), k_(k), zero_(true) {
    const auto& lat = psi_.lattice;
    reach_ = std::hypot(lat.half_width_p, lat.half_width_q) + gaussian_truncation_radius(geom, tol);
    for (const auto& v : psi_.values)
        if (v != Complex{}) zero_ = false;
}

Complex SymmetrizedState::operator()(PlanePoint y) const {
    if (zero_) return {};
    const double hbar = geom_.hbar();
    Complex acc{};
    // (D_{g,k} psi)(y) = dgk(g) exp{i omega(g, y)/2hbar} psi(y - g)
    for (const auto& g : grid_vectors_near(geom_, y - psi_.lattice.center, reach_)) {
        const Complex shifted = evaluate_via_kernel(psi_, y - g.point(), hbar);
        acc += dgk_phase(g, k_, hbar) * weyl_phase(g.point(), y, hbar) * shifted;
    }
    return acc;
}

SymmetrizedState symmetrize_state(const SampledState& psi, const TorusGeometry& geom, const CharacterK& k,
                                  double tol) {
    return SymmetrizedState(psi, geom, k, tol);
}

}  // namespace btq
