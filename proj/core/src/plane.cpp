// SPDX-License-Identifier: Apache-2.0
#include "btq/plane.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "btq/error.hpp"

namespace btq {

Complex kernel_K(PlanePoint x_prime, PlanePoint x, double hbar) noexcept {
    const double dp = x_prime.p - x.p;
    const double dq = x_prime.q - x.q;
    const double modulus = std::exp(-(dp * dp + dq * dq) / (4.0 * hbar));
    return std::polar(modulus, (x.p * x_prime.q - x_prime.p * x.q) / (2.0 * hbar));
}

Complex weyl_phase(PlanePoint g, PlanePoint x, double hbar) noexcept {
    return std::polar(1.0, symplectic(g, x) / (2.0 * hbar));
}

PlaneLattice PlaneLattice::covering(PlanePoint center, double span, double hbar, int points_per_axis,
                                    double tail_sigmas) {
    const double hw = span + tail_sigmas * std::sqrt(hbar);
    PlaneLattice lat{center, hw, hw, points_per_axis, points_per_axis};
    lat.validate();
    return lat;
}

void PlaneLattice::validate() const {
    if (!(half_width_p > 0.0 && half_width_q > 0.0) || !std::isfinite(half_width_p) ||
        !std::isfinite(half_width_q)) {
        throw Error(ErrorCode::InvalidArgument, "lattice half-widths must be finite and > 0");
    }
    if (n_p < 2 || n_q < 2) throw Error(ErrorCode::InvalidArgument, "lattice needs at least 2 points per axis");
    if (!center.finite()) throw Error(ErrorCode::InvalidArgument, "lattice center must be finite");
}

double PlaneLattice::weight(int i, int j, double hbar) const noexcept {
    const double wp = (i == 0 || i == n_p - 1) ? 0.5 : 1.0;
    const double wq = (j == 0 || j == n_q - 1) ? 0.5 : 1.0;
    return wp * wq * step_p() * step_q() / (kTwoPi * hbar);
}

SampledState SampledState::sample(const PlaneLattice& lattice, const std::function<Complex(PlanePoint)>& f) {
    lattice.validate();
    SampledState s{lattice, std::vector<Complex>(lattice.size())};
    for (int i = 0; i < lattice.n_p; ++i)
        for (int j = 0; j < lattice.n_q; ++j) s.at(i, j) = f(lattice.at(i, j));
    return s;
}

SampledState SampledState::zeros(const PlaneLattice& lattice) {
    lattice.validate();
    return SampledState{lattice, std::vector<Complex>(lattice.size(), Complex{})};
}

double projection_error_estimate(const SampledState& psi, double hbar) {
    const auto& lat = psi.lattice;
    double peak = 0.0;
    double edge = 0.0;
    for (int i = 0; i < lat.n_p; ++i) {
        for (int j = 0; j < lat.n_q; ++j) {
            const double v = std::abs(psi.at(i, j));
            peak = std::max(peak, v);
            if (i == 0 || j == 0 || i == lat.n_p - 1 || j == lat.n_q - 1) edge = std::max(edge, v);
        }
    }
    if (peak == 0.0) return 0.0;
    // The integrand is a Gaussian of variance ~hbar modulated at frequency up to
    // max|coordinate|/hbar; its trapezoid aliasing error decays like
    // exp(-hbar (2 pi/h - omega)^2 / 2).
    auto alias = [hbar](double step, double extent) {
        const double gap = kTwoPi / step - extent / hbar;
        if (gap <= 0.0) return 1.0;
        return 2.0 * std::exp(-hbar * gap * gap / 2.0);
    };
    const double extent_q = std::abs(lat.center.q) + lat.half_width_q;
    const double extent_p = std::abs(lat.center.p) + lat.half_width_p;
    return alias(lat.step_p(), extent_q) + alias(lat.step_q(), extent_p) + edge / peak;
}

SampledState project_K(const SampledState& psi, double hbar, double tol) {
    const auto& lat = psi.lattice;
    lat.validate();
    if (psi.values.size() != lat.size()) throw Error(ErrorCode::InvalidArgument, "state/lattice size mismatch");
    const double est = projection_error_estimate(psi, hbar);
    if (est > tol) {
        std::ostringstream os;
        os << "estimated quadrature error " << est << " exceeds tolerance " << tol << " (" << lat.n_p << "x"
           << lat.n_q << " points, half-widths " << lat.half_width_p << ", " << lat.half_width_q << ")";
        throw Error(ErrorCode::LatticeTooCoarse, os.str());
    }

    const int np = lat.n_p;
    const int nq = lat.n_q;
    using Mat = Eigen::MatrixXcd;
    Eigen::MatrixXd gp(np, np), gq(nq, nq);
    for (int a = 0; a < np; ++a)
        for (int b = 0; b < np; ++b) {
            const double d = lat.p_at(a) - lat.p_at(b);
            gp(a, b) = std::exp(-d * d / (4.0 * hbar));
        }
    for (int a = 0; a < nq; ++a)
        for (int b = 0; b < nq; ++b) {
            const double d = lat.q_at(a) - lat.q_at(b);
            gq(a, b) = std::exp(-d * d / (4.0 * hbar));
        }
    // e1(i, j') = exp(i p_i q'_j' / 2hbar), e2(i', j) = exp(-i p'_i' q_j / 2hbar)
    Mat e1(np, nq), e2(np, nq), weighted(np, nq);
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < nq; ++j) {
            e1(i, j) = std::polar(1.0, lat.p_at(i) * lat.q_at(j) / (2.0 * hbar));
            e2(i, j) = std::conj(e1(i, j));
            weighted(i, j) = lat.weight(i, j, hbar) * psi.at(i, j);
        }
    const Mat gq_t = gq.transpose().cast<Complex>();

    SampledState out = SampledState::zeros(lat);
    Mat inner(np, nq);
    for (int ip = 0; ip < np; ++ip) {
        // inner(i, j') = sum_j weighted(i, j) e2(i', j) gq(j', j)
        inner.noalias() = (weighted.array().rowwise() * e2.row(ip).array()).matrix() * gq_t;
        for (int jp = 0; jp < nq; ++jp) {
            Complex acc{};
            for (int i = 0; i < np; ++i) acc += gp(ip, i) * e1(i, jp) * inner(i, jp);
            out.at(ip, jp) = acc;
        }
    }
    return out;
}

SampledState antiwick_apply(const FourierSymbol& h, const SampledState& psi, double hbar, double tol) {
    SampledState hpsi = psi;
    for (int i = 0; i < psi.lattice.n_p; ++i)
        for (int j = 0; j < psi.lattice.n_q; ++j) hpsi.at(i, j) *= h(psi.lattice.at(i, j));
    return project_K(hpsi, hbar, tol);
}

Complex inner_product(const SampledState& phi, const SampledState& psi, double hbar) {
    const auto& lat = phi.lattice;
    if (phi.values.size() != psi.values.size()) throw Error(ErrorCode::InvalidArgument, "lattice mismatch");
    Complex acc{};
    for (int i = 0; i < lat.n_p; ++i)
        for (int j = 0; j < lat.n_q; ++j) acc += lat.weight(i, j, hbar) * std::conj(phi.at(i, j)) * psi.at(i, j);
    return acc;
}

Complex evaluate_via_kernel(const SampledState& psi, PlanePoint y, double hbar) {
    const auto& lat = psi.lattice;
    Complex acc{};
    for (int i = 0; i < lat.n_p; ++i)
        for (int j = 0; j < lat.n_q; ++j) {
            const Complex v = psi.at(i, j);
            if (v == Complex{}) continue;
            acc += lat.weight(i, j, hbar) * kernel_K(y, lat.at(i, j), hbar) * v;
        }
    return acc;
}

}  // namespace btq
