// SPDX-License-Identifier: Apache-2.0
//
// Reference computations for the tests, written from first principles and
// sharing no code with the library: explicit coherent states and brute-force
// quadrature, fixed-window lattice sums, and the exact Gaussian expectation
// of the discretized bridge functional.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

struct Pt {
    double p = 0.0;
    double q = 0.0;
};

inline double omega(Pt x, Pt y) { return x.p * y.q - y.p * x.q; }

/// Coherent state eta_x(y) = exp{i omega(x, y)/2hbar} exp{-|y - x|^2/4hbar}.
inline cd coherent_state(Pt x, Pt y, double hbar) {
    const double dp = y.p - x.p, dq = y.q - x.q;
    return std::polar(std::exp(-(dp * dp + dq * dq) / (4.0 * hbar)), omega(x, y) / (2.0 * hbar));
}

/// Trapezoid integral of f over a square box, measure dp dq / (2 pi hbar).
inline cd plane_integral(const std::function<cd(Pt)>& f, Pt center, double half_width, int n, double hbar) {
    const double h = 2.0 * half_width / (n - 1);
    cd acc{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double w = (i == 0 || i == n - 1 ? 0.5 : 1.0) * (j == 0 || j == n - 1 ? 0.5 : 1.0);
            acc += w * f({center.p - half_width + i * h, center.q - half_width + j * h});
        }
    return acc * h * h / (2.0 * pi * hbar);
}

/// <eta_{x'}, eta_x> by quadrature.
inline cd overlap_by_quadrature(Pt xp, Pt x, double hbar) {
    const Pt mid{0.5 * (xp.p + x.p), 0.5 * (xp.q + x.q)};
    const double half = 0.5 * std::hypot(xp.p - x.p, xp.q - x.q) + 14.0 * std::sqrt(hbar);
    return plane_integral([&](Pt y) { return std::conj(coherent_state(xp, y, hbar)) * coherent_state(x, y, hbar); },
                          mid, half, 241, hbar);
}

/// Plane kernel in closed form (checked against overlap_by_quadrature).
inline cd plane_kernel(Pt xp, Pt x, double hbar) {
    const double dp = xp.p - x.p, dq = xp.q - x.q;
    return std::polar(std::exp(-(dp * dp + dq * dq) / (4.0 * hbar)), (x.p * xp.q - xp.p * x.q) / (2.0 * hbar));
}

struct Torus {
    double a = 1.0;
    double b = 1.0;
    double hbar = 1.0;
    double k1 = 0.0;
    double k2 = 0.0;
    int level() const { return static_cast<int>(std::lround(a * b / (2.0 * pi * hbar))); }
};

/// sum over |m|, |n| <= window of <eta_{x'}, D_{g,k} eta_x>, where
/// (D_{g,k} f)(y) = exp{i (g1 k2 - g2 k1 + g1 g2/2)/hbar} exp{i omega(g, y)/2hbar} f(y - g).
/// The summand is evaluated from the translated coherent state
/// D(g) eta_x = exp{i omega(g, x)/2hbar} eta_{x+g}.
inline cd torus_kernel(Pt xp, Pt x, const Torus& T, int window = 8) {
    cd acc{};
    for (int m = -window; m <= window; ++m)
        for (int n = -window; n <= window; ++n) {
            const Pt g{m * T.a, n * T.b};
            const double twist = (g.p * T.k2 - g.q * T.k1 + 0.5 * g.p * g.q) / T.hbar;
            const double cocycle = omega(g, x) / (2.0 * T.hbar);
            acc += std::polar(1.0, twist + cocycle) * plane_kernel(xp, {x.p + g.p, x.q + g.q}, T.hbar);
        }
    return acc;
}

/// Theta basis with a fixed symmetric window of theta terms:
/// phi_j(p, q) = (4 pi hbar / a^2)^{1/4} exp{-i p q/2hbar - i p s_j/hbar}
///               sum_n exp{-(q + s_j - b n)^2/2hbar + i b n (p + k1)/hbar},
/// s_j = k2 + b j / N.
inline cd theta_basis(int j, Pt x, const Torus& T, int window = 40) {
    const int N = T.level();
    const double s = T.k2 + T.b * j / N;
    cd sum{};
    for (int n = -window; n <= window; ++n) {
        const double d = x.q + s - T.b * n;
        sum += std::polar(std::exp(-d * d / (2.0 * T.hbar)), T.b * n * (x.p + T.k1) / T.hbar);
    }
    const double norm = std::pow(4.0 * pi * T.hbar / (T.a * T.a), 0.25);
    return norm * std::polar(1.0, -(x.p * x.q + 2.0 * x.p * s) / (2.0 * T.hbar)) * sum;
}

/// Midpoint-rule area 1/2 sum ((p_m + p_{m+1})/2 dq - (q_m + q_{m+1})/2 dp).
inline double midpoint_area(const std::vector<Pt>& path) {
    double acc = 0.0;
    for (std::size_t m = 0; m + 1 < path.size(); ++m) {
        const double pm = 0.5 * (path[m].p + path[m + 1].p), qm = 0.5 * (path[m].q + path[m + 1].q);
        acc += pm * (path[m + 1].q - path[m].q) - qm * (path[m + 1].p - path[m].p);
    }
    return 0.5 * acc;
}

/// Exact E[exp(i A / hbar)] for the M-step bridge from x (time 0) to x'
/// (time r), interior covariance hbar^2 (min(s,u) - s u/r) per component and
/// A the discrete area. Writing A = p^T W q, the q-average is a Gaussian
/// characteristic function and the remaining p-average a complex Gaussian
/// integral, done in closed form.
inline cd bridge_area_expectation(Pt xp, Pt x, double r, int M, double hbar) {
    const int L = M + 1;  // nodes 0..M
    const int I = M - 1;  // interior nodes 1..M-1
    Eigen::VectorXd mp(L), mq(L);
    for (int m = 0; m < L; ++m) {
        const double f = static_cast<double>(m) / M;
        mp(m) = x.p + f * (xp.p - x.p);
        mq(m) = x.q + f * (xp.q - x.q);
    }
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(L, L);
    for (int m = 0; m < M; ++m) {
        W(m, m + 1) += 0.5;
        W(m + 1, m) -= 0.5;
    }
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(L, L);  // covariance of the full node vector
    for (int i = 1; i <= I; ++i)
        for (int j = 1; j <= I; ++j) {
            const double s = r * i / M, u = r * j / M;
            C(i, j) = hbar * hbar * (std::min(s, u) - s * u / r);
        }
    // q-average: exp(i u.p - p^T Q p / 2) with u = W mq / hbar, Q = W C W^T / hbar^2.
    const Eigen::VectorXd u = W * mq / hbar;
    const Eigen::MatrixXd Q = W * C * W.transpose() / (hbar * hbar);
    // p = mp + xi, xi supported on the interior.
    const Eigen::MatrixXd Ci = C.block(1, 1, I, I);
    const Eigen::MatrixXd Qi = Q.block(1, 1, I, I);
    const Eigen::VectorXcd bvec =
        (cd(0, 1) * u - (Q * mp).cast<cd>()).segment(1, I);
    const cd base = cd(0, 1) * u.dot(mp) - 0.5 * mp.dot(Q * mp);
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(I, I) + Ci * Qi;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::MatrixXd S = lu.solve(Ci);  // (C^{-1} + Q)^{-1}
    const cd quad = 0.5 * bvec.transpose() * S.cast<cd>() * bvec;
    return std::exp(base + quad) / std::sqrt(lu.determinant());
}

/// Finite-M, t = 0 value of the regularized estimator:
/// 2 pi hbar e^{r hbar/2} w_r(x', x) E[exp(i A/hbar)].
inline cd discrete_estimator_t0(Pt xp, Pt x, double r, int M, double hbar) {
    const double d2 = (xp.p - x.p) * (xp.p - x.p) + (xp.q - x.q) * (xp.q - x.q);
    const double w = std::exp(-d2 / (2.0 * hbar * hbar * r)) / (2.0 * pi * hbar * hbar * r);
    return 2.0 * pi * hbar * std::exp(0.5 * r * hbar) * w * bridge_area_expectation(xp, x, r, M, hbar);
}

}  // namespace oracle
