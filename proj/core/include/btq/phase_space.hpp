// SPDX-License-Identifier: Apache-2.0
//
// Shared phase-space types: points in the plane, the rectangular torus
// geometry with its integrality condition ab = 2*pi*hbar*N, grid vectors,
// characters of the grid, and real Fourier-polynomial symbols.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace btq {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// A point (p, q) of the planar phase space.
struct PlanePoint {
    double p = 0.0;
    double q = 0.0;

    [[nodiscard]] bool finite() const noexcept;

    friend constexpr PlanePoint operator+(PlanePoint x, PlanePoint y) noexcept { return {x.p + y.p, x.q + y.q}; }
    friend constexpr PlanePoint operator-(PlanePoint x, PlanePoint y) noexcept { return {x.p - y.p, x.q - y.q}; }
    friend constexpr PlanePoint operator-(PlanePoint x) noexcept { return {-x.p, -x.q}; }
    friend constexpr PlanePoint operator*(double s, PlanePoint x) noexcept { return {s * x.p, s * x.q}; }
    friend constexpr bool operator==(PlanePoint, PlanePoint) = default;
};

[[nodiscard]] double norm_squared(PlanePoint x) noexcept;

/// Symplectic form omega(x, y) = x.p * y.q - y.p * x.q.
[[nodiscard]] constexpr double symplectic(PlanePoint x, PlanePoint y) noexcept { return x.p * y.q - y.p * x.q; }

/// Rectangular torus [0,a) x [0,b) with Planck parameter hbar and level N.
///
/// Instances obtained from validate() satisfy a*b = 2*pi*hbar*N to within
/// 1e-12 relative: the q-period b is snapped onto 2*pi*hbar*N/a after the
/// integrality test passes.
class TorusGeometry {
public:
    static constexpr double kIntegralityTolerance = 1e-9;

    /// Throws Error{NonIntegralLevel} when ab/(2 pi hbar) is not an integer
    /// to within kIntegralityTolerance (relative), Error{InvalidArgument} for
    /// non-positive or non-finite inputs.
    static TorusGeometry validate(double a, double b, double hbar);

    /// Skips the integrality check. The level is the rounded (possibly zero)
    /// value of ab/(2 pi hbar). Used to build negative controls.
    static TorusGeometry unchecked(double a, double b, double hbar);

    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] double hbar() const noexcept { return hbar_; }
    [[nodiscard]] int level() const noexcept { return level_; }
    [[nodiscard]] double area() const noexcept { return a_ * b_; }

private:
    TorusGeometry(double a, double b, double hbar, int level) : a_(a), b_(b), hbar_(hbar), level_(level) {}

    double a_;
    double b_;
    double hbar_;
    int level_;
};

/// Convenience: validate(a, b, hbar).
TorusGeometry validate_geometry(double a, double b, double hbar);

/// Representative of x in the half-open rectangle [0,a) x [0,b).
[[nodiscard]] PlanePoint wrap_to_torus(PlanePoint x, const TorusGeometry& geom) noexcept;

/// Grid vector g = (m a, n b).
struct GridVector {
    int m = 0;
    int n = 0;
    double g1 = 0.0;
    double g2 = 0.0;

    GridVector() = default;
    GridVector(int m_, int n_, const TorusGeometry& geom) : m(m_), n(n_), g1(m_ * geom.a()), g2(n_ * geom.b()) {}

    [[nodiscard]] PlanePoint point() const noexcept { return {g1, g2}; }
    friend bool operator==(const GridVector& x, const GridVector& y) noexcept { return x.m == y.m && x.n == y.n; }
};

/// All grid vectors with g1^2 + g2^2 <= radius^2, ordered by (|m|+|n|, m, n).
std::vector<GridVector> grid_vectors_within(const TorusGeometry& geom, double radius);

/// Grid vectors g with |center - g| <= radius, same ordering as above.
std::vector<GridVector> grid_vectors_near(const TorusGeometry& geom, PlanePoint center, double radius);

/// Radius rho such that the Gaussian lattice tail sum_{|d-g|>rho} exp(-|d-g|^2/4hbar)
/// is below tol (bounded by exp(-rho^2/4hbar) * (1 + 4 pi hbar / ab)).
[[nodiscard]] double gaussian_truncation_radius(const TorusGeometry& geom, double tol);

/// Character of the grid, wrapped into [0, 2 pi hbar/a) x [0, 2 pi hbar/b).
class CharacterK {
public:
    CharacterK(double k1, double k2, const TorusGeometry& geom);

    [[nodiscard]] double k1() const noexcept { return k1_; }
    [[nodiscard]] double k2() const noexcept { return k2_; }

    /// Uniform n1 x n2 grid of characters over the inverse torus.
    static std::vector<CharacterK> uniform_grid(const TorusGeometry& geom, int n1, int n2);

private:
    double k1_;
    double k2_;
};

/// One Fourier coefficient c_{mn} of exp(2 pi i (m p/a + n q/b)).
struct FourierTerm {
    int m = 0;
    int n = 0;
    Complex c;
    bool operator==(const FourierTerm&) const = default;
};

/// Real-valued, grid-periodic symbol given as a finite Fourier series.
class FourierSymbol {
public:
    static constexpr double kHermitianTolerance = 1e-12;

    /// Throws Error{NonHermitianCoefficients} unless c_{-m,-n} = conj(c_{mn})
    /// for every row (the mirror must be listed explicitly), Error{InvalidArgument}
    /// on duplicate (m, n).
    FourierSymbol(const TorusGeometry& geom, std::vector<FourierTerm> terms);

    static FourierSymbol constant(const TorusGeometry& geom, double value);

    [[nodiscard]] double operator()(PlanePoint x) const noexcept { return evaluate(x.p, x.q); }
    [[nodiscard]] double evaluate(double p, double q) const noexcept;

    /// Full complex series, for checking that the imaginary part vanishes.
    [[nodiscard]] Complex evaluate_complex(PlanePoint x) const noexcept;

    [[nodiscard]] bool is_constant() const noexcept { return modes_.empty(); }
    [[nodiscard]] double constant_term() const noexcept { return c00_; }
    /// sum |c_{mn}|, an upper bound on |h|.
    [[nodiscard]] double sup_bound() const noexcept;

    [[nodiscard]] std::span<const FourierTerm> terms() const noexcept { return terms_; }
    [[nodiscard]] const TorusGeometry& geometry() const noexcept { return geom_; }

private:
    struct Mode {
        double kp;     // 2 pi m / a
        double kq;     // 2 pi n / b
        double amp;    // 2 |c|
        double shift;  // arg c
    };

    TorusGeometry geom_;
    std::vector<FourierTerm> terms_;
    double c00_ = 0.0;
    std::vector<Mode> modes_;  // one per +/- pair
};

[[nodiscard]] inline double eval_symbol(const FourierSymbol& h, PlanePoint x) noexcept { return h(x); }

inline double FourierSymbol::evaluate(double p, double q) const noexcept {
    double acc = c00_;
    for (const auto& mode : modes_) acc += mode.amp * std::cos(mode.kp * p + mode.kq * q + mode.shift);
    return acc;
}

}  // namespace btq
