// SPDX-License-Identifier: Apache-2.0
#include "btq/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include "btq/error.hpp"

namespace btq {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NonIntegralLevel: return "NonIntegralLevel";
        case ErrorCode::NonHermitianCoefficients: return "NonHermitianCoefficients";
        case ErrorCode::LatticeTooCoarse: return "LatticeTooCoarse";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
        case ErrorCode::ExtrapolationUnstable: return "ExtrapolationUnstable";
        case ErrorCode::MissingRoute: return "MissingRoute";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

bool PlanePoint::finite() const noexcept { return std::isfinite(p) && std::isfinite(q); }

double norm_squared(PlanePoint x) noexcept { return x.p * x.p + x.q * x.q; }

namespace {

void require_positive(double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) {
        std::ostringstream os;
        os << name << " must be finite and > 0 (got " << v << ")";
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
}

// x - period * floor(x / period), landing in [0, period).
double wrap(double x, double period) noexcept {
    double r = x - period * std::floor(x / period);
    if (r >= period || r < 0.0) r = 0.0;
    return r;
}

}  // namespace

TorusGeometry TorusGeometry::validate(double a, double b, double hbar) {
    require_positive(a, "a");
    require_positive(b, "b");
    require_positive(hbar, "hbar");
    const double level = a * b / (kTwoPi * hbar);
    const double rounded = std::round(level);
    if (rounded < 1.0 || std::abs(level - rounded) > kIntegralityTolerance * level) {
        std::ostringstream os;
        os.precision(17);
        os << "a*b/(2*pi*hbar) = " << level << " is not a positive integer (a=" << a << ", b=" << b
           << ", hbar=" << hbar << ")";
        throw Error(ErrorCode::NonIntegralLevel, os.str());
    }
    const int n = static_cast<int>(rounded);
    return TorusGeometry(a, kTwoPi * hbar * n / a, hbar, n);
}

TorusGeometry TorusGeometry::unchecked(double a, double b, double hbar) {
    require_positive(a, "a");
    require_positive(b, "b");
    require_positive(hbar, "hbar");
    return TorusGeometry(a, b, hbar, static_cast<int>(std::round(a * b / (kTwoPi * hbar))));
}

TorusGeometry validate_geometry(double a, double b, double hbar) { return TorusGeometry::validate(a, b, hbar); }

PlanePoint wrap_to_torus(PlanePoint x, const TorusGeometry& geom) noexcept {
    return {wrap(x.p, geom.a()), wrap(x.q, geom.b())};
}

namespace {

void sort_shell_order(std::vector<GridVector>& out) {
    std::sort(out.begin(), out.end(), [](const GridVector& x, const GridVector& y) {
        const int sx = std::abs(x.m) + std::abs(x.n);
        const int sy = std::abs(y.m) + std::abs(y.n);
        if (sx != sy) return sx < sy;
        if (x.m != y.m) return x.m < y.m;
        return x.n < y.n;
    });
}

}  // namespace

std::vector<GridVector> grid_vectors_within(const TorusGeometry& geom, double radius) {
    return grid_vectors_near(geom, PlanePoint{0.0, 0.0}, radius);
}

std::vector<GridVector> grid_vectors_near(const TorusGeometry& geom, PlanePoint center, double radius) {
    if (!(radius >= 0.0) || !std::isfinite(radius)) {
        throw Error(ErrorCode::InvalidArgument, "grid radius must be finite and >= 0");
    }
    const int m_lo = static_cast<int>(std::floor((center.p - radius) / geom.a()));
    const int m_hi = static_cast<int>(std::ceil((center.p + radius) / geom.a()));
    const int n_lo = static_cast<int>(std::floor((center.q - radius) / geom.b()));
    const int n_hi = static_cast<int>(std::ceil((center.q + radius) / geom.b()));
    const double r2 = radius * radius;
    std::vector<GridVector> out;
    for (int m = m_lo; m <= m_hi; ++m) {
        for (int n = n_lo; n <= n_hi; ++n) {
            GridVector g(m, n, geom);
            const double dp = g.g1 - center.p;
            const double dq = g.g2 - center.q;
            if (dp * dp + dq * dq <= r2) out.push_back(g);
        }
    }
    sort_shell_order(out);
    return out;
}

double gaussian_truncation_radius(const TorusGeometry& geom, double tol) {
    if (!(tol > 0.0 && tol < 1.0)) throw Error(ErrorCode::InvalidArgument, "truncation tolerance must lie in (0,1)");
    const double hbar = geom.hbar();
    const double density = 1.0 + 4.0 * kPi * hbar / geom.area();
    return std::sqrt(4.0 * hbar * std::log(density / tol));
}

CharacterK::CharacterK(double k1, double k2, const TorusGeometry& geom)
    : k1_(wrap(k1, kTwoPi * geom.hbar() / geom.a())), k2_(wrap(k2, kTwoPi * geom.hbar() / geom.b())) {
    if (!std::isfinite(k1) || !std::isfinite(k2)) throw Error(ErrorCode::InvalidArgument, "character must be finite");
}

std::vector<CharacterK> CharacterK::uniform_grid(const TorusGeometry& geom, int n1, int n2) {
    if (n1 < 1 || n2 < 1) throw Error(ErrorCode::InvalidArgument, "character grid needs n1, n2 >= 1");
    const double s1 = kTwoPi * geom.hbar() / geom.a() / n1;
    const double s2 = kTwoPi * geom.hbar() / geom.b() / n2;
    std::vector<CharacterK> out;
    out.reserve(static_cast<std::size_t>(n1) * n2);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) out.emplace_back(i * s1, j * s2, geom);
    return out;
}

FourierSymbol::FourierSymbol(const TorusGeometry& geom, std::vector<FourierTerm> terms)
    : geom_(geom), terms_(std::move(terms)) {
    std::map<std::pair<int, int>, Complex> table;
    for (const auto& t : terms_) {
        if (!std::isfinite(t.c.real()) || !std::isfinite(t.c.imag())) {
            throw Error(ErrorCode::InvalidArgument, "non-finite Fourier coefficient");
        }
        if (!table.emplace(std::pair{t.m, t.n}, t.c).second) {
            std::ostringstream os;
            os << "duplicate Fourier coefficient for (m,n) = (" << t.m << "," << t.n << ")";
            throw Error(ErrorCode::InvalidArgument, os.str());
        }
    }
    for (const auto& [mn, c] : table) {
        const auto mirror = table.find({-mn.first, -mn.second});
        const double scale = std::max(1.0, std::abs(c));
        if (mirror == table.end() || std::abs(mirror->second - std::conj(c)) > kHermitianTolerance * scale) {
            std::ostringstream os;
            os.precision(17);
            os << "coefficient (" << mn.first << "," << mn.second << ") = " << c.real() << "+" << c.imag()
               << "i has no matching conjugate at (" << -mn.first << "," << -mn.second
               << "); the symbol would not be real-valued";
            throw Error(ErrorCode::NonHermitianCoefficients, os.str());
        }
        const auto [m, n] = mn;
        if (m == 0 && n == 0) {
            c00_ = c.real();
        } else if (m > 0 || (m == 0 && n > 0)) {
            modes_.push_back({kTwoPi * m / geom.a(), kTwoPi * n / geom.b(), 2.0 * std::abs(c), std::arg(c)});
        }
    }
}

FourierSymbol FourierSymbol::constant(const TorusGeometry& geom, double value) {
    return FourierSymbol(geom, {FourierTerm{0, 0, Complex(value, 0.0)}});
}

Complex FourierSymbol::evaluate_complex(PlanePoint x) const noexcept {
    Complex acc{0.0, 0.0};
    for (const auto& t : terms_) {
        const double theta = kTwoPi * (t.m * x.p / geom_.a() + t.n * x.q / geom_.b());
        acc += t.c * std::polar(1.0, theta);
    }
    return acc;
}

double FourierSymbol::sup_bound() const noexcept {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.c);
    return s;
}

}  // namespace btq
