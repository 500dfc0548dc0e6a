// SPDX-License-Identifier: Apache-2.0
#include "btq/extrapolation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "btq/error.hpp"

namespace btq {

namespace {

struct LinearFit {
    Complex a;
    Complex b;
    double chi2 = std::numeric_limits<double>::infinity();
    double var_a = 0.0;  // per-component variance of A at this c
    bool ok = false;
};

// Weighted least squares for v_i ~ A + B exp(-c r_i) at fixed c; the real and
// imaginary parts share the design matrix.
LinearFit fit_fixed_rate(std::span<const RSample> s, std::span<const double> w, double c) {
    double s00 = 0, s01 = 0, s11 = 0;
    Complex y0{}, y1{};
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double e = std::exp(-c * s[i].r);
        s00 += w[i];
        s01 += w[i] * e;
        s11 += w[i] * e * e;
        y0 += w[i] * s[i].value;
        y1 += w[i] * e * s[i].value;
    }
    const double det = s00 * s11 - s01 * s01;
    LinearFit fit;
    if (!(det > 1e-14 * s00 * s11)) return fit;
    fit.a = (s11 * y0 - s01 * y1) / det;
    fit.b = (s00 * y1 - s01 * y0) / det;
    fit.var_a = s11 / det;
    fit.chi2 = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        fit.chi2 += w[i] * std::norm(s[i].value - fit.a - fit.b * std::exp(-c * s[i].r));
    }
    fit.ok = true;
    return fit;
}

// Sorted copy of the input after validation; at least `min_distinct` distinct r.
std::vector<RSample> checked_samples(std::span<const RSample> input, std::size_t min_distinct) {
    std::vector<RSample> s(input.begin(), input.end());
    std::sort(s.begin(), s.end(), [](const RSample& x, const RSample& y) { return x.r < y.r; });
    std::set<double> distinct;
    for (const auto& p : s) {
        if (!(p.r > 0.0) || !std::isfinite(p.r)) throw Error(ErrorCode::InvalidArgument, "r values must be finite and > 0");
        if (!(p.error >= 0.0) || !std::isfinite(p.error) || !std::isfinite(p.value.real()) ||
            !std::isfinite(p.value.imag())) {
            throw Error(ErrorCode::InvalidArgument, "extrapolation inputs must be finite with errors >= 0");
        }
        distinct.insert(p.r);
    }
    if (distinct.size() < min_distinct) {
        throw Error(ErrorCode::InvalidArgument,
                    "extrapolation needs at least " + std::to_string(min_distinct) + " distinct r values");
    }
    return s;
}

// Per-component variance is error^2 / 2. Exact (zero-error) inputs get unit weights.
std::vector<double> component_weights(std::span<const RSample> s, bool& exact) {
    double max_err = 0.0;
    for (const auto& p : s) max_err = std::max(max_err, p.error);
    exact = max_err == 0.0;
    std::vector<double> w(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double e = exact ? 1.0 : std::max(s[i].error, 1e-12 * max_err);
        w[i] = 2.0 / (e * e);
    }
    return w;
}

ExtrapolationResult fit_inverse_power(std::span<const RSample> input, int order, double decay_rate) {
    if (order < 1) throw Error(ErrorCode::InvalidArgument, "inverse-power order must be >= 1");
    if (!(decay_rate >= 0.0) || !std::isfinite(decay_rate)) {
        throw Error(ErrorCode::InvalidArgument, "decay rate must be finite and >= 0");
    }
    const bool decay = decay_rate > 0.0;
    const int powers = order + 1;
    const int k = powers + (decay ? 1 : 0);
    const auto s = checked_samples(input, static_cast<std::size_t>(k) + 1);
    bool exact = false;
    const auto w = component_weights(s, exact);
    const int n = static_cast<int>(s.size());

    Eigen::MatrixXd x(n, k);
    Eigen::VectorXd y_re(n), y_im(n), sw(n);
    for (int i = 0; i < n; ++i) {
        const double inv_r = 1.0 / s[i].r;
        double power = 1.0;
        for (int j = 0; j < powers; ++j) {
            x(i, j) = power;
            power *= inv_r;
        }
        if (decay) x(i, powers) = std::exp(-decay_rate * s[i].r);
        sw(i) = std::sqrt(w[i]);
        y_re(i) = s[i].value.real();
        y_im(i) = s[i].value.imag();
    }
    const Eigen::MatrixXd xw = sw.asDiagonal() * x;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xw);
    const Eigen::VectorXd c_re = qr.solve(sw.asDiagonal() * y_re);
    const Eigen::VectorXd c_im = qr.solve(sw.asDiagonal() * y_im);
    const Eigen::MatrixXd cov = (xw.transpose() * xw).inverse();

    ExtrapolationResult res;
    res.model = ExtrapolationModel::InversePower;
    res.limit = {c_re(0), c_im(0)};
    for (int j = 1; j < powers; ++j) res.coefficients.emplace_back(c_re(j), c_im(j));
    res.amplitude = res.coefficients.front();
    if (decay) {
        res.rate = decay_rate;
        res.decay_amplitude = {c_re(powers), c_im(powers)};
    }
    const Eigen::VectorXd fit_re = x * c_re;
    const Eigen::VectorXd fit_im = x * c_im;
    std::vector<double> residual(s.size());
    for (int i = 0; i < n; ++i) {
        residual[i] = std::hypot(s[i].value.real() - fit_re(i), s[i].value.imag() - fit_im(i));
        res.chi2 += w[i] * residual[i] * residual[i];
    }
    res.dof = 2 * n - 2 * k;
    const double scale = res.dof > 0 ? std::max(exact ? 0.0 : 1.0, res.chi2 / res.dof) : 1.0;
    res.error = std::sqrt(std::max(0.0, 2.0 * cov(0, 0) * scale));
    if (exact) res.error = 0.0;

    for (int i = n - 2; i < n; ++i) {
        res.plateau = std::max(res.plateau, std::abs(s[i].value - res.limit));
        if (!exact && res.stable && residual[i] > 5.0 * s[i].error) {
            std::ostringstream os;
            os << "fit residual at r=" << s[i].r << " is " << residual[i] << " (> 5 sigma)";
            res.stable = false;
            res.diagnostic = os.str();
        }
    }
    return res;
}

}  // namespace

const char* to_string(ExtrapolationModel model) noexcept {
    return model == ExtrapolationModel::Exponential ? "exponential" : "inverse_power";
}

ExtrapolationModel parse_extrapolation_model(const std::string& name) {
    if (name == "exponential") return ExtrapolationModel::Exponential;
    if (name == "inverse_power") return ExtrapolationModel::InversePower;
    throw Error(ErrorCode::InvalidArgument, "unknown extrapolation model '" + name + "'");
}

std::vector<RSample> to_r_samples(std::span<const EstimatorResult> results) {
    std::vector<RSample> out;
    out.reserve(results.size());
    for (const auto& r : results) out.push_back({r.r, r.value, r.std_error});
    return out;
}

ExtrapolationResult fit_r_extrapolation(std::span<const RSample> input, const ExtrapolationOptions& options) {
    if (options.model == ExtrapolationModel::InversePower) {
        return fit_inverse_power(input, options.order, options.decay_rate);
    }
    const auto s = checked_samples(input, 3);
    bool exact = false;
    const auto w = component_weights(s, exact);

    // Constant model.
    double wsum = 0.0;
    Complex wmean{};
    for (std::size_t i = 0; i < s.size(); ++i) {
        wsum += w[i];
        wmean += w[i] * s[i].value;
    }
    const Complex a0 = wmean / wsum;
    double chi2_const = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) chi2_const += w[i] * std::norm(s[i].value - a0);

    // Exponential model: profile chi2 over c on a log grid, then golden-section refinement.
    const double r_min = s.front().r;
    const double r_span = s.back().r - r_min;
    const double c_lo = 1e-3 / r_span;
    const double c_hi = 50.0 / r_min;
    constexpr int kGrid = 240;
    double best_c = c_lo;
    LinearFit best;
    int best_index = -1;
    for (int i = 0; i <= kGrid; ++i) {
        const double c = c_lo * std::pow(c_hi / c_lo, static_cast<double>(i) / kGrid);
        const LinearFit f = fit_fixed_rate(s, w, c);
        if (f.ok && f.chi2 < best.chi2) {
            best = f;
            best_c = c;
            best_index = i;
        }
    }
    if (best_index > 0 && best_index < kGrid) {
        double lo = std::log(c_lo) + (best_index - 1) * std::log(c_hi / c_lo) / kGrid;
        double hi = std::log(c_lo) + (best_index + 1) * std::log(c_hi / c_lo) / kGrid;
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 100; ++it) {
            const double m1 = hi - phi * (hi - lo);
            const double m2 = lo + phi * (hi - lo);
            if (fit_fixed_rate(s, w, std::exp(m1)).chi2 < fit_fixed_rate(s, w, std::exp(m2)).chi2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        const double c = std::exp(0.5 * (lo + hi));
        const LinearFit f = fit_fixed_rate(s, w, c);
        if (f.ok && f.chi2 <= best.chi2) {
            best = f;
            best_c = c;
        }
    }

    const int n_real = 2 * static_cast<int>(s.size());
    ExtrapolationResult res;
    bool use_constant = !best.ok;
    if (!use_constant) {
        use_constant = exact ? !(best.chi2 < 1e-6 * chi2_const) : (chi2_const - best.chi2 <= 6.0);
    }

    if (use_constant) {
        res.constant_model = true;
        res.limit = a0;
        res.amplitude = Complex{};
        res.rate = 0.0;
        res.chi2 = chi2_const;
        res.dof = n_real - 2;
        const double scale = res.dof > 0 ? std::max(exact ? 0.0 : 1.0, chi2_const / res.dof) : 1.0;
        res.error = std::sqrt(2.0 / wsum * scale);
    } else {
        res.limit = best.a;
        res.amplitude = best.b;
        res.rate = best_c;
        res.chi2 = best.chi2;
        res.dof = n_real - 5;
        // Gauss-Newton covariance in (Re A, Im A, Re B, Im B, c).
        Eigen::Matrix<double, 5, 5> fisher = Eigen::Matrix<double, 5, 5>::Zero();
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double e = std::exp(-best_c * s[i].r);
            Eigen::Matrix<double, 5, 1> jr, ji;
            jr << 1, 0, e, 0, -s[i].r * e * best.b.real();
            ji << 0, 1, 0, e, -s[i].r * e * best.b.imag();
            fisher += w[i] * (jr * jr.transpose() + ji * ji.transpose());
        }
        Eigen::Matrix<double, 5, 5> cov;
        Eigen::FullPivLU<Eigen::Matrix<double, 5, 5>> lu(fisher);
        if (lu.isInvertible()) {
            cov = lu.inverse();
        } else {
            cov = Eigen::Matrix<double, 5, 5>::Zero();
            Eigen::Matrix4d lin = fisher.topLeftCorner<4, 4>();
            cov.topLeftCorner<4, 4>() = lin.inverse();
        }
        double scale = 1.0;
        if (res.dof > 0) scale = std::max(exact ? 0.0 : 1.0, best.chi2 / res.dof);
        res.error = std::sqrt(std::max(0.0, cov(0, 0) + cov(1, 1)) * scale);
        // A depends strongly and nonlinearly on c when the data pin c down
        // poorly, and the linearized error above then undershoots. Widen it to
        // cover A(c) over the profile interval chi2(c) <= chi2_min + scale.
        if (!exact) {
            for (int i = 0; i <= kGrid; ++i) {
                const double c = c_lo * std::pow(c_hi / c_lo, static_cast<double>(i) / kGrid);
                const LinearFit f = fit_fixed_rate(s, w, c);
                if (!f.ok || f.chi2 > best.chi2 + scale) continue;
                const double spread2 = 2.0 * f.var_a * scale + std::norm(f.a - best.a);
                res.error = std::max(res.error, std::sqrt(spread2));
            }
        }
        if (best_index == 0) {
            res.stable = false;
            res.diagnostic = "best decay rate sits at the lower search bound (no plateau)";
        }
    }

    // Plateau diagnostic over the two largest r.
    const std::size_t n = s.size();
    for (std::size_t i = n - 2; i < n; ++i) {
        const double dev = std::abs(s[i].value - res.limit);
        res.plateau = std::max(res.plateau, dev);
        if (!exact && res.stable && dev > 5.0 * std::hypot(res.error, s[i].error)) {
            std::ostringstream os;
            os << "value at r=" << s[i].r << " deviates from the limit by " << dev << " (> 5 combined sigma)";
            res.stable = false;
            res.diagnostic = os.str();
        }
    }
    return res;
}

ExtrapolationResult extrapolate_r(std::span<const RSample> samples, const ExtrapolationOptions& options) {
    ExtrapolationResult res = fit_r_extrapolation(samples, options);
    if (!res.stable) throw Error(ErrorCode::ExtrapolationUnstable, res.diagnostic);
    return res;
}

ExtrapolationResult extrapolate_r(std::span<const EstimatorResult> results, const ExtrapolationOptions& options) {
    const auto samples = to_r_samples(results);
    return extrapolate_r(samples, options);
}

}  // namespace btq
