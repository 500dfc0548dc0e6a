// SPDX-License-Identifier: Apache-2.0
#include "btq/path_integral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "bridge_walk.hpp"
#include "btq/error.hpp"
#include "btq/plane.hpp"
#include "fast_cos.hpp"
#include "btq/rng.hpp"

namespace btq {

void DkParams::validate() const {
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidArgument, "r must be finite and > 0");
    if (steps < 2) throw Error(ErrorCode::InvalidArgument, "steps M must be >= 2");
    if (n_samples < 2) throw Error(ErrorCode::InvalidArgument, "n_samples must be >= 2");
    if (!(hbar > 0.0)) throw Error(ErrorCode::InvalidArgument, "hbar must be > 0");
    if (jobs < 1) throw Error(ErrorCode::InvalidArgument, "jobs must be >= 1");
}

namespace {

// Running moments of exp(i phase) for one value of t.
struct Moments {
    double re = 0.0;
    double im = 0.0;
    double re2 = 0.0;
    double im2 = 0.0;

    Moments& operator+=(const Moments& o) {
        re += o.re;
        im += o.im;
        re2 += o.re2;
        im2 += o.im2;
        return *this;
    }
};

using ChunkMoments = std::vector<Moments>;  // one per t

ChunkMoments sum_pairwise(std::span<const ChunkMoments> parts) {
    if (parts.size() == 1) return parts.front();
    const std::size_t half = parts.size() / 2;
    ChunkMoments left = sum_pairwise(parts.first(half));
    const ChunkMoments right = sum_pairwise(parts.subspan(half));
    for (std::size_t i = 0; i < left.size(); ++i) left[i] += right[i];
    return left;
}

// h(p, q) = c00 + sum over half the modes of 2|c| cos(kp p + kq q + arg c).
class SymbolKernel {
public:
    explicit SymbolKernel(const FourierSymbol& h) {
        const auto& geom = h.geometry();
        for (const auto& t : h.terms()) {
            if (t.m == 0 && t.n == 0) {
                c00_ = t.c.real();
            } else if (t.m > 0 || (t.m == 0 && t.n > 0)) {
                modes_.push_back({kTwoPi * t.m / geom.a(), kTwoPi * t.n / geom.b(), 2.0 * std::abs(t.c), std::arg(t.c)});
            }
        }
    }

    [[nodiscard]] double operator()(double p, double q) const noexcept {
        double acc = c00_;
        for (const auto& mode : modes_) acc += mode.amp * detail::fast_cos(mode.kp * p + mode.kq * q + mode.shift);
        return acc;
    }

private:
    struct Mode {
        double kp;
        double kq;
        double amp;
        double shift;
    };
    double c00_ = 0.0;
    std::vector<Mode> modes_;
};

// Sub-step area weight. Given the nodes, each step is an independent bridge
// whose area relative to its chord (Levy area) has the conditional
// characteristic function
//   E[exp(i L / hbar) | increment d] = u / sinh(u) exp(-|d|^2 (u coth u - 1) / (2 hbar^2 dt)),
// u = hbar dt / 2. The product over steps is exp(log_prefactor - kappa sum |d|^2).
struct LevyWeight {
    double log_prefactor = 0.0;
    double kappa = 0.0;

    LevyWeight(const BridgeSpec& spec, bool enabled) {
        if (!enabled) return;
        const double dt = spec.duration / spec.steps;
        const double u = 0.5 * spec.hbar * dt;
        const double u2 = u * u;
        // small-u series avoid the cancellation in u coth u - 1
        const double log_ratio = u < 1e-3 ? -u2 / 6.0 + u2 * u2 / 180.0 : std::log(u / std::sinh(u));
        const double excess = u < 1e-3 ? u2 / 3.0 - u2 * u2 / 45.0 : u / std::tanh(u) - 1.0;
        log_prefactor = spec.steps * log_ratio;
        kappa = excess / (2.0 * spec.hbar * spec.hbar * dt);
    }
};

ChunkMoments run_chunk(const BridgeSpec& spec, const detail::BridgeSchedule& sched, const FourierSymbol& h,
                       std::span<const double> ts, bool control, const LevyWeight& levy, std::uint64_t seed,
                       std::int64_t count) {
    detail::GaussianStream normals(seed);
    const bool varying = !h.is_constant();
    const SymbolKernel hk(h);
    const double dt = spec.duration / spec.steps;
    const double inv_hbar = 1.0 / spec.hbar;
    std::vector<double> rate(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) rate[i] = ts[i] / spec.duration;

    ChunkMoments acc(ts.size());
    for (std::int64_t s = 0; s < count; ++s) {
        double area2 = 0.0;  // twice the shoelace area
        double hsum = 0.0;
        double prev_p = spec.start.p;  // first visit adds p0 q0 - p0 q0 = 0
        double prev_q = spec.start.q;
        double step2 = 0.0;  // sum of squared increments
        detail::walk_bridge(spec, sched, normals, [&](int, double p, double q) {
            area2 += prev_p * q - p * prev_q;
            step2 += (p - prev_p) * (p - prev_p) + (q - prev_q) * (q - prev_q);
            if (varying) hsum += hk(p, q);
            prev_p = p;
            prev_q = q;
        });
        if (varying) hsum -= 0.5 * (hk(spec.start.p, spec.start.q) + hk(spec.end.p, spec.end.q));
        const double area = 0.5 * area2;
        const double hint = varying ? dt * hsum : h.constant_term() * spec.duration;
        const double weight = levy.kappa > 0.0 ? std::exp(levy.log_prefactor - levy.kappa * step2) : 1.0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            double c;
            double sn;
            if (control) {
                // e^{iA}(e^{-i tau} - 1) = e^{i(A - tau/2)} (-2i sin(tau/2))
                const double half = 0.5 * rate[i] * hint * inv_hbar;
                const double amp = -2.0 * weight * std::sin(half);
                const double phase = area * inv_hbar - half;
                c = -amp * std::sin(phase);
                sn = amp * std::cos(phase);
            } else {
                const double phase = (area - rate[i] * hint) * inv_hbar;
                c = weight * std::cos(phase);
                sn = weight * std::sin(phase);
            }
            auto& mo = acc[i];
            mo.re += c;
            mo.im += sn;
            mo.re2 += c * c;
            mo.im2 += sn * sn;
        }
    }
    return acc;
}

ChunkMoments sample_moments(const BridgeSpec& spec, const FourierSymbol& h, std::span<const double> ts,
                            bool control, bool levy_correction, std::uint64_t seed, std::int64_t n_samples,
                            int jobs) {
    const detail::BridgeSchedule sched(spec);
    const LevyWeight levy(spec, levy_correction);
    const std::int64_t chunks = (n_samples + kSamplesPerChunk - 1) / kSamplesPerChunk;
    std::vector<ChunkMoments> parts(static_cast<std::size_t>(chunks));
    auto work = [&](std::int64_t first) {
        for (std::int64_t c = first; c < chunks; c += jobs) {
            const std::int64_t count = std::min(kSamplesPerChunk, n_samples - c * kSamplesPerChunk);
            parts[static_cast<std::size_t>(c)] = run_chunk(spec, sched, h, ts, control, levy, derive_seed(seed, {c}), count);
        }
    };
    const int workers = static_cast<int>(std::min<std::int64_t>(jobs, chunks));
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    return sum_pairwise(parts);
}

}  // namespace

std::vector<EstimatorResult> dk_estimate_plane(PlanePoint x_prime, PlanePoint x, const FourierSymbol& h,
                                               std::span<const double> ts, const DkParams& params) {
    params.validate();
    const BridgeSpec spec{x, x_prime, params.r, params.steps, params.hbar};
    spec.validate();
    const ChunkMoments moments = sample_moments(spec, h, ts, params.control_variate, params.levy_correction, params.seed,
                                                 params.n_samples, params.jobs);

    const double hbar = params.hbar;
    const double scale = kTwoPi * hbar * std::exp(0.5 * params.r * hbar) * wiener_prefactor(x_prime, x, params.r, hbar);
    const auto n = static_cast<double>(params.n_samples);
    const Complex offset = params.control_variate ? bridge_reference_t0(x_prime, x, params.r, hbar) : Complex{};
    std::vector<EstimatorResult> out;
    out.reserve(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const Moments& mo = moments[i];
        const double mean_re = mo.re / n;
        const double mean_im = mo.im / n;
        const double var_re = std::max(0.0, (mo.re2 - n * mean_re * mean_re) / (n - 1.0));
        const double var_im = std::max(0.0, (mo.im2 - n * mean_im * mean_im) / (n - 1.0));
        EstimatorResult res;
        res.value = offset + scale * Complex(mean_re, mean_im);
        res.std_error = scale * std::sqrt((var_re + var_im) / n);
        res.n_samples = params.n_samples;
        res.r = params.r;
        res.steps = params.steps;
        res.seed = params.seed;
        res.t = ts[i];
        res.terms = 1;
        if (params.control_variate) res.transient = offset - kernel_K(x_prime, x, hbar);
        out.push_back(res);
    }
    return out;
}

EstimatorResult dk_estimate_plane(PlanePoint x_prime, PlanePoint x, const FourierSymbol& h, double t,
                                  const DkParams& params) {
    const double ts[] = {t};
    return dk_estimate_plane(x_prime, x, h, ts, params).front();
}

double f_gk(const GridVector& g, const CharacterK& k, PlanePoint x_prime) noexcept {
    return g.g1 * k.k2() - g.g2 * k.k1() + 0.5 * (g.g1 * x_prime.q - g.g2 * x_prime.p + g.g1 * g.g2);
}

std::uint64_t term_seed(std::uint64_t seed, const GridVector& g) noexcept {
    return derive_seed(seed, {0x746f7275, g.m, g.n});
}

std::vector<GridVector> torus_terms(PlanePoint x_prime, PlanePoint x, const TorusGeometry& geom, double tol) {
    return grid_vectors_near(geom, x_prime - x, gaussian_truncation_radius(geom, tol));
}

std::vector<EstimatorResult> dk_estimate_torus(PlanePoint x_prime, PlanePoint x, const FourierSymbol& h,
                                               std::span<const double> ts, const DkParams& params,
                                               const TorusGeometry& geom, const CharacterK& k,
                                               std::span<const GridVector> terms) {
    params.validate();
    if (terms.empty()) throw Error(ErrorCode::InvalidArgument, "torus estimator needs at least one grid term");
    const double hbar = params.hbar;
    if (std::abs(geom.hbar() - hbar) > 1e-14 * hbar) {
        throw Error(ErrorCode::InvalidArgument, "estimator hbar differs from the torus geometry");
    }
    std::vector<EstimatorResult> out(ts.size());
    std::vector<double> var(ts.size(), 0.0);
    for (const auto& g : terms) {
        DkParams term = params;
        term.seed = term_seed(params.seed, g);
        const Complex weight = std::polar(1.0, f_gk(g, k, x_prime) / hbar);
        const auto partial = dk_estimate_plane(x_prime - g.point(), x, h, ts, term);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            out[i].value += weight * partial[i].value;
            out[i].transient += weight * partial[i].transient;
            var[i] += partial[i].std_error * partial[i].std_error;
        }
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out[i].std_error = std::sqrt(var[i]);
        out[i].n_samples = params.n_samples;
        out[i].r = params.r;
        out[i].steps = params.steps;
        out[i].seed = params.seed;
        out[i].t = ts[i];
        out[i].terms = static_cast<int>(terms.size());
    }
    return out;
}

EstimatorResult dk_estimate_torus(PlanePoint x_prime, PlanePoint x, const FourierSymbol& h, double t,
                                  const DkParams& params, const TorusGeometry& geom, const CharacterK& k, double tol) {
    const double ts[] = {t};
    const auto terms = torus_terms(x_prime, x, geom, tol);
    return dk_estimate_torus(x_prime, x, h, ts, params, geom, k, terms).front();
}

double torus_error_bound(PlanePoint x_prime, PlanePoint x, double r, double hbar, std::int64_t n_samples,
                         std::span<const GridVector> terms) {
    const double scale = kTwoPi * hbar * std::exp(0.5 * r * hbar);
    double var = 0.0;
    for (const auto& g : terms) {
        const double w = scale * wiener_prefactor(x_prime - g.point(), x, r, hbar);
        var += w * w;
    }
    return std::sqrt(var / static_cast<double>(n_samples));
}

}  // namespace btq
