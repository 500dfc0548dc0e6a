// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>

#include "bridge_walk.hpp"
#include "btq/error.hpp"
#include "btq/path_integral.hpp"

namespace btq {

void BridgeSpec::validate() const {
    if (!start.finite() || !end.finite()) throw Error(ErrorCode::InvalidArgument, "bridge endpoints must be finite");
    if (!(duration > 0.0) || !std::isfinite(duration)) throw Error(ErrorCode::InvalidArgument, "bridge duration must be > 0");
    if (steps < 2) throw Error(ErrorCode::InvalidArgument, "bridge needs at least 2 steps");
    if (!(hbar > 0.0)) throw Error(ErrorCode::InvalidArgument, "hbar must be > 0");
}

PathSample sample_bridge(const BridgeSpec& spec, std::uint64_t seed) {
    spec.validate();
    const detail::BridgeSchedule sched(spec);
    detail::GaussianStream normals(seed);
    PathSample path;
    path.times.resize(spec.steps + 1);
    path.points.resize(spec.steps + 1);
    const double dt = spec.duration / spec.steps;
    detail::walk_bridge(spec, sched, normals, [&](int m, double p, double q) {
        path.times[m] = m == spec.steps ? spec.duration : m * dt;
        path.points[m] = {p, q};
    });
    return path;
}

double stratonovich_area(const PathSample& path) {
    if (path.points.size() < 2) throw Error(ErrorCode::InvalidArgument, "path needs at least two points");
    double acc = 0.0;
    for (std::size_t m = 0; m + 1 < path.points.size(); ++m) {
        const auto& x = path.points[m];
        const auto& y = path.points[m + 1];
        acc += x.p * y.q - y.p * x.q;
    }
    return 0.5 * acc;
}

double symbol_integral(const PathSample& path, const FourierSymbol& h) {
    const std::size_t n = path.points.size();
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "path needs at least two points");
    double acc = 0.0;
    for (std::size_t m = 0; m + 1 < n; ++m) {
        acc += 0.5 * (path.times[m + 1] - path.times[m]) * (h(path.points[m]) + h(path.points[m + 1]));
    }
    return acc;
}

double action(const PathSample& path, const FourierSymbol& h, double t) {
    const double r = path.times.back() - path.times.front();
    return stratonovich_area(path) - (t / r) * symbol_integral(path, h);
}

double wiener_prefactor(PlanePoint x_prime, PlanePoint x, double r, double hbar) {
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "bridge duration r must be > 0");
    const double var = hbar * hbar * r;
    return std::exp(-norm_squared(x_prime - x) / (2.0 * var)) / (kTwoPi * var);
}

Complex bridge_reference_t0(PlanePoint x_prime, PlanePoint x, double r, double hbar) {
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "bridge duration r must be > 0");
    const double u = 0.5 * hbar * r;
    const double phase = (x.p * x_prime.q - x_prime.p * x.q) / (2.0 * hbar);
    const double modulus = std::exp(-norm_squared(x_prime - x) / (4.0 * hbar * std::tanh(u))) / -std::expm1(-hbar * r);
    return std::polar(modulus, phase);
}

int default_steps(double r, double hbar) { return std::max(2, static_cast<int>(std::ceil(64.0 * r * hbar))); }

}  // namespace btq
