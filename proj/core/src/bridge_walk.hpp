// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "btq/path_integral.hpp"
#include "gaussian_stream.hpp"

namespace btq::detail {

// Per-step conditioning coefficients of a bridge with M uniform steps:
// b_{m+1} = b_m + (end - b_m) / (M - m) + sd_m Z, sd_m^2 = hbar^2 dt (M-m-1)/(M-m).
struct BridgeSchedule {
    std::vector<double> pull;
    std::vector<double> sd;

    explicit BridgeSchedule(const BridgeSpec& spec) : pull(spec.steps), sd(spec.steps) {
        const int steps = spec.steps;
        const double dt = spec.duration / steps;
        for (int m = 0; m < steps; ++m) {
            const double left = steps - m;
            pull[m] = 1.0 / left;
            sd[m] = spec.hbar * std::sqrt(dt * (left - 1.0) / left);
        }
    }
};

// Walks one bridge realization, calling visit(m, p, q) for m = 0..M. The last
// point is the pinned endpoint and consumes no variates.
template <class Visit>
inline void walk_bridge(const BridgeSpec& spec, const BridgeSchedule& sched, GaussianStream& normals, Visit&& visit) {
    double p = spec.start.p;
    double q = spec.start.q;
    visit(0, p, q);
    const int last = spec.steps - 1;
    for (int m = 0; m < last; ++m) {
        const double zp = normals();
        const double zq = normals();
        p += (spec.end.p - p) * sched.pull[m] + sched.sd[m] * zp;
        q += (spec.end.q - q) * sched.pull[m] + sched.sd[m] * zq;
        visit(m + 1, p, q);
    }
    visit(spec.steps, spec.end.p, spec.end.q);
}

}  // namespace btq::detail
