// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/random/normal_distribution.hpp>
#include <cstdint>

#include "btq/rng.hpp"

namespace btq::detail {

// Standard normal variates: xoshiro256++ feeding Boost's ziggurat.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double operator()() { return normal_(engine_); }

private:
    Xoshiro256pp engine_;
    boost::random::normal_distribution<double> normal_;
};

}  // namespace btq::detail
