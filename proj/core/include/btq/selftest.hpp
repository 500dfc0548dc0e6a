// SPDX-License-Identifier: Apache-2.0
//
// Fast runtime invariant checks, run by `btq selftest`.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace btq {

struct SelfTestResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs every check; never throws (an exception inside a check fails it).
std::vector<SelfTestResult> run_selftests(std::uint64_t seed = 1);

}  // namespace btq
