// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace btq {

enum class ErrorCode {
    InvalidArgument,
    NonIntegralLevel,
    NonHermitianCoefficients,
    LatticeTooCoarse,
    IndexOutOfRange,
    QuadratureBudgetExceeded,
    ExtrapolationUnstable,
    MissingRoute,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library-wide exception carrying a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace btq
