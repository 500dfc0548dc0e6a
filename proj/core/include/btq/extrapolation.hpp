// SPDX-License-Identifier: Apache-2.0
//
// r -> infinity limit of the regularized estimates by weighted least squares.
// Two models: value(r) = A + B exp(-c r) with complex A, B and real c > 0, and
// value(r) = A + sum_{k=1..K} C_k r^{-k} [+ D exp(-d r) with d fixed]. At t != 0 the regularized kernel
// approaches its limit like 1/r, which the exponential model cannot follow.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "btq/path_integral.hpp"

namespace btq {

struct RSample {
    double r = 0.0;
    Complex value;
    double error = 0.0;  // combined (re, im) standard error
};

enum class ExtrapolationModel { Exponential, InversePower };

[[nodiscard]] const char* to_string(ExtrapolationModel model) noexcept;
/// Parses "exponential" or "inverse_power"; throws Error{InvalidArgument}.
[[nodiscard]] ExtrapolationModel parse_extrapolation_model(const std::string& name);

struct ExtrapolationOptions {
    ExtrapolationModel model = ExtrapolationModel::Exponential;
    int order = 2;  // K of the inverse-power model
    // Known decay rate d of an extra D exp(-d r) term in the inverse-power
    // model; 0 leaves the term out.
    double decay_rate = 0.0;
};

struct ExtrapolationResult {
    ExtrapolationModel model = ExtrapolationModel::Exponential;
    Complex limit;           // A
    double error = 0.0;      // standard error of A, (re, im) combined
    Complex amplitude;       // B, or C_1 for the inverse-power model
    double rate = 0.0;       // c, or d for the inverse-power model; 0 when the term is absent
    Complex decay_amplitude;  // D of the inverse-power model
    std::vector<Complex> coefficients;  // C_1..C_K of the inverse-power model
    double plateau = 0.0;    // max |value(r_i) - A| over the two largest r
    double chi2 = 0.0;
    int dof = 0;
    bool constant_model = false;
    bool stable = true;
    std::string diagnostic;  // why the fit is unstable, empty otherwise
};

/// Fits without throwing; check `stable`.
///
/// Exponential model: needs >= 3 distinct r. Unstable when the best rate sits
/// at the c -> 0 edge of the search or when a point at one of the two largest
/// r deviates from A by more than 5 combined standard errors.
///
/// Inverse-power model: needs >= K + 2 distinct r, one more with a decay term. `plateau` is reported the
/// same way, but since the data approach A only like 1/r, stability is judged
/// on the fit residuals at the two largest r (5 standard errors).
ExtrapolationResult fit_r_extrapolation(std::span<const RSample> samples, const ExtrapolationOptions& options = {});

/// As fit_r_extrapolation, throwing Error{ExtrapolationUnstable} on an unstable fit.
ExtrapolationResult extrapolate_r(std::span<const RSample> samples, const ExtrapolationOptions& options = {});
ExtrapolationResult extrapolate_r(std::span<const EstimatorResult> results, const ExtrapolationOptions& options = {});

std::vector<RSample> to_r_samples(std::span<const EstimatorResult> results);

}  // namespace btq
