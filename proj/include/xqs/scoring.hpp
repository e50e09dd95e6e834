#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xqs/estimators.hpp"

namespace xqs {

/// rho_p(a, b) = (a - b)(p - [a < b]); nonnegative for 0 < p < 1.
constexpr double check_loss(double a, double b, double p) noexcept {
  return (a - b) * (p - (a < b ? 1.0 : 0.0));
}

/// Mean of check_loss(x_i, prediction, p) over a validation sample, so that
/// the expected score is minimized at the p-quantile.
/// Throws DomainError for an empty sample or p outside (0, 1).
double average_score(double prediction, double p, std::span<const double> validation);

/// Position of the smallest value; the earliest position wins ties.
std::size_t argmin(std::span<const double> scores);

/// In-sample assessment: every prediction (trained on `sample`) is scored
/// against `sample` itself at level p0.
struct ConventionalAssessment {
  std::vector<double> scores;
  std::size_t selected = 0;
};

ConventionalAssessment conventional_assess(std::span<const Prediction> predictions, double p0,
                                           std::span<const double> sample);

}  // namespace xqs
