#pragma once

// Cross-validated scoring of extreme quantile predictors.
//
// For a target level p0 and sample size n, each tuning value alpha fixes a
// trial level p_c = p0 - alpha/n and a training size n_c so that predicting
// the p_c-quantile from n_c points is as extreme as predicting the
// p0-quantile from n points, with alpha expected exceedances of the trial
// quantile in the validation part. Method 1 trains on one fold and validates
// on the other k-1; Method 2 trains on k-1 folds and validates on one.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xqs/estimators.hpp"
#include "xqs/scoring.hpp"

namespace xqs {

enum class CvMethod { Method1, Method2 };

struct CvPlan {
  std::size_t n = 0;
  double p0 = 0.0;
  double alpha = 0.0;
  CvMethod method = CvMethod::Method1;
  std::size_t k = 0;
  /// Training-set size after flooring k.
  std::size_t n_c = 0;
  /// Trial quantile level p0 - alpha/n.
  double p_c = 0.0;
};

/// Unfloored solution of n_c (1 - p_c) = n (1 - p0) and
/// (n - n_c)(1 - p_c) = alpha.
struct ContinuousPlan {
  double n_c = 0.0;
  double p_c = 0.0;
  /// 1 - p_c and n - n_c, computed without cancellation.
  double tail = 0.0;
  double n_v = 0.0;
};

ContinuousPlan continuous_cv_params(double n, double p0, double alpha);

/// Throws InfeasiblePlanError when k < 2 or p_c <= 0, DomainError for
/// invalid arguments.
CvPlan derive_cv_params(std::size_t n, double p0, double alpha, CvMethod method);

/// alpha that gives `k` folds under `method` (before flooring).
double alpha_for_folds(std::size_t n, double p0, std::size_t k, CvMethod method);

struct FoldAssignment {
  /// fold_of[i] in [0, k) for sample position i.
  std::vector<std::uint32_t> fold_of;
  std::size_t k = 0;
  std::uint64_t seed = 0;

  /// Sample positions in fold j, ascending.
  std::vector<std::size_t> members(std::size_t j) const;
};

/// Seeded uniform permutation dealt round-robin into k folds.
/// Throws DomainError unless 2 <= k <= n.
FoldAssignment partition_folds(std::size_t n, std::size_t k, std::uint64_t seed);

enum class AssessMethod { Conventional, Method1, Method2 };

std::string_view assess_method_name(AssessMethod m);  // "qs", "scv1", "scv2"

struct ScoreReport {
  AssessMethod method = AssessMethod::Conventional;
  double p0 = 0.0;
  std::vector<PredictorSpec> specs;
  /// One plan per alpha; empty for the conventional method.
  std::vector<CvPlan> plans;
  /// per_alpha_scores[i][a]: predictor i, alpha a.
  std::vector<std::vector<double>> per_alpha_scores;
  std::vector<double> combined_scores;
  /// Position in `specs` of the minimizer.
  std::size_t selected = 0;
  std::vector<Prediction> predictions_at_p0;
  /// Number of fold trainings of predictor i that used the fallback.
  std::vector<std::size_t> fold_fallbacks;

  const Prediction& selected_prediction() const { return predictions_at_p0.at(selected); }
};

/// Predictions of every spec on the full sample at p0.
std::vector<Prediction> predict_all(std::span<const PredictorSpec> specs,
                                    std::span<const double> sample, double p0);

ScoreReport conventional_report(std::span<const PredictorSpec> specs, double p0,
                                std::span<const double> sample);

ScoreReport scv1(std::span<const PredictorSpec> specs, double p0, std::span<const double> alphas,
                 std::span<const double> sample, std::uint64_t seed);

ScoreReport scv2(std::span<const PredictorSpec> specs, double p0, std::span<const double> alphas,
                 std::span<const double> sample, std::uint64_t seed);

/// Shared implementation; `predictions_at_p0` may be precomputed by the
/// caller (must match predict_all(specs, sample, p0)).
ScoreReport cross_validated_score(CvMethod method, std::span<const PredictorSpec> specs, double p0,
                                  std::span<const double> alphas, std::span<const double> sample,
                                  std::uint64_t seed, std::vector<Prediction> predictions_at_p0);

}  // namespace xqs
