#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xqs/distributions.hpp"

namespace xqs {

/// Identity of one competing quantile predictor.
struct PredictorSpec {
  enum class Kind { Empirical, GpdUpperOrderCount, GpdPercentile };

  Kind kind = Kind::Empirical;
  /// Number of upper order statistics fitted (GpdUpperOrderCount).
  std::size_t order_count = 0;
  /// Threshold probability level (GpdPercentile).
  double level = 0.0;
  /// 0 for the empirical predictor, 1-10 for set A, 11-20 for set B.
  int index = 0;

  static PredictorSpec empirical();
  static PredictorSpec upper_order_count(std::size_t m, int index);
  static PredictorSpec percentile(double q, int index);

  /// "EMP", "A:m=150", "B:q=0.98".
  std::string label() const;

  friend bool operator==(const PredictorSpec&, const PredictorSpec&) = default;
};

enum class PredictorSet { A, B, AB, ZeroAB };

/// Parses "a", "b", "ab", "zero-ab" (case-insensitive).
PredictorSet parse_predictor_set(std::string_view text);
std::string_view predictor_set_name(PredictorSet set);

/// The predictor list for a set, in index order.
std::vector<PredictorSpec> make_predictor_set(PredictorSet set);

/// Spec for a given index in {0} u A u B.
PredictorSpec predictor_by_index(int index);

struct GpdFit {
  GpdParams params;
  /// n_exceed / n of the sample the fit was made on.
  double zeta_u = 0.0;
  std::size_t n_exceed = 0;
  bool converged = false;
  double log_likelihood = 0.0;
};

struct Prediction {
  double value = 0.0;
  PredictorSpec spec;
  /// The GPD fit was unusable and the training maximum was returned.
  bool fallback_used = false;
  /// Excesses that entered the GPD likelihood (0 for the empirical predictor).
  std::size_t n_exceed = 0;
};

/// Log-likelihood of strictly positive excesses under GPD(0, scale, shape).
/// -inf outside the support or for scale <= 0.
double gpd_log_likelihood(std::span<const double> excesses, double scale, double shape);

struct MleResult {
  double scale = 0.0;
  double shape = 0.0;
  bool converged = false;
  double log_likelihood = 0.0;
};

/// Maximum likelihood over (log scale, shape) by Nelder-Mead, shape kept in
/// [-1, 2], started at (mean excess, 0.1). Throws InsufficientDataError for
/// fewer than two excesses and FitFailureError when no interior optimum
/// exists (constant excesses, non-finite likelihood everywhere).
MleResult fit_gpd_mle(std::span<const double> excesses);

/// The ceil(n p)-th order statistic; max(sample) when that rank exceeds n.
double empirical_quantile(std::span<const double> sample, double p);

/// Same, for data already sorted ascending.
double empirical_quantile_sorted(std::span<const double> sorted, double p);

/// u + (sigma/xi) [ (zeta/(1-p))^xi - 1 ], or u + sigma log(zeta/(1-p)) at xi = 0.
double gpd_quantile_predict(const GpdFit& fit, double u, double p);

/// GEV quantile: the inverse of exp(-(1 + xi z)^(-1/xi)), Gumbel at xi = 0.
double gev_quantile_predict(const GevParams& params, double p);

/// Train `spec` on `training` and predict its p-quantile. Falls back to the
/// training maximum when the GPD cannot be fitted. Throws
/// SpecInfeasibleError when m >= training size for an upper-order-count spec.
Prediction predict(const PredictorSpec& spec, std::span<const double> training, double p);

/// predict() for training data already sorted ascending.
Prediction predict_sorted(const PredictorSpec& spec, std::span<const double> sorted, double p);

}  // namespace xqs
