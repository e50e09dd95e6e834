#include "xqs/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "xqs/error.hpp"
#include "xqs/rng.hpp"

namespace xqs {
namespace {

// floor() that forgives a relative rounding error of 1e-9, so that
// 1 + alpha / (n (1 - p0)) = 2.9999999999991 still gives 3 folds.
std::size_t snapped_floor(double x) {
  return static_cast<std::size_t>(std::floor(x + 1e-9 * std::abs(x)));
}

void check_args(std::size_t n, double p0, double alpha) {
  if (n < 2) throw DomainError("sample size must be at least 2");
  if (!(p0 > 0.0 && p0 < 1.0)) throw DomainError("p0 must lie in (0, 1)");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive and finite");
}

std::string method_label(CvMethod m) { return m == CvMethod::Method1 ? "Method 1" : "Method 2"; }

}  // namespace

ContinuousPlan continuous_cv_params(double n, double p0, double alpha) {
  const double tail = (1.0 - p0) + alpha / n;
  return ContinuousPlan{n * (1.0 - p0) / tail, p0 - alpha / n, tail, alpha / tail};
}

CvPlan derive_cv_params(std::size_t n, double p0, double alpha, CvMethod method) {
  check_args(n, p0, alpha);
  const double nd = static_cast<double>(n);
  const double expected_exceedances = nd * (1.0 - p0);

  CvPlan plan;
  plan.n = n;
  plan.p0 = p0;
  plan.alpha = alpha;
  plan.method = method;
  const double k_real = method == CvMethod::Method1 ? 1.0 + alpha / expected_exceedances
                                                    : expected_exceedances / alpha + 1.0;
  plan.k = std::isfinite(k_real) ? snapped_floor(std::min(k_real, 1e18)) : 0;
  plan.p_c = p0 - alpha / nd;

  if (plan.k < 2) {
    throw InfeasiblePlanError(
        method_label(method) + ": alpha = " + std::to_string(alpha) + " gives k = " +
        std::to_string(plan.k) + " < 2 folds (n(1-p0) = " + std::to_string(expected_exceedances) +
        (method == CvMethod::Method1 ? "; alpha must be at least n(1-p0))"
                                     : "; alpha must be at most n(1-p0))"));
  }
  if (plan.k > n) {
    throw InfeasiblePlanError(method_label(method) + ": alpha = " + std::to_string(alpha) +
                              " needs k = " + std::to_string(plan.k) + " folds for n = " +
                              std::to_string(n));
  }
  if (!(plan.p_c > 0.0)) {
    throw InfeasiblePlanError("trial level p0 - alpha/n = " + std::to_string(plan.p_c) +
                              " is not a probability; alpha is too large");
  }
  const std::size_t fold = n / plan.k;
  plan.n_c = method == CvMethod::Method1 ? fold : n - fold;
  return plan;
}

double alpha_for_folds(std::size_t n, double p0, std::size_t k, CvMethod method) {
  if (k < 2) throw DomainError("k must be at least 2");
  const double lambda = static_cast<double>(n) * (1.0 - p0);
  const double km1 = static_cast<double>(k - 1);
  return method == CvMethod::Method1 ? lambda * km1 : lambda / km1;
}

std::vector<std::size_t> FoldAssignment::members(std::size_t j) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == j) out.push_back(i);
  }
  return out;
}

FoldAssignment partition_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw DomainError("need at least 2 folds");
  if (k > n) {
    throw DomainError("cannot split " + std::to_string(n) + " points into " + std::to_string(k) +
                      " folds");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  RandomStream rng(seed);
  // Fisher-Yates with our own bounded draw keeps the permutation identical
  // across standard library implementations.
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.below(i + 1)]);
  }
  FoldAssignment fa;
  fa.k = k;
  fa.seed = seed;
  fa.fold_of.resize(n);
  for (std::size_t i = 0; i < n; ++i) fa.fold_of[perm[i]] = static_cast<std::uint32_t>(i % k);
  return fa;
}

std::string_view assess_method_name(AssessMethod m) {
  switch (m) {
    case AssessMethod::Conventional: return "qs";
    case AssessMethod::Method1: return "scv1";
    case AssessMethod::Method2: return "scv2";
  }
  return "?";
}

std::vector<Prediction> predict_all(std::span<const PredictorSpec> specs,
                                    std::span<const double> sample, double p0) {
  Sample sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Prediction> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(predict_sorted(s, sorted, p0));
  return out;
}

ScoreReport conventional_report(std::span<const PredictorSpec> specs, double p0,
                                std::span<const double> sample) {
  ScoreReport r;
  r.method = AssessMethod::Conventional;
  r.p0 = p0;
  r.specs.assign(specs.begin(), specs.end());
  r.predictions_at_p0 = predict_all(specs, sample, p0);
  const auto a = conventional_assess(r.predictions_at_p0, p0, sample);
  r.per_alpha_scores.assign(specs.size(), {});
  r.combined_scores = a.scores;
  r.selected = a.selected;
  r.fold_fallbacks.assign(specs.size(), 0);
  return r;
}

ScoreReport cross_validated_score(CvMethod method, std::span<const PredictorSpec> specs, double p0,
                                  std::span<const double> alphas, std::span<const double> sample,
                                  std::uint64_t seed, std::vector<Prediction> predictions_at_p0) {
  if (specs.empty()) throw DomainError("no predictors to assess");
  if (alphas.empty()) throw DomainError("at least one alpha is required");
  if (sample.empty()) throw DomainError("cannot assess on an empty sample");
  const std::size_t n = sample.size();

  ScoreReport r;
  r.method = method == CvMethod::Method1 ? AssessMethod::Method1 : AssessMethod::Method2;
  r.p0 = p0;
  r.specs.assign(specs.begin(), specs.end());
  for (double a : alphas) r.plans.push_back(derive_cv_params(n, p0, a, method));

  // Reject specs that cannot run on the smallest training set up front.
  for (const auto& plan : r.plans) {
    const std::size_t smallest_train = method == CvMethod::Method1 ? n / plan.k : n - (n + plan.k - 1) / plan.k;
    for (const auto& s : specs) {
      if (s.kind == PredictorSpec::Kind::GpdUpperOrderCount && s.order_count >= smallest_train) {
        throw SpecInfeasibleError(s.label() + " is infeasible on a training fold of size " +
                                  std::to_string(smallest_train) + " (alpha = " +
                                  std::to_string(plan.alpha) + ", k = " + std::to_string(plan.k) + ")");
      }
    }
  }

  const std::size_t n_specs = specs.size();
  const std::size_t n_alpha = alphas.size();
  r.per_alpha_scores.assign(n_specs, std::vector<double>(n_alpha, 0.0));
  r.fold_fallbacks.assign(n_specs, 0);

  Sample in_fold;
  Sample out_fold;
  std::vector<double> fold_sum(n_specs);
  for (std::size_t a = 0; a < n_alpha; ++a) {
    const CvPlan& plan = r.plans[a];
    const FoldAssignment folds = partition_folds(n, plan.k, derive_seed(seed, a));
    std::fill(fold_sum.begin(), fold_sum.end(), 0.0);
    for (std::size_t j = 0; j < plan.k; ++j) {
      in_fold.clear();
      out_fold.clear();
      for (std::size_t i = 0; i < n; ++i) {
        (folds.fold_of[i] == j ? in_fold : out_fold).push_back(sample[i]);
      }
      Sample& train = method == CvMethod::Method1 ? in_fold : out_fold;
      const Sample& validate = method == CvMethod::Method1 ? out_fold : in_fold;
      std::sort(train.begin(), train.end());
      for (std::size_t s = 0; s < n_specs; ++s) {
        const Prediction pred = predict_sorted(specs[s], train, plan.p_c);
        if (pred.fallback_used) ++r.fold_fallbacks[s];
        fold_sum[s] += average_score(pred.value, plan.p_c, validate);
      }
    }
    for (std::size_t s = 0; s < n_specs; ++s) {
      r.per_alpha_scores[s][a] = fold_sum[s] / static_cast<double>(plan.k);
    }
  }

  r.combined_scores.resize(n_specs);
  for (std::size_t s = 0; s < n_specs; ++s) {
    double total = 0.0;
    for (double v : r.per_alpha_scores[s]) total += v;
    r.combined_scores[s] = total / static_cast<double>(n_alpha);
  }
  r.selected = argmin(r.combined_scores);
  r.predictions_at_p0 =
      predictions_at_p0.empty() ? predict_all(specs, sample, p0) : std::move(predictions_at_p0);
  if (r.predictions_at_p0.size() != n_specs) {
    throw DomainError("precomputed predictions do not match the predictor list");
  }
  return r;
}

ScoreReport scv1(std::span<const PredictorSpec> specs, double p0, std::span<const double> alphas,
                 std::span<const double> sample, std::uint64_t seed) {
  return cross_validated_score(CvMethod::Method1, specs, p0, alphas, sample, seed, {});
}

ScoreReport scv2(std::span<const PredictorSpec> specs, double p0, std::span<const double> alphas,
                 std::span<const double> sample, std::uint64_t seed) {
  return cross_validated_score(CvMethod::Method2, specs, p0, alphas, sample, seed, {});
}

}  // namespace xqs
