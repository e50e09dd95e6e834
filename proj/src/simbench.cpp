#include "xqs/simbench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "xqs/error.hpp"
#include "xqs/rng.hpp"
#include "xqs/scoring.hpp"

namespace xqs {
namespace {

using Records = std::array<ReplicateRecord, kAllSimMethods.size()>;

std::size_t slot(SimMethod m) { return static_cast<std::size_t>(m); }

Records run_replicate(const SimulationConfig& config, std::span<const PredictorSpec> specs, double p0,
                      std::span<const double> alphas1, std::span<const double> alphas2,
                      std::size_t replicate) {
  const std::uint64_t seed = derive_seed(config.master_seed, replicate);
  RandomStream data_rng(derive_seed(seed, 0));
  const Sample y = sample(config.model, config.n, data_rng);

  const std::vector<Prediction> preds = predict_all(specs, y, p0);
  Records rec;
  const auto pick = [&](std::size_t pos) { return ReplicateRecord{specs[pos].index, preds[pos].value}; };

  rec[slot(SimMethod::Conventional)] = pick(conventional_assess(preds, p0, y).selected);
  rec[slot(SimMethod::Method1)] = pick(
      cross_validated_score(CvMethod::Method1, specs, p0, alphas1, y, derive_seed(seed, 1), preds).selected);
  rec[slot(SimMethod::Method2)] = pick(
      cross_validated_score(CvMethod::Method2, specs, p0, alphas2, y, derive_seed(seed, 2), preds).selected);
  rec[slot(SimMethod::Median)] = ReplicateRecord{-1, median_baseline(preds)};
  RandomStream pick_rng(derive_seed(seed, 3));
  const Prediction& chosen = random_baseline(preds, pick_rng);
  rec[slot(SimMethod::Random)] = ReplicateRecord{chosen.spec.index, chosen.value};
  return rec;
}

}  // namespace

std::string_view sim_method_name(SimMethod m) {
  switch (m) {
    case SimMethod::Conventional: return "qs";
    case SimMethod::Method1: return "scv1";
    case SimMethod::Method2: return "scv2";
    case SimMethod::Median: return "median";
    case SimMethod::Random: return "random";
  }
  return "?";
}

double resolve_p0(double p0, std::size_t n) {
  if (p0 == 0.0) {
    if (n == 0) throw DomainError("sample size must be positive");
    return 1.0 - 1.0 / (2.0 * static_cast<double>(n));
  }
  if (!(p0 > 0.0 && p0 < 1.0)) throw DomainError("p0 must lie in (0, 1)");
  return p0;
}

std::vector<double> matching_method2_alphas(std::size_t n, double p0,
                                            std::span<const double> alphas_method1) {
  std::vector<double> out;
  out.reserve(alphas_method1.size());
  for (double a : alphas_method1) {
    const CvPlan plan = derive_cv_params(n, p0, a, CvMethod::Method1);
    out.push_back(alpha_for_folds(n, p0, plan.k, CvMethod::Method2));
  }
  return out;
}

double median_baseline(std::span<const Prediction> predictions) {
  if (predictions.empty()) throw DomainError("median of an empty prediction list");
  std::vector<double> v;
  v.reserve(predictions.size());
  for (const auto& p : predictions) v.push_back(p.value);
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

const Prediction& random_baseline(std::span<const Prediction> predictions, RandomStream& rng) {
  if (predictions.empty()) throw DomainError("random choice from an empty prediction list");
  return predictions[rng.below(predictions.size())];
}

double rmse(std::span<const ReplicateRecord> records, double truth) {
  if (records.empty()) throw DomainError("RMSE over zero replicates");
  double ss = 0.0;
  for (const auto& r : records) {
    const double e = r.value - truth;
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(records.size()));
}

SimulationResult run_simulation(const SimulationConfig& config) {
  if (config.replicates == 0) throw DomainError("at least one replicate is required");
  const double p0 = resolve_p0(config.p0, config.n);
  const std::vector<PredictorSpec> specs = make_predictor_set(config.predictor_set);
  const std::vector<double> alphas1 = config.alphas_method1;
  const std::vector<double> alphas2 = config.alphas_method2.empty()
                                          ? matching_method2_alphas(config.n, p0, alphas1)
                                          : config.alphas_method2;
  // Validate the geometry once, before any replicate runs.
  for (double a : alphas1) derive_cv_params(config.n, p0, a, CvMethod::Method1);
  for (double a : alphas2) derive_cv_params(config.n, p0, a, CvMethod::Method2);

  std::vector<Records> records(config.replicates);
  unsigned threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(config.replicates));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= config.replicates) return;
      try {
        records[i] = run_replicate(config, specs, p0, alphas1, alphas2, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.replicates;
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SimulationResult result;
  result.p0 = p0;
  result.true_quantile = quantile(config.model, p0);
  result.alphas_method1 = alphas1;
  result.alphas_method2 = alphas2;
  for (SimMethod m : kAllSimMethods) {
    auto& per = result.per_replicate[m];
    per.reserve(config.replicates);
    for (const auto& rec : records) per.push_back(rec[slot(m)]);
    result.rmse[m] = rmse(per, result.true_quantile);
    if (m != SimMethod::Median) {
      auto& hist = result.selection_counts[m];
      for (const auto& r : per) ++hist[r.selected_index];
    }
  }
  return result;
}

}  // namespace xqs
