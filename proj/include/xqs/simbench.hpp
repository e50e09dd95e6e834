#pragma once

// Monte Carlo comparison of the assessment methods: draw replicates from a
// known model, let each method pick a predictor, and measure the RMSE of the
// picked predictor's full-sample p0 prediction against the true quantile.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xqs/distributions.hpp"
#include "xqs/estimators.hpp"
#include "xqs/protocol.hpp"

namespace xqs {

enum class SimMethod { Conventional, Method1, Method2, Median, Random };

inline constexpr std::array<SimMethod, 5> kAllSimMethods = {
    SimMethod::Conventional, SimMethod::Method1, SimMethod::Method2, SimMethod::Median,
    SimMethod::Random};

std::string_view sim_method_name(SimMethod m);  // qs, scv1, scv2, median, random

struct SimulationConfig {
  DataModel model;
  std::size_t n = 7500;
  std::size_t replicates = 200;
  /// 0 selects 1 - 1/(2n).
  double p0 = 0.0;
  /// Tuning values for Method 1.
  std::vector<double> alphas_method1 = {1, 2, 4, 8};
  /// Tuning values for Method 2; empty means "the values giving the same
  /// fold counts as alphas_method1".
  std::vector<double> alphas_method2{};
  PredictorSet predictor_set = PredictorSet::AB;
  std::uint64_t master_seed = 1;
  /// 0 uses std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct ReplicateRecord {
  /// Predictor index (0-20) chosen by the method; -1 for the median baseline.
  int selected_index = -1;
  double value = 0.0;
};

struct SimulationResult {
  double p0 = 0.0;
  double true_quantile = 0.0;
  std::map<SimMethod, double> rmse;
  /// Counts per predictor index for every method that selects a predictor.
  std::map<SimMethod, std::map<int, std::size_t>> selection_counts;
  /// per_replicate[method][i]
  std::map<SimMethod, std::vector<ReplicateRecord>> per_replicate;
  std::vector<double> alphas_method1;
  std::vector<double> alphas_method2;
};

double resolve_p0(double p0, std::size_t n);

/// Method-2 alphas with the same fold counts as the given Method-1 alphas.
std::vector<double> matching_method2_alphas(std::size_t n, double p0,
                                            std::span<const double> alphas_method1);

/// Replicate i uses seed derive_seed(master_seed, i); replicates run in
/// parallel and are reduced in index order, so results do not depend on the
/// thread count.
SimulationResult run_simulation(const SimulationConfig& config);

/// Median of the predicted values (mean of the middle pair for even counts).
double median_baseline(std::span<const Prediction> predictions);

/// One prediction chosen uniformly at random.
const Prediction& random_baseline(std::span<const Prediction> predictions, RandomStream& rng);

/// sqrt(mean (value - truth)^2).
double rmse(std::span<const ReplicateRecord> records, double truth);

}  // namespace xqs
