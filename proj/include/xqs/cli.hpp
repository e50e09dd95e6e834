#pragma once

// Command-line orchestration shared by the xqs tool and its tests.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xqs/estimators.hpp"
#include "xqs/protocol.hpp"

namespace xqs::cli {

enum class Command { Simulate, Assess };

struct RunConfig {
  Command command = Command::Assess;
  /// Model strings (grammar or reference id). Assess takes at most one.
  std::vector<std::string> models;
  std::optional<std::filesystem::path> input;
  /// nullopt means auto: 1 - 1/(2n).
  std::optional<double> p0;
  std::vector<double> alphas = {1, 2, 4, 8};
  /// Method-2 alphas; empty derives them from the Method-1 fold counts.
  std::vector<double> alphas_method2;
  std::vector<AssessMethod> methods = {AssessMethod::Conventional, AssessMethod::Method1,
                                       AssessMethod::Method2};
  std::vector<PredictorSet> sets = {PredictorSet::ZeroAB};
  std::size_t replicates = 200;
  /// Sample size for simulate, and for assess on a model.
  std::size_t n = 7500;
  std::uint64_t seed = 1;
  bool zero_filter = false;
  unsigned threads = 0;
  std::filesystem::path out = "xqs-out";
};

/// Check the cross-field invariants; throws DomainError.
void validate(const RunConfig& config);

/// Apply a JSON config document; keys mirror the long flag names.
void apply_json(RunConfig& config, const std::string& json_text);

std::vector<AssessMethod> parse_methods(const std::string& csv);
std::vector<double> parse_reals(const std::string& csv);

/// Run the command, writing reports under config.out and a short summary to
/// `log`. On failure every file this run created is removed and the
/// exception propagates.
void run(const RunConfig& config, std::ostream& log);

/// Entry point used by the executable; returns the process exit status.
int main(int argc, char** argv);

}  // namespace xqs::cli
