#pragma once

// Serialization of assessment and simulation results: JSON for score
// reports, RFC 4180 CSV for the simulation tables.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xqs/protocol.hpp"
#include "xqs/simbench.hpp"

namespace xqs {

nlohmann::json to_json(const CvPlan& plan);
nlohmann::json to_json(const ScoreReport& report);

/// Quote a CSV field if it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

struct RmseRow {
  std::string model;
  std::size_t n = 0;
  std::size_t replicates = 0;
  /// One result per predictor set, aligned with `sets`.
  std::vector<PredictorSet> sets;
  std::vector<SimulationResult> results;
};

/// Rows = models; columns = method x predictor set.
std::string rmse_table_csv(const std::vector<RmseRow>& rows);

/// One line per (model, set, method, predictor index), zero counts included.
std::string selection_freq_csv(const std::vector<RmseRow>& rows);

}  // namespace xqs
