#include "xqs/report.hpp"

#include <charconv>
#include <sstream>

#include "xqs/error.hpp"

namespace xqs {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::json to_json(const CvPlan& plan) {
  return {{"method", plan.method == CvMethod::Method1 ? "method1" : "method2"},
          {"n", plan.n},
          {"p0", plan.p0},
          {"alpha", plan.alpha},
          {"k", plan.k},
          {"n_c", plan.n_c},
          {"p_c", plan.p_c}};
}

nlohmann::json to_json(const ScoreReport& report) {
  nlohmann::json j;
  j["method"] = std::string(assess_method_name(report.method));
  j["p0"] = report.p0;
  auto alphas = nlohmann::json::array();
  auto plans = nlohmann::json::array();
  for (const auto& plan : report.plans) {
    alphas.push_back(plan.alpha);
    plans.push_back(to_json(plan));
  }
  j["alphas"] = alphas;
  j["plans"] = plans;

  auto preds = nlohmann::json::array();
  std::size_t total_fallbacks = 0;
  for (std::size_t i = 0; i < report.specs.size(); ++i) {
    const auto& pred = report.predictions_at_p0.at(i);
    nlohmann::json row = {{"index", report.specs[i].index},
                          {"label", report.specs[i].label()},
                          {"combined_score", report.combined_scores.at(i)},
                          {"per_alpha_scores", report.per_alpha_scores.at(i)},
                          {"prediction_at_p0", pred.value},
                          {"fallback_at_p0", pred.fallback_used},
                          {"fold_fallbacks", report.fold_fallbacks.at(i)}};
    total_fallbacks += report.fold_fallbacks[i] + (pred.fallback_used ? 1 : 0);
    preds.push_back(std::move(row));
  }
  j["predictors"] = preds;
  j["fallback_count"] = total_fallbacks;
  const auto& sel = report.selected_prediction();
  j["selected"] = {{"index", report.specs.at(report.selected).index},
                   {"label", report.specs.at(report.selected).label()},
                   {"prediction_at_p0", sel.value}};
  return j;
}

std::string rmse_table_csv(const std::vector<RmseRow>& rows) {
  std::ostringstream os;
  os << "model,n,replicates,p0,true_quantile";
  const std::vector<PredictorSet> sets = rows.empty() ? std::vector<PredictorSet>{} : rows.front().sets;
  for (PredictorSet s : sets) {
    for (SimMethod m : kAllSimMethods) os << ',' << sim_method_name(m) << '_' << predictor_set_name(s);
  }
  os << "\r\n";
  for (const auto& row : rows) {
    if (row.sets != sets || row.results.size() != sets.size()) {
      throw DomainError("every RMSE row must cover the same predictor sets");
    }
    const SimulationResult& first = row.results.front();
    os << csv_escape(row.model) << ',' << row.n << ',' << row.replicates << ','
       << format_double(first.p0) << ',' << format_double(first.true_quantile);
    for (const auto& res : row.results) {
      for (SimMethod m : kAllSimMethods) os << ',' << format_double(res.rmse.at(m));
    }
    os << "\r\n";
  }
  return os.str();
}

std::string selection_freq_csv(const std::vector<RmseRow>& rows) {
  std::ostringstream os;
  os << "model,set,method,predictor_index,label,count\r\n";
  for (const auto& row : rows) {
    for (std::size_t s = 0; s < row.sets.size(); ++s) {
      const auto specs = make_predictor_set(row.sets[s]);
      for (const auto& [method, hist] : row.results[s].selection_counts) {
        for (const auto& spec : specs) {
          const auto it = hist.find(spec.index);
          os << csv_escape(row.model) << ',' << predictor_set_name(row.sets[s]) << ','
             << sim_method_name(method) << ',' << spec.index << ',' << csv_escape(spec.label()) << ','
             << (it == hist.end() ? 0 : it->second) << "\r\n";
        }
      }
    }
  }
  return os.str();
}

}  // namespace xqs
