#include "xqs/scoring.hpp"

#include <string>

#include "xqs/error.hpp"
#include "xqs/kernels.hpp"

namespace xqs {

double average_score(double prediction, double p, std::span<const double> validation) {
  if (validation.empty()) throw DomainError("average score over an empty validation sample");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("probability must lie in (0, 1)");
  return kernels::check_loss_sum(prediction, p, validation) / static_cast<double>(validation.size());
}

std::size_t argmin(std::span<const double> scores) {
  if (scores.empty()) throw DomainError("argmin of an empty score list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] < scores[best]) best = i;
  }
  return best;
}

ConventionalAssessment conventional_assess(std::span<const Prediction> predictions, double p0,
                                           std::span<const double> sample) {
  if (predictions.empty()) throw DomainError("no predictions to assess");
  ConventionalAssessment out;
  out.scores.reserve(predictions.size());
  for (const auto& pred : predictions) out.scores.push_back(average_score(pred.value, p0, sample));
  out.selected = argmin(out.scores);
  return out;
}

}  // namespace xqs
