#include "xqs/estimators.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "xqs/error.hpp"
#include "xqs/kernels.hpp"

namespace xqs {
namespace {

constexpr std::array<std::size_t, 10> kSetAOrderCounts = {150, 125, 100, 75, 50, 40, 30, 20, 10, 3};
constexpr std::array<double, 10> kSetBLevels = {0.98,  0.9833, 0.9867, 0.99,   0.993,
                                               0.995, 0.996,  0.9973, 0.9987, 0.9996};

constexpr double kShapeMin = -1.0;
constexpr double kShapeMax = 2.0;
constexpr double kSimplexTolerance = 1e-8;
constexpr int kMaxIterations = 5000;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("probability must lie in (0, 1), got " + std::to_string(p));
  }
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Negative log-likelihood in (log sigma, xi); +inf outside the shape box or
// the support.
struct GpdObjective {
  std::span<const double> x;
  double sum_x;

  double operator()(const std::array<double, 2>& theta) const {
    const double xi = theta[1];
    if (!(xi >= kShapeMin && xi <= kShapeMax) || !std::isfinite(theta[0])) return kInf;
    const double log_sigma = theta[0];
    const double sigma = std::exp(log_sigma);
    const double m = static_cast<double>(x.size());
    if (std::abs(xi) < kShapeZeroTolerance) return m * log_sigma + sum_x / sigma;
    const auto r = kernels::log1p_scaled_sum(xi / sigma, x);
    if (!r.feasible) return kInf;
    const double v = m * log_sigma + (1.0 + 1.0 / xi) * r.sum;
    return std::isfinite(v) ? v : kInf;
  }
};

struct SimplexResult {
  std::array<double, 2> best;
  double value;
  bool converged;
};

SimplexResult nelder_mead(const GpdObjective& f, std::array<double, 2> start,
                          std::array<double, 2> step) {
  using Point = std::array<double, 2>;
  std::array<Point, 3> v = {start, Point{start[0] + step[0], start[1]},
                            Point{start[0], start[1] + step[1]}};
  std::array<double, 3> fv = {f(v[0]), f(v[1]), f(v[2])};

  const auto lerp = [](const Point& a, const Point& b, double t) {
    return Point{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };

  bool converged = false;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int b = order[0], s = order[1], w = order[2];

    double diameter = 0.0;
    for (int i : {s, w}) {
      diameter = std::max({diameter, std::abs(v[i][0] - v[b][0]), std::abs(v[i][1] - v[b][1])});
    }
    if (diameter < kSimplexTolerance) {
      converged = std::isfinite(fv[b]);
      break;
    }

    const Point centroid{0.5 * (v[b][0] + v[s][0]), 0.5 * (v[b][1] + v[s][1])};
    const Point xr = lerp(centroid, v[w], -1.0);
    const double fr = f(xr);

    if (fr < fv[b]) {
      const Point xe = lerp(centroid, v[w], -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        v[w] = xe, fv[w] = fe;
      } else {
        v[w] = xr, fv[w] = fr;
      }
      continue;
    }
    if (fr < fv[s]) {
      v[w] = xr, fv[w] = fr;
      continue;
    }
    if (fr < fv[w]) {
      const Point xc = lerp(centroid, xr, 0.5);
      const double fc = f(xc);
      if (fc <= fr) {
        v[w] = xc, fv[w] = fc;
        continue;
      }
    } else {
      const Point xc = lerp(centroid, v[w], 0.5);
      const double fc = f(xc);
      if (fc < fv[w]) {
        v[w] = xc, fv[w] = fc;
        continue;
      }
    }
    for (int i : {s, w}) {
      v[i] = lerp(v[b], v[i], 0.5);
      fv[i] = f(v[i]);
    }
  }
  const auto it = std::min_element(fv.begin(), fv.end());
  const auto bi = static_cast<std::size_t>(it - fv.begin());
  return {v[bi], fv[bi], converged};
}

Prediction fallback(const PredictorSpec& spec, std::span<const double> sorted, std::size_t n_exceed) {
  return Prediction{sorted.back(), spec, true, n_exceed};
}

}  // namespace

// ---- PredictorSpec ----------------------------------------------------------

PredictorSpec PredictorSpec::empirical() { return PredictorSpec{}; }

PredictorSpec PredictorSpec::upper_order_count(std::size_t m, int index) {
  if (m < 2) throw DomainError("upper order count must be at least 2");
  PredictorSpec s;
  s.kind = Kind::GpdUpperOrderCount;
  s.order_count = m;
  s.index = index;
  return s;
}

PredictorSpec PredictorSpec::percentile(double q, int index) {
  require_probability(q);
  PredictorSpec s;
  s.kind = Kind::GpdPercentile;
  s.level = q;
  s.index = index;
  return s;
}

std::string PredictorSpec::label() const {
  switch (kind) {
    case Kind::Empirical: return "EMP";
    case Kind::GpdUpperOrderCount: return "A:m=" + std::to_string(order_count);
    case Kind::GpdPercentile: return "B:q=" + shortest(level);
  }
  return "?";
}

PredictorSet parse_predictor_set(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "a") return PredictorSet::A;
  if (t == "b") return PredictorSet::B;
  if (t == "ab") return PredictorSet::AB;
  if (t == "zero-ab" || t == "zeroab" || t == "0ab") return PredictorSet::ZeroAB;
  throw DomainError("unknown predictor set '" + std::string(text) + "' (expected a, b, ab, zero-ab)");
}

std::string_view predictor_set_name(PredictorSet set) {
  switch (set) {
    case PredictorSet::A: return "A";
    case PredictorSet::B: return "B";
    case PredictorSet::AB: return "AB";
    case PredictorSet::ZeroAB: return "0AB";
  }
  return "?";
}

PredictorSpec predictor_by_index(int index) {
  if (index == 0) return PredictorSpec::empirical();
  if (index >= 1 && index <= 10) {
    return PredictorSpec::upper_order_count(kSetAOrderCounts[static_cast<std::size_t>(index - 1)], index);
  }
  if (index >= 11 && index <= 20) {
    return PredictorSpec::percentile(kSetBLevels[static_cast<std::size_t>(index - 11)], index);
  }
  throw DomainError("predictor index must lie in 0..20, got " + std::to_string(index));
}

std::vector<PredictorSpec> make_predictor_set(PredictorSet set) {
  std::vector<PredictorSpec> out;
  const bool zero = set == PredictorSet::ZeroAB;
  const bool a = set != PredictorSet::B;
  const bool b = set != PredictorSet::A;
  if (zero) out.push_back(predictor_by_index(0));
  if (a) for (int i = 1; i <= 10; ++i) out.push_back(predictor_by_index(i));
  if (b) for (int i = 11; i <= 20; ++i) out.push_back(predictor_by_index(i));
  return out;
}

// ---- fitting ----------------------------------------------------------------

double gpd_log_likelihood(std::span<const double> excesses, double scale, double shape) {
  if (!(scale > 0.0) || excesses.empty()) return -kInf;
  const double m = static_cast<double>(excesses.size());
  if (std::abs(shape) < kShapeZeroTolerance) {
    const double sum = std::accumulate(excesses.begin(), excesses.end(), 0.0);
    return -m * std::log(scale) - sum / scale;
  }
  const auto r = kernels::log1p_scaled_sum(shape / scale, excesses);
  if (!r.feasible) return -kInf;
  return -m * std::log(scale) - (1.0 + 1.0 / shape) * r.sum;
}

MleResult fit_gpd_mle(std::span<const double> excesses) {
  if (excesses.size() < 2) {
    throw InsufficientDataError("GPD fit needs at least 2 excesses, got " +
                                std::to_string(excesses.size()));
  }
  double sum = 0.0;
  double lo = kInf;
  double hi = -kInf;
  for (double e : excesses) {
    if (!(e > 0.0) || !std::isfinite(e)) throw DomainError("excesses must be positive and finite");
    sum += e;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  if (hi - lo <= 1e-12 * hi) {
    throw FitFailureError("constant excesses have no interior likelihood maximum");
  }

  const GpdObjective objective{excesses, sum};
  const double mean = sum / static_cast<double>(excesses.size());
  SimplexResult r = nelder_mead(objective, {std::log(mean), 0.1}, {0.1, 0.1});
  if (!std::isfinite(r.value)) throw FitFailureError("GPD likelihood is not finite anywhere visited");
  // One restart from the optimum guards against a collapsed simplex.
  const SimplexResult again = nelder_mead(objective, r.best, {0.01, 0.01});
  if (again.value <= r.value) r = again;

  MleResult out;
  out.scale = std::exp(r.best[0]);
  out.shape = r.best[1];
  out.log_likelihood = -r.value;
  out.converged = again.converged && r.best[1] > kShapeMin + 1e-6 && r.best[1] < kShapeMax - 1e-6;
  return out;
}

// ---- predictors -------------------------------------------------------------

double empirical_quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("empirical quantile of an empty sample");
  require_probability(p);
  const double n = static_cast<double>(sorted.size());
  // ceil(n p), robust to n p landing a rounding error above an integer.
  const double np = n * p;
  const double rank = std::ceil(np - 1e-9 * std::max(1.0, np));
  if (rank >= n) return sorted.back();
  if (rank < 1.0) return sorted.front();
  return sorted[static_cast<std::size_t>(rank) - 1];
}

double empirical_quantile(std::span<const double> sample, double p) {
  Sample sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  return empirical_quantile_sorted(sorted, p);
}

double gpd_quantile_predict(const GpdFit& fit, double u, double p) {
  require_probability(p);
  if (!(fit.zeta_u > 0.0)) throw DomainError("exceedance rate must be positive");
  const double log_ratio = std::log(fit.zeta_u) - std::log1p(-p);
  const double sigma = fit.params.scale;
  const double xi = fit.params.shape;
  if (std::abs(xi) < kShapeZeroTolerance) return u + sigma * log_ratio;
  return u + sigma * std::expm1(xi * log_ratio) / xi;
}

double gev_quantile_predict(const GevParams& params, double p) {
  require_probability(p);
  const double log_y = std::log(-std::log(p));
  if (std::abs(params.shape) < kShapeZeroTolerance) return params.location - params.scale * log_y;
  return params.location + params.scale * std::expm1(-params.shape * log_y) / params.shape;
}

Prediction predict_sorted(const PredictorSpec& spec, std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("cannot train a predictor on an empty sample");
  require_probability(p);
  const std::size_t n = sorted.size();
  if (spec.kind == PredictorSpec::Kind::Empirical) {
    return Prediction{empirical_quantile_sorted(sorted, p), spec, false, 0};
  }

  double u = 0.0;
  std::span<const double> tail;
  if (spec.kind == PredictorSpec::Kind::GpdUpperOrderCount) {
    const std::size_t m = spec.order_count;
    if (m >= n) {
      throw SpecInfeasibleError(spec.label() + " needs more than " + std::to_string(m) +
                                " training points, got " + std::to_string(n));
    }
    u = sorted[n - 1 - m];
    tail = sorted.subspan(n - m);
  } else {
    u = empirical_quantile_sorted(sorted, spec.level);
    tail = std::span<const double>(std::upper_bound(sorted.begin(), sorted.end(), u), sorted.end());
  }
  // Ties with the threshold give zero excesses, which are left out.
  const auto first_above = std::upper_bound(tail.begin(), tail.end(), u);
  Sample excesses;
  excesses.reserve(static_cast<std::size_t>(tail.end() - first_above));
  for (auto it = first_above; it != tail.end(); ++it) excesses.push_back(*it - u);
  if (excesses.size() < 2) return fallback(spec, sorted, excesses.size());

  GpdFit fit;
  try {
    const MleResult mle = fit_gpd_mle(excesses);
    fit.params = GpdParams{u, mle.scale, mle.shape};
    fit.converged = mle.converged;
    fit.log_likelihood = mle.log_likelihood;
  } catch (const FitFailureError&) {
    return fallback(spec, sorted, excesses.size());
  }
  fit.n_exceed = excesses.size();
  fit.zeta_u = static_cast<double>(fit.n_exceed) / static_cast<double>(n);
  const double value = gpd_quantile_predict(fit, u, p);
  if (!std::isfinite(value)) return fallback(spec, sorted, fit.n_exceed);
  return Prediction{value, spec, false, fit.n_exceed};
}

Prediction predict(const PredictorSpec& spec, std::span<const double> training, double p) {
  Sample sorted(training.begin(), training.end());
  std::sort(sorted.begin(), sorted.end());
  return predict_sorted(spec, sorted, p);
}

}  // namespace xqs
