#include "xqs/distributions.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "xqs/error.hpp"

namespace xqs {
namespace {

bool near_zero_shape(double xi) { return std::abs(xi) < kShapeZeroTolerance; }

void require_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("probability must lie in (0, 1), got " + std::to_string(p));
  }
}

double gpd_cdf(const GpdParams& g, double x) {
  if (!(x > g.location)) return 0.0;
  const double z = (x - g.location) / g.scale;
  if (near_zero_shape(g.shape)) return -std::expm1(-z);
  if (g.shape < 0.0 && z >= -1.0 / g.shape) return 1.0;
  return -std::expm1(-std::log1p(g.shape * z) / g.shape);
}

double gpd_quantile(const GpdParams& g, double p) {
  const double log_tail = std::log1p(-p);  // log(1 - p)
  if (near_zero_shape(g.shape)) return g.location - g.scale * log_tail;
  return g.location + g.scale * std::expm1(-g.shape * log_tail) / g.shape;
}

double gev_cdf(const GevParams& g, double x) {
  const double z = (x - g.location) / g.scale;
  if (near_zero_shape(g.shape)) return std::exp(-std::exp(-z));
  const double t = 1.0 + g.shape * z;
  if (t <= 0.0) return g.shape > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-std::log(t) / g.shape));
}

double gev_quantile(const GevParams& g, double p) {
  const double y = -std::log(p);
  if (near_zero_shape(g.shape)) return g.location - g.scale * std::log(y);
  return g.location + g.scale * std::expm1(-g.shape * std::log(y)) / g.shape;
}

double gamma_scale(const GammaParams& g) { return g.scale / g.rate; }

double gamma_cdf(const GammaParams& g, double x) {
  if (!(x > 0.0)) return 0.0;
  return regularized_gamma_p(g.shape, x / gamma_scale(g));
}

/// Bisection on a nondecreasing cdf. [lo, hi] must straddle p; the bracket
/// is widened geometrically otherwise.
template <class Cdf>
double invert_by_bisection(const Cdf& F, double p, double lo, double hi) {
  double step = std::max(1.0, hi - lo);
  while (F(lo) > p) {
    lo -= step;
    step *= 2.0;
  }
  step = std::max(1.0, hi - lo);
  while (F(hi) < p) {
    hi += step;
    step *= 2.0;
  }
  for (int iter = 0; iter < 2000; ++iter) {
    const double width = hi - lo;
    if (width <= 1e-10 && width <= 1e-12 * std::max(std::abs(lo), std::abs(hi))) break;
    // Geometric midpoint while the bracket spans orders of magnitude above 0.
    const double mid = (lo > 0.0 && hi > 4.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (F(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double gamma_quantile(const GammaParams& g, double p) {
  const double theta = gamma_scale(g);
  const auto F = [&](double x) { return x <= 0.0 ? 0.0 : regularized_gamma_p(g.shape, x / theta); };
  double hi = theta * std::max(1.0, g.shape);
  while (F(hi) < p) hi *= 2.0;
  double lo = hi;
  while (lo > std::numeric_limits<double>::min() && F(lo) >= p) lo *= 0.5;
  return invert_by_bisection(F, p, lo, hi);
}

void validate_family(const Family& f) {
  const auto finite = [](double v) { return std::isfinite(v); };
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, UniformParams>) {
          if (!finite(g.lo) || !finite(g.hi) || !(g.lo < g.hi)) {
            throw DomainError("unif(lo,hi) requires finite lo < hi");
          }
        } else if constexpr (std::is_same_v<T, GammaParams>) {
          if (!(g.rate > 0.0 && g.scale > 0.0 && g.shape > 0.0) || !finite(g.rate) ||
              !finite(g.scale) || !finite(g.shape)) {
            throw DomainError("gamma(rate,scale,shape) requires positive finite parameters");
          }
        } else {
          if (!finite(g.location) || !finite(g.shape) || !finite(g.scale) || !(g.scale > 0.0)) {
            throw DomainError("scale must be positive and parameters finite");
          }
        }
      },
      f);
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string describe_family(const Family& f) {
  return std::visit(
      [](const auto& g) -> std::string {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, UniformParams>) {
          return "unif(" + fmt(g.lo) + "," + fmt(g.hi) + ")";
        } else if constexpr (std::is_same_v<T, GpdParams>) {
          return "gpd(" + fmt(g.location) + "," + fmt(g.scale) + "," + fmt(g.shape) + ")";
        } else if constexpr (std::is_same_v<T, GevParams>) {
          return "gev(" + fmt(g.location) + "," + fmt(g.scale) + "," + fmt(g.shape) + ")";
        } else {
          return "gamma(" + fmt(g.rate) + "," + fmt(g.scale) + "," + fmt(g.shape) + ")";
        }
      },
      f);
}

// ---- model grammar ----------------------------------------------------------

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::vector<Component> parse_all() {
    auto comps = parse_term(1.0);
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return comps;
  }

private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("model string '" + std::string(text_) + "': " + what + " at offset " +
                     std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }

  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string id(text_.substr(start, pos_ - start));
    std::transform(id.begin(), id.end(), id.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return id;
  }

  double number() {
    skip_ws();
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (first != last && *first == '+') ++first;
    double v = 0.0;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return v;
  }

  std::vector<double> arguments(std::size_t count) {
    expect('(');
    std::vector<double> args;
    for (std::size_t i = 0; i < count; ++i) {
      if (i > 0) expect(',');
      args.push_back(number());
    }
    expect(')');
    return args;
  }

  // family | mix(...)
  std::vector<Component> parse_term(double weight) {
    const std::string name = identifier();
    if (name == "mix") {
      expect('(');
      std::vector<Component> out;
      do {
        const double w = number();
        expect('*');
        for (auto& c : parse_term(w)) {
          c.weight *= weight;
          out.push_back(std::move(c));
        }
      } while (consume('+'));
      expect(')');
      return out;
    }
    Family f;
    if (name == "gpd") {
      const auto a = arguments(3);
      f = GpdParams{a[0], a[1], a[2]};
    } else if (name == "gev") {
      const auto a = arguments(3);
      f = GevParams{a[0], a[1], a[2]};
    } else if (name == "gamma") {
      const auto a = arguments(3);
      f = GammaParams{a[0], a[1], a[2]};
    } else if (name == "unif") {
      const auto a = arguments(2);
      f = UniformParams{a[0], a[1]};
    } else if (name.empty()) {
      fail("expected a family name");
    } else {
      fail("unknown family '" + name + "'");
    }
    return {Component{weight, f}};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

// ---- DataModel --------------------------------------------------------------

DataModel::DataModel(std::vector<Component> components) : components_(std::move(components)) {
  if (components_.empty()) throw DomainError("a model needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0 && c.weight <= 1.0)) throw DomainError("mixture weights must lie in (0, 1]");
    validate_family(c.family);
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("mixture weights must sum to 1, got " + fmt(total));
  }
}

DataModel::DataModel(Family family) : DataModel(std::vector<Component>{Component{1.0, family}}) {}

std::string DataModel::describe() const {
  if (components_.size() == 1) return describe_family(components_.front().family);
  std::string s = "mix(";
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i > 0) s += " + ";
    s += fmt(components_[i].weight) + "*" + describe_family(components_[i].family);
  }
  return s + ")";
}

// ---- per-family -------------------------------------------------------------

double cdf(const Family& f, double x) {
  return std::visit(
      [x](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, UniformParams>) {
          if (x <= g.lo) return 0.0;
          if (x >= g.hi) return 1.0;
          return (x - g.lo) / (g.hi - g.lo);
        } else if constexpr (std::is_same_v<T, GpdParams>) {
          return gpd_cdf(g, x);
        } else if constexpr (std::is_same_v<T, GevParams>) {
          return gev_cdf(g, x);
        } else {
          return gamma_cdf(g, x);
        }
      },
      f);
}

double quantile(const Family& f, double p) {
  require_probability(p);
  return std::visit(
      [p](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, UniformParams>) {
          return g.lo + p * (g.hi - g.lo);
        } else if constexpr (std::is_same_v<T, GpdParams>) {
          return gpd_quantile(g, p);
        } else if constexpr (std::is_same_v<T, GevParams>) {
          return gev_quantile(g, p);
        } else {
          return gamma_quantile(g, p);
        }
      },
      f);
}

double cdf(const DataModel& model, double x) {
  double s = 0.0;
  for (const auto& c : model.components()) s += c.weight * cdf(c.family, x);
  return std::clamp(s, 0.0, 1.0);
}

double quantile(const DataModel& model, double p) {
  require_probability(p);
  const auto& comps = model.components();
  if (comps.size() == 1) return quantile(comps.front().family, p);
  // The mixture quantile lies between the smallest and largest component
  // quantiles at the same level.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& c : comps) {
    const double q = quantile(c.family, p);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  return invert_by_bisection([&](double x) { return cdf(model, x); }, p, lo, hi);
}

Sample sample(const DataModel& model, std::size_t n, RandomStream& rng) {
  if (n == 0) throw DomainError("sample size must be at least 1");
  const auto& comps = model.components();
  std::vector<double> cumulative;
  cumulative.reserve(comps.size());
  double acc = 0.0;
  for (const auto& c : comps) cumulative.push_back(acc += c.weight);

  Sample out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t which = 0;
    if (comps.size() > 1) {
      const double u = rng.uniform() * acc;
      which = static_cast<std::size_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      which = std::min(which, comps.size() - 1);
    }
    out.push_back(quantile(comps[which].family, rng.uniform()));
  }
  return out;
}

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw DomainError("gamma shape must be positive");
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  constexpr double eps = 1e-16;
  if (x < a + 1.0) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < 10000; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * eps) break;
    }
    return std::min(1.0, sum * std::exp(log_prefix));
  }
  // Continued fraction for Q(a, x), modified Lentz.
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < eps) break;
  }
  return std::max(0.0, 1.0 - std::exp(log_prefix) * h);
}

DataModel parse_model(std::string_view text) { return DataModel(Parser(text).parse_all()); }

const std::vector<std::string>& reference_model_ids() {
  static const std::vector<std::string> ids = {"i:a", "i:b", "i:c", "ii:a", "ii:b", "iii", "iv"};
  return ids;
}

DataModel reference_model(std::string_view id) {
  if (id == "i:a") return parse_model("gpd(10,1,-0.5)");
  if (id == "i:b") return parse_model("gpd(10,1,0)");
  if (id == "i:c") return parse_model("gpd(10,1,0.5)");
  if (id == "ii:a") return parse_model("mix(0.5*unif(0,10) + 0.5*gpd(10,1,0.5))");
  if (id == "ii:b") return parse_model("mix(0.99*unif(0,10) + 0.01*gpd(10,1,0.5))");
  if (id == "iii") return parse_model("mix(0.5*gpd(10,1,0.1) + 0.5*gpd(10,1,0.5))");
  if (id == "iv") return parse_model("gamma(1,1,0.1)");
  throw DomainError("unknown reference model '" + std::string(id) + "'");
}

}  // namespace xqs
