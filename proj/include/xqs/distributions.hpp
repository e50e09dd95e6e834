#pragma once

// Univariate data-generating models: GPD, GEV, Gamma, Uniform and finite
// mixtures of them, with CDF, quantile and inverse-transform sampling.

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "xqs/rng.hpp"

namespace xqs {

using Sample = std::vector<double>;

/// |shape| below this uses the exponential / Gumbel limit.
inline constexpr double kShapeZeroTolerance = 1e-6;

/// Generalized Pareto with threshold `location`, scale sigma_u and shape xi.
struct GpdParams {
  double location = 0.0;
  double scale = 1.0;
  double shape = 0.0;
};

struct GevParams {
  double location = 0.0;
  double scale = 1.0;
  double shape = 0.0;
};

/// Gamma law given as (rate, scale, shape); the effective scale is
/// scale / rate.
struct GammaParams {
  double rate = 1.0;
  double scale = 1.0;
  double shape = 1.0;
};

struct UniformParams {
  double lo = 0.0;
  double hi = 1.0;
};

using Family = std::variant<UniformParams, GpdParams, GevParams, GammaParams>;

struct Component {
  double weight = 1.0;
  Family family;
};

/// A finite mixture (a single family is a one-component mixture).
class DataModel {
public:
  /// Validates parameters and weights; throws DomainError.
  explicit DataModel(std::vector<Component> components);
  DataModel(Family family);  // NOLINT: single family converts implicitly

  const std::vector<Component>& components() const noexcept { return components_; }

  /// Canonical grammar string, e.g. "mix(0.5*unif(0,10) + 0.5*gpd(10,1,0.5))".
  std::string describe() const;

private:
  std::vector<Component> components_;
};

// Per-family primitives.
double cdf(const Family& f, double x);
double quantile(const Family& f, double p);

/// sum_i w_i F_i(x).
double cdf(const DataModel& model, double x);

/// Closed form for one family; bisection on cdf (1e-10 in x) for mixtures.
/// Throws DomainError unless 0 < p < 1.
double quantile(const DataModel& model, double p);

/// n i.i.d. draws: pick a component by weight, then invert its CDF at a
/// uniform variate. Throws DomainError for n == 0.
Sample sample(const DataModel& model, std::size_t n, RandomStream& rng);

/// Regularized lower incomplete gamma P(a, x): series below a + 1, Lentz
/// continued fraction above.
double regularized_gamma_p(double a, double x);

/// Parse the model grammar:
///   gpd(u,sigma,xi) | gev(mu,sigma,xi) | gamma(rate,scale,shape)
///   | unif(lo,hi) | mix(w1*F1 + w2*F2 + ...)
/// Throws ParseError on malformed input and DomainError on invalid values.
DataModel parse_model(std::string_view text);

/// The simulation-study models, by id: "i:a", "i:b", "i:c", "ii:a", "ii:b",
/// "iii", "iv". Throws DomainError for an unknown id.
DataModel reference_model(std::string_view id);

/// Ids accepted by reference_model, in table order.
const std::vector<std::string>& reference_model_ids();

}  // namespace xqs
