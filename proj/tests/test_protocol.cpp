#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "xqs/distributions.hpp"
#include "xqs/error.hpp"
#include "xqs/protocol.hpp"
#include "xqs/report.hpp"
#include "xqs/rng.hpp"

using namespace xqs;

namespace {

constexpr std::size_t kN = 7500;
constexpr double kP0 = 1.0 - 1.0 / 15000.0;

// Pinball loss written out independently of the library.
double pinball(double obs, double pred, double p) {
  return obs >= pred ? p * (obs - pred) : (1.0 - p) * (pred - obs);
}

Sample gpd_sample(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  return sample(DataModel(GpdParams{0, 1, 0.2}), n, rng);
}

}  // namespace

TEST_CASE("fold counts for the reference configuration") {
  const double a1[] = {1, 2, 4, 8};
  const double a2[] = {1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32};
  const std::size_t ks[] = {3, 5, 9, 17};
  for (int i = 0; i < 4; ++i) {
    const CvPlan m1 = derive_cv_params(kN, kP0, a1[i], CvMethod::Method1);
    const CvPlan m2 = derive_cv_params(kN, kP0, a2[i], CvMethod::Method2);
    CHECK(m1.k == ks[i]);
    CHECK(m2.k == ks[i]);
    CHECK(m1.n_c == kN / ks[i]);
    CHECK(m2.n_c == kN - kN / ks[i]);
    CHECK(m1.p_c == kP0 - a1[i] / kN);
    CHECK(m2.p_c == kP0 - a2[i] / kN);
  }
  const CvPlan p = derive_cv_params(kN, kP0, 1.0, CvMethod::Method1);
  CHECK(p.p_c == doctest::Approx(1.0 - 3.0 / 15000.0).epsilon(1e-15));
}

TEST_CASE("alpha equal to the expected exceedance count halves the sample") {
  const double alpha = kN * (1.0 - kP0);
  const CvPlan p = derive_cv_params(kN, kP0, alpha, CvMethod::Method1);
  CHECK(p.k == 2);
  CHECK(p.n_c == kN / 2);
  CHECK(derive_cv_params(kN, kP0, alpha, CvMethod::Method2).k == 2);
}

TEST_CASE("alpha_for_folds inverts the fold count") {
  for (std::size_t k : {2u, 3u, 5u, 9u, 17u, 40u}) {
    for (auto m : {CvMethod::Method1, CvMethod::Method2}) {
      CHECK(derive_cv_params(kN, kP0, alpha_for_folds(kN, kP0, k, m), m).k == k);
    }
  }
}

TEST_CASE("infeasible plans") {
  // Method 1 needs alpha >= n(1 - p0) for two folds.
  CHECK_THROWS_AS(derive_cv_params(kN, kP0, 0.1, CvMethod::Method1), InfeasiblePlanError);
  // Method 2 with alpha above n(1 - p0) gives k = 1.
  CHECK_THROWS_AS(derive_cv_params(kN, kP0, 1.0, CvMethod::Method2), InfeasiblePlanError);
  // p_c <= 0.
  CHECK_THROWS_AS(derive_cv_params(10, 0.5, 6.0, CvMethod::Method1), InfeasiblePlanError);
  CHECK_THROWS_AS(derive_cv_params(10, 1.0, 1.0, CvMethod::Method1), DomainError);
  CHECK_THROWS_AS(derive_cv_params(10, 0.9, -1.0, CvMethod::Method1), DomainError);
  CHECK_THROWS_AS(derive_cv_params(1, 0.9, 1.0, CvMethod::Method1), DomainError);
}

TEST_CASE("continuous solution satisfies both calibration equations") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double n = 10.0 + std::floor(U(gen) * 1e5);
    const double p0 = 1.0 - std::pow(10.0, -1.0 - 4.0 * U(gen));
    const double alpha = std::pow(10.0, -2.0 + 3.0 * U(gen));
    const ContinuousPlan c = continuous_cv_params(n, p0, alpha);
    const double lhs1 = c.n_c * c.tail;
    const double rhs1 = n * (1.0 - p0);
    const double lhs2 = c.n_v * c.tail;
    CHECK(std::abs(c.n_c + c.n_v - n) <= 1e-12 * n);
    CHECK(std::abs(c.p_c + c.tail - 1.0) <= 1e-15);
    CHECK(std::abs(lhs1 - rhs1) <= 1e-12 * rhs1);
    CHECK(std::abs(lhs2 - alpha) <= 1e-12 * alpha);
  }
}

TEST_CASE("validation exceedance counts follow the plan geometry") {
  const double lambda = kN * (1.0 - kP0);
  for (std::size_t k : {3u, 5u, 9u, 17u}) {
    const CvPlan m1 = derive_cv_params(kN, kP0, alpha_for_folds(kN, kP0, k, CvMethod::Method1),
                                       CvMethod::Method1);
    const CvPlan m2 = derive_cv_params(kN, kP0, alpha_for_folds(kN, kP0, k, CvMethod::Method2),
                                       CvMethod::Method2);
    const double e1 = static_cast<double>(kN - m1.n_c) * (1.0 - m1.p_c);
    const double e2 = static_cast<double>(kN - m2.n_c) * (1.0 - m2.p_c);
    // Flooring n/k moves n_c by less than one point.
    CHECK(std::abs(e1 - lambda * static_cast<double>(k - 1)) <= 1.0 - m1.p_c + 1e-12);
    CHECK(std::abs(e2 - lambda / static_cast<double>(k - 1)) <= 1.0 - m2.p_c + 1e-12);
  }
}

TEST_CASE("partition_folds") {
  SUBCASE("exact division") {
    const auto f = partition_folds(6, 3, 11);
    std::set<std::size_t> seen;
    for (std::size_t j = 0; j < 3; ++j) {
      const auto m = f.members(j);
      CHECK(m.size() == 2);
      seen.insert(m.begin(), m.end());
    }
    CHECK(seen.size() == 6);
  }
  SUBCASE("remainder") {
    const auto f = partition_folds(7, 3, 11);
    std::multiset<std::size_t> sizes;
    for (std::size_t j = 0; j < 3; ++j) sizes.insert(f.members(j).size());
    CHECK(sizes == std::multiset<std::size_t>{2, 2, 3});
  }
  SUBCASE("random sizes cover and balance") {
    std::mt19937_64 gen(3);
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = 2 + gen() % 500;
      const std::size_t k = 2 + gen() % (n - 1);
      const auto f = partition_folds(n, k, gen());
      std::vector<std::size_t> count(k, 0);
      for (auto j : f.fold_of) {
        REQUIRE(j < k);
        ++count[j];
      }
      const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
      CHECK(*hi - *lo <= 1);
    }
  }
  SUBCASE("deterministic in the seed") {
    CHECK(partition_folds(100, 7, 42).fold_of == partition_folds(100, 7, 42).fold_of);
    CHECK(partition_folds(100, 7, 42).fold_of != partition_folds(100, 7, 43).fold_of);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(partition_folds(3, 4, 1), DomainError);
    CHECK_THROWS_AS(partition_folds(3, 1, 1), DomainError);
  }
}

TEST_CASE("scv1 and scv2 agree with a naive double loop") {
  const std::size_t n = 40;
  const double p0 = 0.95;
  const double alpha = 2.0;  // n(1 - p0) = 2, so k = 2 for both methods
  const Sample y = gpd_sample(n, 17);
  const std::vector<PredictorSpec> specs = {PredictorSpec::empirical(),
                                            PredictorSpec::upper_order_count(10, 1)};
  const std::uint64_t seed = 99;
  const double alphas[] = {alpha};

  for (auto method : {CvMethod::Method1, CvMethod::Method2}) {
    const ScoreReport r = cross_validated_score(method, specs, p0, alphas, y, seed, {});
    REQUIRE(r.plans.size() == 1);
    REQUIRE(r.plans[0].k == 2);
    const double pc = p0 - alpha / static_cast<double>(n);
    const auto folds = partition_folds(n, 2, derive_seed(seed, 0));

    std::vector<double> oracle(specs.size(), 0.0);
    for (std::size_t s = 0; s < specs.size(); ++s) {
      for (std::size_t j = 0; j < 2; ++j) {
        Sample train;
        Sample validate;
        for (std::size_t i = 0; i < n; ++i) {
          const bool in = folds.fold_of[i] == j;
          const bool is_train = method == CvMethod::Method1 ? in : !in;
          (is_train ? train : validate).push_back(y[i]);
        }
        const double q = predict(specs[s], train, pc).value;
        double sum = 0.0;
        for (double v : validate) sum += pinball(v, q, pc);
        oracle[s] += sum / static_cast<double>(validate.size()) / 2.0;
      }
      CHECK(std::abs(r.combined_scores[s] - oracle[s]) <= 1e-12 * oracle[s]);
    }
    CHECK(r.selected == (oracle[1] < oracle[0] ? 1u : 0u));
  }
}

TEST_CASE("with two folds the two methods coincide") {
  const Sample y = gpd_sample(300, 4);
  const double p0 = 0.99;
  const double alphas[] = {300 * (1 - p0)};
  const auto specs = make_predictor_set(PredictorSet::A);
  const std::vector<PredictorSpec> small(specs.begin() + 4, specs.end());
  const auto r1 = scv1(small, p0, alphas, y, 8);
  const auto r2 = scv2(small, p0, alphas, y, 8);
  CHECK(r1.combined_scores == r2.combined_scores);
  CHECK(r1.selected == r2.selected);
}

TEST_CASE("combined score is the mean of the per-alpha scores") {
  const Sample y = gpd_sample(2000, 6);
  const double p0 = 1.0 - 1.0 / 4000.0;
  const double alphas[] = {1, 2, 4};
  const auto specs = make_predictor_set(PredictorSet::ZeroAB);
  const auto r = scv1(specs, p0, alphas, y, 1);
  for (std::size_t s = 0; s < specs.size(); ++s) {
    double m = 0.0;
    for (double v : r.per_alpha_scores[s]) m += v;
    CHECK(r.combined_scores[s] == doctest::Approx(m / 3.0).epsilon(1e-15));
  }
  CHECK(r.selected == argmin(r.combined_scores));
  CHECK(r.predictions_at_p0.size() == specs.size());
  CHECK(r.fold_fallbacks.size() == specs.size());
}

TEST_CASE("Method 1 trains on each point exactly once per alpha") {
  const std::size_t n = 1000;
  const double p0 = 1.0 - 1.0 / 2000.0;
  for (double alpha : {1.0, 2.0, 4.0, 8.0}) {
    const CvPlan plan = derive_cv_params(n, p0, alpha, CvMethod::Method1);
    const auto f = partition_folds(n, plan.k, 5);
    std::vector<int> trained(n, 0);
    for (std::size_t j = 0; j < plan.k; ++j) {
      for (auto i : f.members(j)) ++trained[i];
    }
    CHECK(std::all_of(trained.begin(), trained.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("reports are deterministic in the seed") {
  const Sample y = gpd_sample(1500, 2);
  const double p0 = 1.0 - 1.0 / 3000.0;
  const double alphas[] = {1, 2};
  const auto specs = make_predictor_set(PredictorSet::ZeroAB);
  const auto a = scv1(specs, p0, alphas, y, 77);
  const auto b = scv1(specs, p0, alphas, y, 77);
  CHECK(a.per_alpha_scores == b.per_alpha_scores);
  CHECK(a.selected == b.selected);
  CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("errors and trivial selections") {
  const Sample y = gpd_sample(200, 9);
  const double p0 = 1.0 - 1.0 / 400.0;
  const double alphas[] = {1.0};
  SUBCASE("order count larger than a training fold") {
    const std::vector<PredictorSpec> specs = {PredictorSpec::upper_order_count(150, 1)};
    CHECK_THROWS_AS(scv1(specs, p0, alphas, y, 1), SpecInfeasibleError);
  }
  SUBCASE("single predictor") {
    const std::vector<PredictorSpec> specs = {PredictorSpec::upper_order_count(10, 9)};
    CHECK(scv1(specs, p0, alphas, y, 1).selected == 0);
    CHECK(conventional_report(specs, p0, y).selected == 0);
  }
  SUBCASE("infeasible alpha propagates") {
    const double bad[] = {1.0};
    const std::vector<PredictorSpec> specs = {PredictorSpec::empirical()};
    CHECK_THROWS_AS(scv2(specs, p0, bad, y, 1), InfeasiblePlanError);
  }
  SUBCASE("empty inputs") {
    const std::vector<PredictorSpec> specs = {PredictorSpec::empirical()};
    CHECK_THROWS_AS(scv1(specs, p0, std::span<const double>{}, y, 1), DomainError);
    CHECK_THROWS_AS(scv1({}, p0, alphas, y, 1), DomainError);
  }
}

TEST_CASE("report serialization") {
  const Sample y = gpd_sample(800, 3);
  const double p0 = 1.0 - 1.0 / 1600.0;
  const double alphas[] = {1, 2};
  const auto specs = make_predictor_set(PredictorSet::B);
  const auto j = to_json(scv1(specs, p0, alphas, y, 4));
  CHECK(j.at("method") == "scv1");
  CHECK(j.at("alphas").size() == 2);
  CHECK(j.at("plans").size() == 2);
  CHECK(j.at("plans")[0].at("k") == 3);
  CHECK(j.at("predictors").size() == specs.size());
  CHECK(j.at("selected").is_object());
  const auto c = to_json(conventional_report(specs, p0, y));
  CHECK(c.at("method") == "qs");
}
