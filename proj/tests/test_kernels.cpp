#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "xqs/kernels.hpp"

using namespace xqs::kernels;

namespace {

std::vector<double> random_values(std::mt19937_64& gen, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

}  // namespace

TEST_CASE("scalar backend is always available and first") {
  const auto tables = available();
  REQUIRE_FALSE(tables.empty());
  CHECK(tables.front().backend == Backend::Scalar);
  CHECK(backend_name(Backend::Scalar) == "scalar");
  MESSAGE("active backend: " << backend_name(active().backend));
}

TEST_CASE("check_loss_sum backends agree with the scalar reference") {
  std::mt19937_64 gen(7);
  const KernelTable& ref = scalar_table();
  for (const auto& t : available()) {
    CAPTURE(backend_name(t.backend));
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 63, 64, 65, 1000, 7499}) {
      const auto x = random_values(gen, n, -5.0, 20.0);
      for (double q : {-10.0, 0.0, 3.7, 19.9, 25.0}) {
        for (double p : {0.01, 0.5, 0.9, 0.99993}) {
          const double a = ref.check_loss_sum(q, p, x.data(), n);
          const double b = t.check_loss_sum(q, p, x.data(), n);
          CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
        }
      }
    }
  }
}

TEST_CASE("check_loss_sum matches the defining formula on a hand example") {
  // q = 2 against {1, 3} at p = 0.5: 0.5 + 0.5.
  const std::vector<double> x = {1.0, 3.0};
  for (const auto& t : available()) {
    CHECK(t.check_loss_sum(2.0, 0.5, x.data(), x.size()) == doctest::Approx(1.0).epsilon(1e-15));
    // Under-prediction costs p per unit, over-prediction 1 - p.
    CHECK(t.check_loss_sum(2.0, 0.9, x.data(), x.size()) == doctest::Approx(0.1 + 0.9).epsilon(1e-15));
    CHECK(t.check_loss_sum(5.0, 0.9, x.data(), x.size()) == doctest::Approx(0.1 * 6.0).epsilon(1e-15));
  }
}

TEST_CASE("log1p_scaled_sum backends agree with the scalar reference") {
  std::mt19937_64 gen(11);
  const KernelTable& ref = scalar_table();
  for (const auto& t : available()) {
    CAPTURE(backend_name(t.backend));
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 31, 150, 10000}) {
      const auto x = random_values(gen, n, 1e-6, 50.0);
      for (double a : {-0.019, -1e-7, 1e-9, 0.3, 2.0, 1e6}) {
        const auto r = ref.log1p_scaled_sum(a, x.data(), n);
        const auto s = t.log1p_scaled_sum(a, x.data(), n);
        REQUIRE(r.feasible == s.feasible);
        if (r.feasible) {
          CHECK(std::abs(r.sum - s.sum) <= 1e-13 * std::max(1.0, std::abs(r.sum)) + 1e-15 * double(n));
        }
      }
    }
  }
}

TEST_CASE("vector log is accurate across the exponent range") {
  for (const auto& t : available()) {
    CAPTURE(backend_name(t.backend));
    for (double y : {1e-10, 1e-3, 0.5, 0.70710678, 0.99, 1.0, 1.0000001, 1.41421, 1.5, 2.0, 3.14159,
                     1e3, 1e100, 1e300}) {
      const double x = 1.0;
      const double a = y - 1.0;
      const double expected = std::log(1.0 + a);
      const auto r = t.log1p_scaled_sum(a, &x, 1);
      REQUIRE(r.feasible);
      CHECK(std::abs(r.sum - expected) <= 4e-16 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("log1p_scaled_sum flags points outside the support") {
  const std::vector<double> x = {0.5, 1.0, 2.0, 4.0, 8.0, 0.1};
  for (const auto& t : available()) {
    CAPTURE(backend_name(t.backend));
    CHECK_FALSE(t.log1p_scaled_sum(-0.5, x.data(), x.size()).feasible);   // 1 - 0.5*4 < 0
    CHECK_FALSE(t.log1p_scaled_sum(-0.25, x.data(), x.size()).feasible);  // 1 - 0.25*4 = 0
    CHECK(t.log1p_scaled_sum(-0.1, x.data(), x.size()).feasible);
    // Infeasible element sitting in the tail, not in a full vector.
    const std::vector<double> y = {0.1, 0.1, 0.1, 0.1, 0.1, 100.0};
    CHECK_FALSE(t.log1p_scaled_sum(-0.02, y.data(), y.size()).feasible);
  }
}

TEST_CASE("select switches the active backend") {
  const Backend before = active().backend;
  REQUIRE(select(Backend::Scalar));
  CHECK(active().backend == Backend::Scalar);
  for (const auto& t : available()) CHECK(select(t.backend));
  CHECK(select(before));
}
