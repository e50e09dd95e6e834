#include <cmath>

#include "kernels_internal.hpp"

namespace xqs::kernels::scalar {

double check_loss_sum(double q, double p, const double* x, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - q;
    sum += d * (d < 0.0 ? p - 1.0 : p);
  }
  return sum;
}

Log1pSum log1p_scaled_sum(double a, const double* x, std::size_t n) {
  Log1pSum r;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a * x[i];
    if (!(t > -1.0)) {
      r.feasible = false;
      return r;
    }
    r.sum += std::log1p(t);
  }
  return r;
}

}  // namespace xqs::kernels::scalar
