// AArch64 only; NEON is part of the base ISA there.

#include <arm_neon.h>

#include <cstring>

#include "kernels_internal.hpp"

namespace xqs::kernels::neon {
namespace {

inline float64x2_t log_pd(float64x2_t y) {
  const uint64x2_t bits = vreinterpretq_u64_f64(y);
  float64x2_t m = vreinterpretq_f64_u64(
      vorrq_u64(vandq_u64(bits, vdupq_n_u64(0x000FFFFFFFFFFFFFULL)), vdupq_n_u64(0x3FF0000000000000ULL)));
  float64x2_t e = vsubq_f64(vcvtq_f64_u64(vshrq_n_u64(bits, 52)), vdupq_n_f64(1023.0));

  const uint64x2_t big = vcgeq_f64(m, vdupq_n_f64(kSqrt2));
  m = vbslq_f64(big, vmulq_f64(m, vdupq_n_f64(0.5)), m);
  e = vbslq_f64(big, vaddq_f64(e, vdupq_n_f64(1.0)), e);

  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t s = vdivq_f64(vsubq_f64(m, one), vaddq_f64(m, one));
  const float64x2_t s2 = vmulq_f64(s, s);
  float64x2_t poly = vdupq_n_f64(kAtanhCoeff[10]);
  for (int j = 9; j >= 0; --j) {
    poly = vaddq_f64(vmulq_f64(poly, s2), vdupq_n_f64(kAtanhCoeff[j]));
  }
  const float64x2_t log_m = vmulq_f64(vaddq_f64(s, s), poly);
  return vaddq_f64(vmulq_f64(e, vdupq_n_f64(kLn2Hi)),
                   vaddq_f64(vmulq_f64(e, vdupq_n_f64(kLn2Lo)), log_m));
}

}  // namespace

double check_loss_sum(double q, double p, const double* x, std::size_t n) {
  const float64x2_t vq = vdupq_n_f64(q);
  const float64x2_t vp = vdupq_n_f64(p);
  const float64x2_t vpm1 = vdupq_n_f64(p - 1.0);
  const float64x2_t zero = vdupq_n_f64(0.0);
  float64x2_t acc = zero;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vq);
    const float64x2_t c = vbslq_f64(vcltq_f64(d, zero), vpm1, vp);
    acc = vaddq_f64(acc, vmulq_f64(d, c));
  }
  double sum = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = x[i] - q;
    sum += d * (d < 0.0 ? p - 1.0 : p);
  }
  return sum;
}

Log1pSum log1p_scaled_sum(double a, const double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t tiny = vdupq_n_f64(0x1.0p-1022);
  float64x2_t acc = vdupq_n_f64(0.0);
  uint64x2_t ok = vdupq_n_u64(~0ULL);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t y = vaddq_f64(one, vmulq_f64(va, vld1q_f64(x + i)));
    ok = vandq_u64(ok, vcgeq_f64(y, tiny));
    acc = vaddq_f64(acc, log_pd(vmaxq_f64(y, tiny)));
  }
  if (i < n) {
    double tail[2] = {x[i], 0.0};
    const float64x2_t y = vaddq_f64(one, vmulq_f64(va, vld1q_f64(tail)));
    ok = vandq_u64(ok, vcgeq_f64(y, tiny));
    acc = vaddq_f64(acc, log_pd(vmaxq_f64(y, tiny)));
  }
  Log1pSum r;
  r.feasible = (vgetq_lane_u64(ok, 0) & vgetq_lane_u64(ok, 1)) != 0;
  r.sum = r.feasible ? vaddvq_f64(acc) : 0.0;
  return r;
}

}  // namespace xqs::kernels::neon
