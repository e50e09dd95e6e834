// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cstdint>
#include <cstring>

#include "kernels_internal.hpp"

namespace xqs::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Natural log of positive normal doubles.
inline __m256d log_pd(__m256d y) {
  const __m256i bits = _mm256_castpd_si256(y);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

  // Biased exponent to double via the 2^52 trick.
  const __m256i e_biased = _mm256_srli_epi64(bits, 52);
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(e_biased, magic)),
                            _mm256_set1_pd(4503599627370496.0 + 1023.0));

  // Fold m into [sqrt(1/2), sqrt(2)).
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GE_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d poly = _mm256_set1_pd(kAtanhCoeff[10]);
  for (int j = 9; j >= 0; --j) {
    poly = _mm256_add_pd(_mm256_mul_pd(poly, s2), _mm256_set1_pd(kAtanhCoeff[j]));
  }
  const __m256d log_m = _mm256_mul_pd(_mm256_add_pd(s, s), poly);
  return _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(kLn2Hi)),
                       _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(kLn2Lo)), log_m));
}

}  // namespace

double check_loss_sum(double q, double p, const double* x, std::size_t n) {
  const __m256d vq = _mm256_set1_pd(q);
  const __m256d vp = _mm256_set1_pd(p);
  const __m256d vpm1 = _mm256_set1_pd(p - 1.0);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc0 = zero;
  __m256d acc1 = zero;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + i), vq);
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + i + 4), vq);
    const __m256d c0 = _mm256_blendv_pd(vp, vpm1, _mm256_cmp_pd(d0, zero, _CMP_LT_OQ));
    const __m256d c1 = _mm256_blendv_pd(vp, vpm1, _mm256_cmp_pd(d1, zero, _CMP_LT_OQ));
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, c0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, c1));
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = x[i] - q;
    sum += d * (d < 0.0 ? p - 1.0 : p);
  }
  return sum;
}

Log1pSum log1p_scaled_sum(double a, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d tiny = _mm256_set1_pd(0x1.0p-1022);
  __m256d acc = _mm256_setzero_pd();
  __m256d bad = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d y = _mm256_add_pd(one, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(y, tiny, _CMP_NGE_UQ));
    acc = _mm256_add_pd(acc, log_pd(_mm256_max_pd(y, tiny)));
  }
  if (i < n) {
    // Pad with zeros: log(1 + a*0) is exactly 0.
    double tail[4] = {0.0, 0.0, 0.0, 0.0};
    std::memcpy(tail, x + i, (n - i) * sizeof(double));
    const __m256d y = _mm256_add_pd(one, _mm256_mul_pd(va, _mm256_loadu_pd(tail)));
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(y, tiny, _CMP_NGE_UQ));
    acc = _mm256_add_pd(acc, log_pd(_mm256_max_pd(y, tiny)));
  }
  Log1pSum r;
  r.feasible = _mm256_movemask_pd(bad) == 0;
  r.sum = r.feasible ? hsum(acc) : 0.0;
  return r;
}

}  // namespace xqs::kernels::avx2
