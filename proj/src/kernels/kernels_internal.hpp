#pragma once

#include <cstddef>

#include "xqs/kernels.hpp"

namespace xqs::kernels {

namespace scalar {
double check_loss_sum(double q, double p, const double* x, std::size_t n);
Log1pSum log1p_scaled_sum(double a, const double* x, std::size_t n);
}  // namespace scalar

#if defined(XQS_HAVE_AVX2)
namespace avx2 {
double check_loss_sum(double q, double p, const double* x, std::size_t n);
Log1pSum log1p_scaled_sum(double a, const double* x, std::size_t n);
}  // namespace avx2
#endif

#if defined(XQS_HAVE_NEON)
namespace neon {
double check_loss_sum(double q, double p, const double* x, std::size_t n);
Log1pSum log1p_scaled_sum(double a, const double* x, std::size_t n);
}  // namespace neon
#endif

// log(m) = 2 atanh(s), s = (m - 1)/(m + 1). For m in [sqrt(1/2), sqrt(2))
// |s| < 0.1716, so s^2 < 0.0295 and eleven odd terms reach double precision.
// kAtanhCoeff[j] = 1 / (2j + 1).
inline constexpr double kAtanhCoeff[11] = {
    1.0,        1.0 / 3.0,  1.0 / 5.0,  1.0 / 7.0,  1.0 / 9.0,  1.0 / 11.0,
    1.0 / 13.0, 1.0 / 15.0, 1.0 / 17.0, 1.0 / 19.0, 1.0 / 21.0};

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kSqrt2 = 1.41421356237309504880;

}  // namespace xqs::kernels
