#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference
// implementation and optional SIMD variants; the variant is chosen once at
// startup from the CPU features (override with XQS_SIMD=scalar|avx2|neon).

#include <cstddef>
#include <span>
#include <string_view>

namespace xqs::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b) noexcept;

/// Result of summing log(1 + a*x) over a span.
struct Log1pSum {
  double sum = 0.0;
  /// false when 1 + a*x <= 0 for some element; sum is meaningless then.
  bool feasible = true;
};

/// Table of kernel entry points for one backend.
struct KernelTable {
  Backend backend;
  /// sum_i (x_i - q) * (p - [x_i < q])
  double (*check_loss_sum)(double q, double p, const double* x, std::size_t n);
  /// sum_i log(1 + a * x_i), with a feasibility flag.
  Log1pSum (*log1p_scaled_sum)(double a, const double* x, std::size_t n);
};

/// Backends compiled into this binary that the running CPU supports.
std::span<const KernelTable> available();

/// The table every library routine dispatches through.
const KernelTable& active();

/// Force a backend (tests and benchmarking). Returns false, and leaves the
/// active table unchanged, if the backend is unavailable.
bool select(Backend b);

const KernelTable& scalar_table() noexcept;

inline double check_loss_sum(double q, double p, std::span<const double> x) {
  return active().check_loss_sum(q, p, x.data(), x.size());
}

inline Log1pSum log1p_scaled_sum(double a, std::span<const double> x) {
  return active().log1p_scaled_sum(a, x.data(), x.size());
}

}  // namespace xqs::kernels
