#include <cstdlib>
#include <string_view>
#include <vector>

#include "kernels_internal.hpp"

namespace xqs::kernels {
namespace {

constexpr KernelTable kScalar{Backend::Scalar, &scalar::check_loss_sum, &scalar::log1p_scaled_sum};

#if defined(XQS_HAVE_AVX2)
constexpr KernelTable kAvx2{Backend::Avx2, &avx2::check_loss_sum, &avx2::log1p_scaled_sum};
#endif
#if defined(XQS_HAVE_NEON)
constexpr KernelTable kNeon{Backend::Neon, &neon::check_loss_sum, &neon::log1p_scaled_sum};
#endif

std::vector<KernelTable> detect() {
  std::vector<KernelTable> tables{kScalar};
#if defined(XQS_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) tables.push_back(kAvx2);
#endif
#if defined(XQS_HAVE_NEON)
  tables.push_back(kNeon);
#endif
  return tables;
}

const std::vector<KernelTable>& tables() {
  static const std::vector<KernelTable> t = detect();
  return t;
}

const KernelTable* find(Backend b) {
  for (const auto& t : tables()) {
    if (t.backend == b) return &t;
  }
  return nullptr;
}

const KernelTable* initial() {
  if (const char* env = std::getenv("XQS_SIMD")) {
    const std::string_view want(env);
    for (const auto& t : tables()) {
      if (backend_name(t.backend) == want) return &t;
    }
  }
  // Widest available.
  return &tables().back();
}

const KernelTable*& current() {
  static const KernelTable* c = initial();
  return c;
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

std::span<const KernelTable> available() { return tables(); }

const KernelTable& active() { return *current(); }

bool select(Backend b) {
  const KernelTable* t = find(b);
  if (t == nullptr) return false;
  current() = t;
  return true;
}

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace xqs::kernels
