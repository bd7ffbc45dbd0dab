#include <cstdlib>
#include <string>

#include "kernels.hpp"
#include "wustat/simd.hpp"

namespace wustat::simd {

namespace {

constexpr Ops kScalar{Isa::scalar, detail::pair_sum_scalar, detail::dot_scalar,
                      detail::chaos2_scalar};
#if defined(WUSTAT_HAVE_AVX2_TU)
constexpr Ops kAvx2{Isa::avx2, detail::pair_sum_avx2, detail::dot_avx2, detail::chaos2_avx2};
#endif
#if defined(WUSTAT_HAVE_NEON_TU) && defined(__aarch64__)
constexpr Ops kNeon{Isa::neon, detail::pair_sum_neon, detail::dot_neon, detail::chaos2_neon};
#endif

Isa pick_active() noexcept {
  if (const char* env = std::getenv("WUSTAT_ISA")) {
    const std::string want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && available(Isa::avx2)) return Isa::avx2;
    if (want == "neon" && available(Isa::neon)) return Isa::neon;
  }
  return best_isa();
}

}  // namespace

bool available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(WUSTAT_HAVE_AVX2_TU)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(WUSTAT_HAVE_NEON_TU) && defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() noexcept {
  if (available(Isa::avx2)) return Isa::avx2;
  if (available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

const Ops& ops(Isa isa) {
  switch (isa) {
#if defined(WUSTAT_HAVE_AVX2_TU)
    case Isa::avx2:
      if (available(Isa::avx2)) return kAvx2;
      break;
#endif
#if defined(WUSTAT_HAVE_NEON_TU) && defined(__aarch64__)
    case Isa::neon:
      return kNeon;
#endif
    default:
      break;
  }
  return kScalar;
}

Isa active_isa() noexcept {
  static const Isa isa = pick_active();
  return isa;
}

const Ops& active() { return ops(active_isa()); }

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

}  // namespace wustat::simd
