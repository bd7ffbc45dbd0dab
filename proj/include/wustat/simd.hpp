#pragma once

#include <cstddef>
#include <string_view>

namespace wustat::simd {

enum class Isa { scalar, avx2, neon };

/// Kernels with a vectorized pair loop. Values match kernels::eval bit for bit.
enum class PairKernel : int {
  indicator = 0,  // |x - y| < param
  product_identity = 1,
  product_square = 2,
  wilcoxon = 3,
  additive_identity = 4,
  additive_square = 5,
};

/// Every ISA processes the same four (or eight, for chaos2) virtual lanes in
/// the same order without fused multiply-add, so results agree bit for bit.
inline constexpr std::size_t kLanes = 4;
inline constexpr std::size_t kChaosLanes = 8;

struct Ops {
  Isa isa;
  /// Σ_{t<count} K(x[t], y[t]), Neumaier-compensated per lane.
  double (*pair_sum)(PairKernel kernel, double param, const double* x, const double* y,
                     std::size_t count);
  /// Σ_{t<count} a[t] b[t].
  double (*dot)(const double* a, const double* b, std::size_t count);
  /// Second-order chaos sweep over kChaosLanes lanes. For s in [0, steps):
  ///   acc[l] += (p1[l - s] * eps[s]) * v[l];  v[l] += p2[l - s] * eps[s]
  /// acc and v are read and written (kChaosLanes entries each).
  void (*chaos2)(const double* p1, const double* p2, const double* eps, std::size_t steps,
                 double* acc, double* v);
};

const Ops& ops(Isa isa);
bool available(Isa isa) noexcept;
Isa best_isa() noexcept;

/// ISA used by the library. Defaults to best_isa(); the environment variable
/// WUSTAT_ISA=scalar|avx2|neon overrides it when that ISA is available.
Isa active_isa() noexcept;
const Ops& active();

std::string_view isa_name(Isa isa) noexcept;

}  // namespace wustat::simd
