#pragma once

// Shared between the per-ISA translation units. Kept free of standard library
// templates so that TUs built with different target flags never emit
// conflicting inline definitions.

#include <cstddef>

#include "wustat/simd.hpp"

namespace wustat::simd::detail {

/// Scalar pair kernel, the reference every vector path reproduces.
double pair_value(PairKernel kernel, double param, double x, double y) noexcept;

/// Folds lane partials and the scalar tail [start, count) into one value.
double finish_pair_sum(PairKernel kernel, double param, const double* x, const double* y,
                       std::size_t start, std::size_t count, const double* lane_sum,
                       const double* lane_comp) noexcept;

double finish_dot(const double* a, const double* b, std::size_t start, std::size_t count,
                  const double* lane_sum) noexcept;

double pair_sum_scalar(PairKernel kernel, double param, const double* x, const double* y,
                       std::size_t count);
double dot_scalar(const double* a, const double* b, std::size_t count);
void chaos2_scalar(const double* p1, const double* p2, const double* eps, std::size_t steps,
                   double* acc, double* v);

#if defined(WUSTAT_HAVE_AVX2_TU)
double pair_sum_avx2(PairKernel kernel, double param, const double* x, const double* y,
                     std::size_t count);
double dot_avx2(const double* a, const double* b, std::size_t count);
void chaos2_avx2(const double* p1, const double* p2, const double* eps, std::size_t steps,
                 double* acc, double* v);
#endif

#if defined(WUSTAT_HAVE_NEON_TU)
double pair_sum_neon(PairKernel kernel, double param, const double* x, const double* y,
                     std::size_t count);
double dot_neon(const double* a, const double* b, std::size_t count);
void chaos2_neon(const double* p1, const double* p2, const double* eps, std::size_t steps,
                 double* acc, double* v);
#endif

}  // namespace wustat::simd::detail
