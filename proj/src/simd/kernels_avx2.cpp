#include <immintrin.h>

#include "kernels.hpp"

namespace wustat::simd::detail {

namespace {

inline __m256d vabs(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

inline void neumaier(__m256d& s, __m256d& c, __m256d v) {
  const __m256d t = _mm256_add_pd(s, v);
  const __m256d big_s = _mm256_cmp_pd(vabs(s), vabs(v), _CMP_GE_OQ);
  const __m256d from_s = _mm256_add_pd(_mm256_sub_pd(s, t), v);
  const __m256d from_v = _mm256_add_pd(_mm256_sub_pd(v, t), s);
  c = _mm256_add_pd(c, _mm256_blendv_pd(from_v, from_s, big_s));
  s = t;
}

template <PairKernel K>
inline __m256d eval(__m256d x, __m256d y, __m256d param) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  if constexpr (K == PairKernel::indicator) {
    const __m256d m = _mm256_cmp_pd(vabs(_mm256_sub_pd(x, y)), param, _CMP_LT_OQ);
    return _mm256_and_pd(m, one);
  } else if constexpr (K == PairKernel::product_identity) {
    return _mm256_mul_pd(x, y);
  } else if constexpr (K == PairKernel::product_square) {
    return _mm256_mul_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y));
  } else if constexpr (K == PairKernel::wilcoxon) {
    const __m256d m = _mm256_cmp_pd(_mm256_add_pd(x, y), _mm256_setzero_pd(), _CMP_GT_OQ);
    return _mm256_and_pd(m, one);
  } else if constexpr (K == PairKernel::additive_identity) {
    return _mm256_mul_pd(_mm256_add_pd(x, y), half);
  } else {
    return _mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y)), half);
  }
}

template <PairKernel K>
double pair_sum_impl(double param, const double* x, const double* y, std::size_t count) {
  __m256d s = _mm256_setzero_pd();
  __m256d c = _mm256_setzero_pd();
  const __m256d p = _mm256_set1_pd(param);
  const std::size_t body = count - count % kLanes;
  for (std::size_t t = 0; t < body; t += kLanes) {
    neumaier(s, c, eval<K>(_mm256_loadu_pd(x + t), _mm256_loadu_pd(y + t), p));
  }
  alignas(32) double ls[kLanes];
  alignas(32) double lc[kLanes];
  _mm256_store_pd(ls, s);
  _mm256_store_pd(lc, c);
  return finish_pair_sum(K, param, x, y, body, count, ls, lc);
}

}  // namespace

double pair_sum_avx2(PairKernel kernel, double param, const double* x, const double* y,
                     std::size_t count) {
  switch (kernel) {
    case PairKernel::indicator:
      return pair_sum_impl<PairKernel::indicator>(param, x, y, count);
    case PairKernel::product_identity:
      return pair_sum_impl<PairKernel::product_identity>(param, x, y, count);
    case PairKernel::product_square:
      return pair_sum_impl<PairKernel::product_square>(param, x, y, count);
    case PairKernel::wilcoxon:
      return pair_sum_impl<PairKernel::wilcoxon>(param, x, y, count);
    case PairKernel::additive_identity:
      return pair_sum_impl<PairKernel::additive_identity>(param, x, y, count);
    case PairKernel::additive_square:
      return pair_sum_impl<PairKernel::additive_square>(param, x, y, count);
  }
  return 0.0;
}

double dot_avx2(const double* a, const double* b, std::size_t count) {
  __m256d s = _mm256_setzero_pd();
  const std::size_t body = count - count % kLanes;
  for (std::size_t t = 0; t < body; t += kLanes) {
    s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_loadu_pd(a + t), _mm256_loadu_pd(b + t)));
  }
  alignas(32) double ls[kLanes];
  _mm256_store_pd(ls, s);
  return finish_dot(a, b, body, count, ls);
}

void chaos2_avx2(const double* p1, const double* p2, const double* eps, std::size_t steps,
                 double* acc, double* v) {
  __m256d acc0 = _mm256_loadu_pd(acc);
  __m256d acc1 = _mm256_loadu_pd(acc + 4);
  __m256d v0 = _mm256_loadu_pd(v);
  __m256d v1 = _mm256_loadu_pd(v + 4);
  for (std::size_t s = 0; s < steps; ++s) {
    const __m256d e = _mm256_broadcast_sd(eps + s);
    const double* q1 = p1 - s;
    const double* q2 = p2 - s;
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(q1), e), v0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(q1 + 4), e), v1));
    v0 = _mm256_add_pd(v0, _mm256_mul_pd(_mm256_loadu_pd(q2), e));
    v1 = _mm256_add_pd(v1, _mm256_mul_pd(_mm256_loadu_pd(q2 + 4), e));
  }
  _mm256_storeu_pd(acc, acc0);
  _mm256_storeu_pd(acc + 4, acc1);
  _mm256_storeu_pd(v, v0);
  _mm256_storeu_pd(v + 4, v1);
}

}  // namespace wustat::simd::detail
