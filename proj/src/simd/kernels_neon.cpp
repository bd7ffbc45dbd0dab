#include "kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace wustat::simd::detail {

namespace {

// Four virtual lanes held in two float64x2 registers (lanes 0-1, 2-3).
struct Quad {
  float64x2_t lo;
  float64x2_t hi;
};

inline float64x2_t neumaier_step(float64x2_t& s, float64x2_t c, float64x2_t v) {
  const float64x2_t t = vaddq_f64(s, v);
  const uint64x2_t big_s = vcgeq_f64(vabsq_f64(s), vabsq_f64(v));
  const float64x2_t from_s = vaddq_f64(vsubq_f64(s, t), v);
  const float64x2_t from_v = vaddq_f64(vsubq_f64(v, t), s);
  s = t;
  return vaddq_f64(c, vbslq_f64(big_s, from_s, from_v));
}

template <PairKernel K>
inline float64x2_t eval(float64x2_t x, float64x2_t y, float64x2_t param) {
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t half = vdupq_n_f64(0.5);
  if constexpr (K == PairKernel::indicator) {
    const uint64x2_t m = vcltq_f64(vabsq_f64(vsubq_f64(x, y)), param);
    return vreinterpretq_f64_u64(vandq_u64(m, vreinterpretq_u64_f64(one)));
  } else if constexpr (K == PairKernel::product_identity) {
    return vmulq_f64(x, y);
  } else if constexpr (K == PairKernel::product_square) {
    return vmulq_f64(vmulq_f64(x, x), vmulq_f64(y, y));
  } else if constexpr (K == PairKernel::wilcoxon) {
    const uint64x2_t m = vcgtq_f64(vaddq_f64(x, y), vdupq_n_f64(0.0));
    return vreinterpretq_f64_u64(vandq_u64(m, vreinterpretq_u64_f64(one)));
  } else if constexpr (K == PairKernel::additive_identity) {
    return vmulq_f64(vaddq_f64(x, y), half);
  } else {
    return vmulq_f64(vaddq_f64(vmulq_f64(x, x), vmulq_f64(y, y)), half);
  }
}

template <PairKernel K>
double pair_sum_impl(double param, const double* x, const double* y, std::size_t count) {
  Quad s{vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  Quad c{vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  const float64x2_t p = vdupq_n_f64(param);
  const std::size_t body = count - count % kLanes;
  for (std::size_t t = 0; t < body; t += kLanes) {
    c.lo = neumaier_step(s.lo, c.lo, eval<K>(vld1q_f64(x + t), vld1q_f64(y + t), p));
    c.hi = neumaier_step(s.hi, c.hi, eval<K>(vld1q_f64(x + t + 2), vld1q_f64(y + t + 2), p));
  }
  double ls[kLanes];
  double lc[kLanes];
  vst1q_f64(ls, s.lo);
  vst1q_f64(ls + 2, s.hi);
  vst1q_f64(lc, c.lo);
  vst1q_f64(lc + 2, c.hi);
  return finish_pair_sum(K, param, x, y, body, count, ls, lc);
}

}  // namespace

double pair_sum_neon(PairKernel kernel, double param, const double* x, const double* y,
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

double dot_neon(const double* a, const double* b, std::size_t count) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  const std::size_t body = count - count % kLanes;
  for (std::size_t t = 0; t < body; t += kLanes) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(a + t), vld1q_f64(b + t)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(a + t + 2), vld1q_f64(b + t + 2)));
  }
  double ls[kLanes];
  vst1q_f64(ls, lo);
  vst1q_f64(ls + 2, hi);
  return finish_dot(a, b, body, count, ls);
}

void chaos2_neon(const double* p1, const double* p2, const double* eps, std::size_t steps,
                 double* acc, double* v) {
  float64x2_t a[4];
  float64x2_t w[4];
  for (int r = 0; r < 4; ++r) {
    a[r] = vld1q_f64(acc + 2 * r);
    w[r] = vld1q_f64(v + 2 * r);
  }
  for (std::size_t s = 0; s < steps; ++s) {
    const float64x2_t e = vdupq_n_f64(eps[s]);
    const double* q1 = p1 - s;
    const double* q2 = p2 - s;
    for (int r = 0; r < 4; ++r) {
      a[r] = vaddq_f64(a[r], vmulq_f64(vmulq_f64(vld1q_f64(q1 + 2 * r), e), w[r]));
      w[r] = vaddq_f64(w[r], vmulq_f64(vld1q_f64(q2 + 2 * r), e));
    }
  }
  for (int r = 0; r < 4; ++r) {
    vst1q_f64(acc + 2 * r, a[r]);
    vst1q_f64(v + 2 * r, w[r]);
  }
}

}  // namespace wustat::simd::detail

#endif
