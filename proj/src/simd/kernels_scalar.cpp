#include <cmath>

#include "kernels.hpp"

namespace wustat::simd::detail {

namespace {

inline void neumaier(double& s, double& c, double v) noexcept {
  const double t = s + v;
  if (std::fabs(s) >= std::fabs(v)) {
    c += (s - t) + v;
  } else {
    c += (v - t) + s;
  }
  s = t;
}

}  // namespace

double pair_value(PairKernel kernel, double param, double x, double y) noexcept {
  switch (kernel) {
    case PairKernel::indicator:
      return std::fabs(x - y) < param ? 1.0 : 0.0;
    case PairKernel::product_identity:
      return x * y;
    case PairKernel::product_square:
      return (x * x) * (y * y);
    case PairKernel::wilcoxon:
      return x + y > 0.0 ? 1.0 : 0.0;
    case PairKernel::additive_identity:
      return (x + y) * 0.5;
    case PairKernel::additive_square:
      return (x * x + y * y) * 0.5;
  }
  return 0.0;
}

double finish_pair_sum(PairKernel kernel, double param, const double* x, const double* y,
                       std::size_t start, std::size_t count, const double* lane_sum,
                       const double* lane_comp) noexcept {
  double s = 0.0;
  double c = 0.0;
  for (std::size_t l = 0; l < kLanes; ++l) neumaier(s, c, lane_sum[l]);
  for (std::size_t t = start; t < count; ++t) neumaier(s, c, pair_value(kernel, param, x[t], y[t]));
  double lane_c = 0.0;
  for (std::size_t l = 0; l < kLanes; ++l) lane_c += lane_comp[l];
  return s + (c + lane_c);
}

double finish_dot(const double* a, const double* b, std::size_t start, std::size_t count,
                  const double* lane_sum) noexcept {
  double s = (lane_sum[0] + lane_sum[1]) + (lane_sum[2] + lane_sum[3]);
  for (std::size_t t = start; t < count; ++t) s += a[t] * b[t];
  return s;
}

double pair_sum_scalar(PairKernel kernel, double param, const double* x, const double* y,
                       std::size_t count) {
  double s[kLanes] = {0.0, 0.0, 0.0, 0.0};
  double c[kLanes] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t body = count - count % kLanes;
  for (std::size_t t = 0; t < body; t += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      neumaier(s[l], c[l], pair_value(kernel, param, x[t + l], y[t + l]));
    }
  }
  return finish_pair_sum(kernel, param, x, y, body, count, s, c);
}

double dot_scalar(const double* a, const double* b, std::size_t count) {
  double s[kLanes] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t body = count - count % kLanes;
  for (std::size_t t = 0; t < body; t += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) s[l] += a[t + l] * b[t + l];
  }
  return finish_dot(a, b, body, count, s);
}

void chaos2_scalar(const double* p1, const double* p2, const double* eps, std::size_t steps,
                   double* acc, double* v) {
  for (std::size_t s = 0; s < steps; ++s) {
    const double e = eps[s];
    const double* q1 = p1 - s;
    const double* q2 = p2 - s;
    for (std::size_t l = 0; l < kChaosLanes; ++l) {
      acc[l] += (q1[l] * e) * v[l];
      v[l] += q2[l] * e;
    }
  }
}

}  // namespace wustat::simd::detail
