#pragma once

// Independent reference implementations used as test oracles. Everything here
// is a direct transcription of a definition: plain nested loops, long double
// accumulators, no shared code with the library beyond the process and weight structs.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "wustat/kernels.hpp"
#include "wustat/weights.hpp"

namespace oracle {

inline double kernel(const wustat::KernelSpec& k, double x, double y) {
  using wustat::KernelKind;
  using wustat::Transform;
  switch (k.kind) {
    case KernelKind::indicator_distance:
      return std::fabs(x - y) < k.b ? 1.0 : 0.0;
    case KernelKind::product:
      return k.transform == Transform::identity ? x * y : (x * x) * (y * y);
    case KernelKind::wilcoxon:
      return x + y > 0.0 ? 1.0 : 0.0;
    case KernelKind::additive:
      return k.transform == Transform::identity ? (x + y) * 0.5 : (x * x + y * y) * 0.5;
  }
  return 0.0;
}

inline double weight(const wustat::WeightSpec& w, std::int64_t k) {
  using wustat::WeightKind;
  const std::int64_t a = k < 0 ? -k : k;
  switch (w.kind) {
    case WeightKind::delta:
      return a == w.k0 ? 1.0 : 0.0;
    case WeightKind::constant_one:
      return 1.0;
    case WeightKind::power:
      return w.c * std::pow(1.0 + static_cast<double>(a), -w.beta_w);
    case WeightKind::geometric:
      return std::pow(w.q, static_cast<double>(a));
    case WeightKind::explicit_half:
      return static_cast<std::size_t>(a) < w.half.size() ? w.half[static_cast<std::size_t>(a)] : 0.0;
  }
  return 0.0;
}

inline long double ustat(const std::vector<double>& x, const wustat::WeightSpec& w,
                         const wustat::KernelSpec& k, bool diag) {
  long double s = 0.0L;
  const auto n = static_cast<std::int64_t>(x.size());
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      if (!diag && i == j) continue;
      s += static_cast<long double>(oracle::weight(w, i - j)) *
           kernel(k, x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)]);
    }
  }
  return s;
}

// X_t = Σ_m a_m ε_{t−m}, t = 1..n, with eps[q] = ε_{q+1−M}.
inline std::vector<double> linear(const std::vector<double>& a, const std::vector<double>& eps,
                                  std::size_t n) {
  const std::size_t M = a.size() - 1;
  std::vector<double> x(n);
  for (std::size_t t = 1; t <= n; ++t) {
    long double s = 0.0L;
    for (std::size_t m = 0; m <= M; ++m) s += static_cast<long double>(a[m]) * eps[t + M - 1 - m];
    x[t - 1] = static_cast<double>(s);
  }
  return x;
}

inline double autocov(const std::vector<double>& a, double var, std::size_t h) {
  long double s = 0.0L;
  for (std::size_t i = 0; i + h < a.size(); ++i) s += static_cast<long double>(a[i]) * a[i + h];
  return static_cast<double>(s * var);
}

// 8 E Σ_{i=1}^{n−k} Σ_{j1>j2} a_{i−j1} a_{i+k−j2} ε_{j1} ε_{j2}, literally.
inline long double zterm(const std::vector<double>& eps, const std::vector<double>& a, double ex2,
                         std::int64_t n, std::int64_t k) {
  const auto M = static_cast<std::int64_t>(a.size()) - 1;
  auto coef = [&](std::int64_t m) { return m >= 0 && m <= M ? a[static_cast<std::size_t>(m)] : 0.0; };
  auto e = [&](std::int64_t j) { return eps[static_cast<std::size_t>(j + M - 1)]; };
  long double s = 0.0L;
  for (std::int64_t i = 1; i <= n - k; ++i) {
    for (std::int64_t j1 = 1 - M; j1 <= n; ++j1) {
      for (std::int64_t j2 = 1 - M; j2 < j1; ++j2) {
        s += static_cast<long double>(coef(i - j1)) * coef(i + k - j2) * e(j1) * e(j2);
      }
    }
  }
  return 8.0L * ex2 * s;
}

// Hand-rolled generators for property tests.
struct Gen {
  std::mt19937_64 eng;
  explicit Gen(std::uint64_t seed) : eng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  double normal() { return std::normal_distribution<double>()(eng); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(eng);
  }
  bool coin() { return integer(0, 1) == 1; }

  std::vector<double> normals(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = normal();
    return v;
  }
  // Values on a coarse grid so ties and exact boundary hits occur.
  std::vector<double> gridded(std::size_t n, double step, int span) {
    std::vector<double> v(n);
    for (auto& x : v) x = step * static_cast<double>(integer(-span, span));
    return v;
  }

  wustat::KernelSpec kernel() {
    wustat::KernelSpec k;
    k.kind = static_cast<wustat::KernelKind>(integer(0, 3));
    k.transform = coin() ? wustat::Transform::identity : wustat::Transform::square;
    k.b = uniform(0.01, 1.5);
    return k;
  }

  wustat::WeightSpec finite_weights(std::int64_t max_radius) {
    wustat::WeightSpec w;
    if (coin()) {
      w.kind = wustat::WeightKind::delta;
      w.k0 = integer(0, max_radius);
    } else {
      w.kind = wustat::WeightKind::explicit_half;
      w.half.resize(static_cast<std::size_t>(integer(1, max_radius + 1)));
      for (auto& v : w.half) v = uniform(-2.0, 2.0);
    }
    return w;
  }

  wustat::WeightSpec any_weights(std::int64_t max_radius) {
    switch (integer(0, 3)) {
      case 0:
        return finite_weights(max_radius);
      case 1:
        return wustat::WeightSpec{.kind = wustat::WeightKind::constant_one};
      case 2: {
        wustat::WeightSpec w;
        w.kind = wustat::WeightKind::power;
        w.beta_w = uniform(0.0, 0.99);
        w.c = uniform(0.1, 3.0);
        return w;
      }
      default: {
        wustat::WeightSpec w;
        w.kind = wustat::WeightKind::geometric;
        w.q = uniform(0.05, 0.95);
        return w;
      }
    }
  }
};

}  // namespace oracle
