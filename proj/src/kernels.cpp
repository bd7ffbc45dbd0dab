#include "wustat/kernels.hpp"

#include <cmath>

#include "convolution.hpp"
#include "simd/kernels.hpp"
#include "wustat/errors.hpp"
#include "wustat/parallel.hpp"
#include "wustat/stats.hpp"

namespace wustat {

namespace {

bool has_continuous_law(const InnovationSpec& s) {
  return s.law != InnovationLaw::bernoulli_half;
}

double gaussian_within(double b, double diff_variance) {
  if (diff_variance <= 0.0) return 1.0;
  return 2.0 * stats::normal_cdf(b / std::sqrt(diff_variance)) - 1.0;
}

// P(|X_0 − X_h| < b) for the halving map with stationary law Uniform(0, s).
// X_h = 2^{−h} X_0 + m / 2^h · s with m uniform on {0, ..., 2^h − 1}.
double halving_indicator_mean(double b, double s, std::size_t h) {
  if (h == 0) return 1.0;
  const double bb = b / s;
  if (bb >= 1.0) return 1.0;
  if (h > 20) return 2.0 * bb - bb * bb;
  const double c = 1.0 - std::ldexp(1.0, -static_cast<int>(h));
  const std::size_t count = std::size_t{1} << h;
  stats::CompensatedSum acc;
  for (std::size_t m = 0; m < count; ++m) {
    const double t = std::ldexp(static_cast<double>(m), -static_cast<int>(h));
    const double lo = std::max(0.0, (t - bb) / c);
    const double hi = std::min(1.0, (t + bb) / c);
    if (hi > lo) acc.add(hi - lo);
  }
  return acc.value() / static_cast<double>(count);
}

std::optional<std::vector<double>> linear_means(const KernelSpec& k, const LinearProcessSpec& p,
                                                std::size_t max_lag_) {
  const auto& law = p.innovations;
  if (!std::isfinite(innovation_variance(law))) return std::nullopt;
  const std::size_t L = max_lag_ + 1;
  const auto a = coefficients(p);
  bool any_nonzero = false;
  std::size_t nonzero_count = 0;
  double single = 0.0;
  for (double v : a) {
    if (v != 0.0) {
      any_nonzero = true;
      ++nonzero_count;
      single = v;
    }
  }
  std::vector<double> out(L, 0.0);
  switch (k.kind) {
    case KernelKind::product: {
      const auto g = autocovariances(p, max_lag_);
      if (k.transform == Transform::identity) return g;
      const double k4 = innovation_fourth_cumulant(law);
      if (!std::isfinite(k4)) return std::nullopt;
      std::vector<double> a2(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) a2[i] = a[i] * a[i];
      // Σ_m a_m² a_{m+h}²
      const auto sq = detail::autocorrelate(a2, max_lag_);
      for (std::size_t h = 0; h < L; ++h) out[h] = g[0] * g[0] + 2.0 * g[h] * g[h] + k4 * sq[h];
      return out;
    }
    case KernelKind::additive: {
      const double v = k.transform == Transform::identity ? 0.0 : covariance_fn(p, 0);
      std::fill(out.begin(), out.end(), v);
      return out;
    }
    case KernelKind::wilcoxon: {
      if (!has_continuous_law(law)) return std::nullopt;
      std::fill(out.begin(), out.end(), any_nonzero ? 0.5 : 0.0);
      return out;
    }
    case KernelKind::indicator_distance: {
      if (law.law == InnovationLaw::standard_normal) {
        const auto g = autocovariances(p, max_lag_);
        for (std::size_t h = 0; h < L; ++h) out[h] = gaussian_within(k.b, 2.0 * (g[0] - g[h]));
        return out;
      }
      if (nonzero_count == 1 && law.law == InnovationLaw::uniform_symmetric) {
        // Independent Uniform(−s, s) pair at every positive lag.
        const double bb = k.b / (std::fabs(single) * law.scale);
        const double off = bb >= 2.0 ? 1.0 : bb - bb * bb / 4.0;
        out[0] = 1.0;
        for (std::size_t h = 1; h < L; ++h) out[h] = off;
        return out;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<std::vector<double>> iterated_means(const KernelSpec& k, const IteratedMapSpec& p,
                                                  std::size_t max_lag_) {
  const std::size_t L = max_lag_ + 1;
  std::vector<double> out(L, 0.0);
  const auto& law = p.innovations;
  if (p.map == MapKind::halving_bernoulli) {
    const double s = law.scale;
    switch (k.kind) {
      case KernelKind::indicator_distance:
        for (std::size_t h = 0; h < L; ++h) out[h] = halving_indicator_mean(k.b, s, h);
        return out;
      case KernelKind::product:
        if (k.transform == Transform::square) return std::nullopt;
        for (std::size_t h = 0; h < L; ++h) {
          out[h] = s * s / 4.0 + std::ldexp(s * s / 12.0, -static_cast<int>(std::min<std::size_t>(h, 2000)));
        }
        return out;
      case KernelKind::additive:
        std::fill(out.begin(), out.end(), k.transform == Transform::identity ? s / 2.0 : s * s / 3.0);
        return out;
      case KernelKind::wilcoxon:
        std::fill(out.begin(), out.end(), 1.0);
        return out;
    }
    return std::nullopt;
  }
  if (p.map != MapKind::ar1 || !is_symmetric(law)) return std::nullopt;
  const double s2 = innovation_variance(law);
  if (!std::isfinite(s2)) return std::nullopt;
  const bool gaussian = law.law == InnovationLaw::standard_normal;
  std::vector<double> g(L);
  for (std::size_t h = 0; h < L; ++h) {
    g[h] = s2 * std::pow(p.rho, static_cast<double>(h)) / (1.0 - p.rho * p.rho);
  }
  switch (k.kind) {
    case KernelKind::product:
      if (k.transform == Transform::identity) return g;
      if (!gaussian) return std::nullopt;
      for (std::size_t h = 0; h < L; ++h) out[h] = g[0] * g[0] + 2.0 * g[h] * g[h];
      return out;
    case KernelKind::additive:
      std::fill(out.begin(), out.end(), k.transform == Transform::identity ? 0.0 : g[0]);
      return out;
    case KernelKind::wilcoxon:
      if (!has_continuous_law(law)) return std::nullopt;
      std::fill(out.begin(), out.end(), 0.5);
      return out;
    case KernelKind::indicator_distance:
      if (!gaussian) return std::nullopt;
      for (std::size_t h = 0; h < L; ++h) out[h] = gaussian_within(k.b, 2.0 * (g[0] - g[h]));
      return out;
  }
  return std::nullopt;
}

}  // namespace

void validate(const KernelSpec& spec) {
  if (spec.kind == KernelKind::indicator_distance && !(spec.b > 0.0 && std::isfinite(spec.b))) {
    throw ValidationError("kernel.b must be positive");
  }
}

simd::PairKernel pair_kernel(const KernelSpec& spec) noexcept {
  switch (spec.kind) {
    case KernelKind::indicator_distance:
      return simd::PairKernel::indicator;
    case KernelKind::product:
      return spec.transform == Transform::identity ? simd::PairKernel::product_identity
                                                   : simd::PairKernel::product_square;
    case KernelKind::wilcoxon:
      return simd::PairKernel::wilcoxon;
    case KernelKind::additive:
      return spec.transform == Transform::identity ? simd::PairKernel::additive_identity
                                                   : simd::PairKernel::additive_square;
  }
  return simd::PairKernel::additive_identity;
}

double eval(const KernelSpec& spec, double x, double y) noexcept {
  return simd::detail::pair_value(pair_kernel(spec), spec.b, x, y);
}

Estimate mean_estimate(const KernelSpec& kernel, const ProcessSpec& process, std::int64_t gap,
                       std::size_t reps, std::uint64_t seed) {
  if (reps < 100) throw ArgumentError("mean_estimate: reps must be at least 100");
  validate(kernel);
  validate(process);
  const std::size_t h = static_cast<std::size_t>(gap < 0 ? -gap : gap);
  std::vector<double> v(reps);
  parallel_for(reps, [&](std::size_t r) {
    const auto path = generate(process, h + 1, derive_stream(seed, r, StreamRole::center),
                               GenerateOptions{.retain_innovations = false});
    v[r] = eval(kernel, path.values[0], path.values[h]);
  });
  const auto m = stats::moments(v);
  return {m.mean, std::sqrt(m.variance / static_cast<double>(reps))};
}

std::optional<std::vector<double>> analytic_lag_means(const KernelSpec& kernel,
                                                      const ProcessSpec& process,
                                                      std::size_t max_lag_) {
  if (const auto* lin = std::get_if<LinearProcessSpec>(&process)) {
    return linear_means(kernel, *lin, max_lag_);
  }
  return iterated_means(kernel, std::get<IteratedMapSpec>(process), max_lag_);
}

}  // namespace wustat
