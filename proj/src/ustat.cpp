#include "wustat/ustat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wustat/errors.hpp"
#include "wustat/parallel.hpp"
#include "wustat/stats.hpp"

namespace wustat {

namespace {

// Lag sums S_d = Σ_i K(x_i, x_{i+d}) for d in [0, last], then
// w_0 S_0 + 2 Σ_{d>=1} w_d S_d in fixed lag order.
double lag_weighted_sum(std::span<const double> x, const WeightSpec& weights,
                        const KernelSpec& kernel, bool include_diagonal, std::size_t last) {
  const std::size_t n = x.size();
  const auto& ops = simd::active();
  const auto pk = pair_kernel(kernel);
  const double param = pair_param(kernel);
  std::vector<double> lag(last + 1, 0.0);
  parallel_for(last + 1, [&](std::size_t d) {
    if (d == 0 && !include_diagonal) return;
    lag[d] = ops.pair_sum(pk, param, x.data(), x.data() + d, n - d);
  });
  stats::CompensatedSum total;
  if (include_diagonal) total.add(weight(weights, 0) * lag[0]);
  for (std::size_t d = 1; d <= last; ++d) {
    total.add(2.0 * weight(weights, static_cast<std::int64_t>(d)) * lag[d]);
  }
  return total.value();
}

void check_inputs(std::span<const double> x, const WeightSpec& weights, const KernelSpec& kernel) {
  if (x.empty()) throw ArgumentError("U-statistic needs n >= 1");
  validate(weights);
  validate(kernel);
}

}  // namespace

std::string_view method_name(UStatMethod m) noexcept {
  switch (m) {
    case UStatMethod::dense:
      return "dense";
    case UStatMethod::banded:
      return "banded";
    case UStatMethod::sorted_indicator:
      return "sorted_indicator";
  }
  return "?";
}

UStatResult compute_dense(std::span<const double> x, const WeightSpec& weights,
                          const KernelSpec& kernel, bool include_diagonal,
                          std::string fingerprint) {
  check_inputs(x, weights, kernel);
  UStatResult r;
  r.n = x.size();
  r.include_diagonal = include_diagonal;
  r.path_fingerprint = std::move(fingerprint);
  r.method = UStatMethod::dense;
  r.value = lag_weighted_sum(x, weights, kernel, include_diagonal, x.size() - 1);
  return r;
}

UStatResult compute_banded(std::span<const double> x, const WeightSpec& weights,
                           const KernelSpec& kernel, bool include_diagonal,
                           std::string fingerprint) {
  check_inputs(x, weights, kernel);
  const auto radius = support_radius(weights);
  if (!radius) throw UnsupportedError("compute_banded needs weights with finite support");
  UStatResult r;
  r.n = x.size();
  r.include_diagonal = include_diagonal;
  r.path_fingerprint = std::move(fingerprint);
  r.method = UStatMethod::banded;
  const std::size_t last = std::min<std::size_t>(static_cast<std::size_t>(*radius), x.size() - 1);
  r.value = lag_weighted_sum(x, weights, kernel, include_diagonal, last);
  return r;
}

UStatResult correlation_integral(std::span<const double> x, double b, std::string fingerprint) {
  if (!(b > 0.0)) throw ArgumentError("correlation_integral: b must be positive");
  if (x.empty()) throw ArgumentError("correlation_integral needs n >= 1");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  std::uint64_t pairs = 0;  // unordered pairs i < j within distance
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (j < i + 1) j = i + 1;
    while (j < n && s[j] - s[i] < b) ++j;
    pairs += j - i - 1;
  }
  UStatResult r;
  r.n = n;
  r.include_diagonal = true;
  r.path_fingerprint = std::move(fingerprint);
  r.method = UStatMethod::sorted_indicator;
  r.value = static_cast<double>(n) + 2.0 * static_cast<double>(pairs);
  return r;
}

UStatResult compute(std::span<const double> x, const WeightSpec& weights,
                    const KernelSpec& kernel, bool include_diagonal, std::string fingerprint) {
  if (weights.kind == WeightKind::constant_one && kernel.kind == KernelKind::indicator_distance) {
    validate(kernel);
    UStatResult r = correlation_integral(x, kernel.b, std::move(fingerprint));
    if (!include_diagonal) {
      r.value -= static_cast<double>(x.size());
      r.include_diagonal = false;
    }
    return r;
  }
  if (support_radius(weights)) {
    return compute_banded(x, weights, kernel, include_diagonal, std::move(fingerprint));
  }
  return compute_dense(x, weights, kernel, include_diagonal, std::move(fingerprint));
}

SignedRankResult signed_rank(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(x[a]) < std::fabs(x[b]);
  });
  SignedRankResult r;
  stats::CompensatedSum total;
  for (std::size_t k = 0; k < n; ++k) {
    const double v = x[order[k]];
    const double rank = static_cast<double>(k + 1);
    total.add(v >= 0.0 ? rank : -rank);
    if (v == 0.0) ++r.zeros;
    if (k > 0 && std::fabs(v) == std::fabs(x[order[k - 1]])) ++r.tied_pairs;
  }
  r.value = total.value();
  return r;
}

}  // namespace wustat
