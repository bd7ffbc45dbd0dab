#include "wustat/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "wustat/errors.hpp"
#include "wustat/spec_io.hpp"
#include "wustat/stats.hpp"

namespace wustat {

namespace {

// Double-double value hi + lo.
struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DD dd_add(DD x, double v) {
  DD s = two_sum(x.hi, v);
  s.lo += x.lo;
  return two_sum(s.hi, s.lo);
}

inline DD dd_add(DD x, DD y) {
  DD s = two_sum(x.hi, y.hi);
  s.lo += x.lo + y.lo;
  return two_sum(s.hi, s.lo);
}

// prefix[m] = Σ_{d=0}^{m} w_d in double-double.
std::vector<DD> prefix_sums(const WeightSpec& spec, std::int64_t upto) {
  std::vector<DD> p(static_cast<std::size_t>(upto) + 1);
  DD acc;
  for (std::int64_t d = 0; d <= upto; ++d) {
    acc = dd_add(acc, weight(spec, d));
    p[static_cast<std::size_t>(d)] = acc;
  }
  return p;
}

// W_n(i) = P(i−1) + P(n−i) − w_0 for 1 <= i <= n.
double window_from_prefix(const std::vector<DD>& p, double w0, std::int64_t i, std::int64_t n) {
  DD s = dd_add(p[static_cast<std::size_t>(i - 1)], p[static_cast<std::size_t>(n - i)]);
  s = dd_add(s, -w0);
  return s.hi + s.lo;
}

double upper_half_slope(const std::vector<std::int64_t>& n, const std::vector<double>& y) {
  const std::size_t start = n.size() / 2;
  std::vector<double> lx, ly;
  for (std::size_t k = start; k < n.size(); ++k) {
    if (y[k] > 0.0) {
      lx.push_back(std::log(static_cast<double>(n[k])));
      ly.push_back(std::log(y[k]));
    }
  }
  if (lx.size() < 2) return 0.0;
  return stats::line_fit(lx, ly).slope;
}

}  // namespace

void validate(const WeightSpec& spec) {
  switch (spec.kind) {
    case WeightKind::delta:
      if (spec.k0 < 0) throw ValidationError("weights.k0 must be non-negative");
      break;
    case WeightKind::constant_one:
      break;
    case WeightKind::power:
      if (!(spec.beta_w >= 0.0 && spec.beta_w < 1.0)) {
        throw ValidationError("weights.beta_w must lie in [0, 1)");
      }
      if (!(spec.c > 0.0)) throw ValidationError("weights.c must be positive");
      break;
    case WeightKind::geometric:
      if (!(spec.q > 0.0 && spec.q < 1.0)) throw ValidationError("weights.q must lie in (0, 1)");
      break;
    case WeightKind::explicit_half:
      if (spec.half.empty()) throw ValidationError("weights.values must not be empty");
      for (double v : spec.half) {
        if (!std::isfinite(v)) throw ValidationError("weights.values must be finite");
      }
      break;
  }
}

double weight(const WeightSpec& spec, std::int64_t k) {
  const std::int64_t a = k < 0 ? -k : k;
  switch (spec.kind) {
    case WeightKind::delta:
      return a == spec.k0 ? 1.0 : 0.0;
    case WeightKind::constant_one:
      return 1.0;
    case WeightKind::power:
      return spec.c * std::pow(1.0 + static_cast<double>(a), -spec.beta_w);
    case WeightKind::geometric:
      return std::pow(spec.q, static_cast<double>(a));
    case WeightKind::explicit_half:
      return static_cast<std::size_t>(a) < spec.half.size() ? spec.half[static_cast<std::size_t>(a)]
                                                            : 0.0;
  }
  return 0.0;
}

std::optional<std::int64_t> support_radius(const WeightSpec& spec) {
  switch (spec.kind) {
    case WeightKind::delta:
      return spec.k0;
    case WeightKind::explicit_half:
      return static_cast<std::int64_t>(spec.half.size()) - 1;
    default:
      return std::nullopt;
  }
}

std::vector<double> weight_table(const WeightSpec& spec, std::size_t count) {
  std::vector<double> w(count);
  for (std::size_t k = 0; k < count; ++k) w[k] = weight(spec, static_cast<std::int64_t>(k));
  return w;
}

double window_sum(const WeightSpec& spec, std::int64_t i, std::int64_t n) {
  if (n < 1 || i < 1 || i > n) throw ArgumentError("window_sum: need 1 <= i <= n");
  const auto p = prefix_sums(spec, std::max(i - 1, n - i));
  return window_from_prefix(p, weight(spec, 0), i, n);
}

std::vector<double> window_sums(const WeightSpec& spec, std::int64_t n) {
  if (n < 1) throw ArgumentError("window_sums: n must be at least 1");
  const auto p = prefix_sums(spec, n - 1);
  const double w0 = weight(spec, 0);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::int64_t i = 1; i <= n; ++i) {
    out[static_cast<std::size_t>(i - 1)] = window_from_prefix(p, w0, i, n);
  }
  return out;
}

double normalizer(const WeightSpec& spec, std::int64_t n) {
  const auto w = window_sums(spec, n);
  stats::CompensatedSum s;
  for (double v : w) s.add(v * v);
  return std::sqrt(s.value() / static_cast<double>(n));
}

WeightDiagnostics diagnose(const WeightSpec& spec, std::int64_t n_max) {
  if (n_max < 16) throw ArgumentError("diagnose: n_max must be at least 16");
  validate(spec);
  WeightDiagnostics d;
  for (std::int64_t n = 16; n <= n_max; n *= 2) d.n_grid.push_back(n);
  if (d.n_grid.back() != n_max) d.n_grid.push_back(n_max);

  const auto w = weight_table(spec, static_cast<std::size_t>(n_max) + 1);
  for (std::int64_t n : d.n_grid) {
    stats::CompensatedSum abs_one_side, t3;
    for (std::int64_t k = 1; k <= n; ++k) abs_one_side.add(std::fabs(w[static_cast<std::size_t>(k)]));
    for (std::int64_t k = 0; k <= n; ++k) {
      const double wk = w[static_cast<std::size_t>(k)];
      t3.add(static_cast<double>(n - k) * wk * wk);
    }
    const double a0 = std::fabs(w[0]);
    const double wn = normalizer(spec, n);
    d.abs_partial_sums.push_back(a0 + 2.0 * abs_one_side.value());
    d.wn_curve.push_back(wn);
    const double den = static_cast<double>(n) * wn * wn;
    d.ratio_t3.push_back(den > 0.0 ? t3.value() / den : std::numeric_limits<double>::infinity());
    const double one_side = a0 + abs_one_side.value();
    d.liminf_proxy.push_back(one_side > 0.0 ? wn / one_side : 0.0);
  }

  const std::size_t last = d.n_grid.size() - 1;
  const std::size_t mid = d.n_grid.size() / 2;
  const double abs_last = d.abs_partial_sums[last];
  d.abs_sum_growth = abs_last > 0.0 ? (abs_last - d.abs_partial_sums[mid]) / abs_last : 0.0;
  d.summable = d.abs_sum_growth < 0.01;
  d.ratio_slope = upper_half_slope(d.n_grid, d.ratio_t3);
  d.ratio_to_zero = d.ratio_t3[last] == 0.0 || d.ratio_slope <= -0.2;
  d.liminf_min = *std::min_element(d.liminf_proxy.begin() + static_cast<std::ptrdiff_t>(mid),
                                   d.liminf_proxy.end());
  d.liminf_positive = d.liminf_min > 0.0 && upper_half_slope(d.n_grid, d.liminf_proxy) > -0.2;
  return d;
}

void write_csv(std::ostream& os, const WeightDiagnostics& d) {
  os << "n,abs_sum,W_n,ratio_T3,liminf_proxy\n";
  for (std::size_t k = 0; k < d.n_grid.size(); ++k) {
    os << d.n_grid[k] << ',' << io::format_double(d.abs_partial_sums[k]) << ','
       << io::format_double(d.wn_curve[k]) << ',' << io::format_double(d.ratio_t3[k]) << ','
       << io::format_double(d.liminf_proxy[k]) << '\n';
  }
}

}  // namespace wustat
