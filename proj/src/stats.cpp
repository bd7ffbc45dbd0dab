#include "wustat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wustat/errors.hpp"

namespace wustat::stats {

void CompensatedSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::fabs(sum_) >= std::fabs(v)) {
    comp_ += (sum_ - t) + v;
  } else {
    comp_ += (v - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> v) noexcept {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return s.value();
}

double mean(std::span<const double> v) {
  if (v.empty()) throw ArgumentError("mean of empty sample");
  return compensated_sum(v) / static_cast<double>(v.size());
}

Moments moments(std::span<const double> v) {
  Moments m;
  m.count = v.size();
  if (v.empty()) return m;
  m.mean = mean(v);
  if (v.size() < 2) return m;
  CompensatedSum s2, s3, s4;
  for (double x : v) {
    const double d = x - m.mean;
    const double d2 = d * d;
    s2.add(d2);
    s3.add(d2 * d);
    s4.add(d2 * d2);
  }
  const double n = static_cast<double>(v.size());
  m.variance = s2.value() / (n - 1.0);
  const double m2 = s2.value() / n;
  if (m2 > 0.0) {
    m.skewness = (s3.value() / n) / std::pow(m2, 1.5);
    m.excess_kurtosis = (s4.value() / n) / (m2 * m2) - 3.0;
  }
  return m;
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) throw ArgumentError("sample variance needs at least two values");
  return moments(v).variance;
}

double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("correlation: bad sizes");
  const double mx = mean(x);
  const double my = mean(y);
  CompensatedSum sxy, sxx, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy.add(dx * dy);
    sxx.add(dx * dx);
    syy.add(dy * dy);
  }
  const double den = std::sqrt(sxx.value() * syy.value());
  if (den == 0.0) throw DegenerateError("correlation of a constant sample");
  return sxy.value() / den;
}

LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> w) {
  const std::size_t n = x.size();
  if (y.size() != n || w.size() != n) throw ArgumentError("line fit: size mismatch");
  if (n < 2) throw ArgumentError("line fit needs at least two points");
  CompensatedSum sw, swx, swy;
  for (std::size_t i = 0; i < n; ++i) {
    sw.add(w[i]);
    swx.add(w[i] * x[i]);
    swy.add(w[i] * y[i]);
  }
  const double xbar = swx.value() / sw.value();
  const double ybar = swy.value() / sw.value();
  CompensatedSum sxx, sxy, syy;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - xbar;
    const double dy = y[i] - ybar;
    sxx.add(w[i] * dx * dx);
    sxy.add(w[i] * dx * dy);
    syy.add(w[i] * dy * dy);
  }
  if (sxx.value() <= 0.0) throw DegenerateError("line fit: x values are all equal");
  LineFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = ybar - fit.slope * xbar;
  CompensatedSum rss;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss.add(w[i] * r * r);
  }
  const double dof = static_cast<double>(n) - 2.0;
  const double s2 = dof > 0.0 ? rss.value() / dof : 0.0;
  fit.slope_stderr = std::sqrt(s2 / sxx.value());
  fit.intercept_stderr = std::sqrt(s2 * (1.0 / sw.value() + xbar * xbar / sxx.value()));
  fit.r_squared = syy.value() > 0.0 ? 1.0 - rss.value() / syy.value() : 1.0;
  return fit;
}

LineFit line_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> w(x.size(), 1.0);
  return weighted_line_fit(x, y, w);
}

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) noexcept {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double kolmogorov_q(double lambda) noexcept {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi theta form of 1 - Q, converges fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double m = 2.0 * k - 1.0;
      s += std::exp(-m * m * pi2 / (8.0 * lambda * lambda));
    }
    const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda * s;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * q, 0.0, 1.0);
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ArgumentError("quantile of empty sample");
  if (sorted.size() == 1) return sorted[0];
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace wustat::stats
