#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wustat::stats {

/// Neumaier-compensated accumulator. Adding terms in a fixed order gives a
/// result that is independent of how the caller partitioned the work.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> v) noexcept;

struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n-1)
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

Moments moments(std::span<const double> v);
double mean(std::span<const double> v);
double sample_variance(std::span<const double> v);
double correlation(std::span<const double> x, std::span<const double> y);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;      // residual-based
  double intercept_stderr = 0.0;  // residual-based
  double r_squared = 0.0;
};

/// Weighted least squares y ~ a + b x. Weights are inverse variances up to a
/// common factor; standard errors use the weighted residual variance.
LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> w);
LineFit line_fit(std::span<const double> x, std::span<const double> y);

double normal_cdf(double z) noexcept;
double normal_pdf(double z) noexcept;

/// Kolmogorov limit law tail Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}.
double kolmogorov_q(double lambda) noexcept;

/// Two-sided KS distance of a sample against a continuous CDF.
template <class Cdf>
double ks_distance(std::vector<double> sample, Cdf&& cdf);

/// Empirical p-quantile (linear interpolation) of a sorted sample.
double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace wustat::stats

#include <algorithm>
#include <cmath>

namespace wustat::stats {

template <class Cdf>
double ks_distance(std::vector<double> sample, Cdf&& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, hi - f, f - lo});
  }
  return d;
}

}  // namespace wustat::stats
