#include "wustat/clt.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/normal.hpp>

#include "wustat/errors.hpp"
#include "wustat/parallel.hpp"
#include "wustat/stats.hpp"
#include "wustat/ustat.hpp"

namespace wustat::clt {

void validate(const ExperimentConfig& c) {
  validate(c.process);
  validate(c.kernel);
  validate(c.weights);
  if (c.n_grid.empty()) throw ValidationError("experiment: n_grid must not be empty");
  for (std::size_t k = 0; k < c.n_grid.size(); ++k) {
    if (c.n_grid[k] < 2) throw ValidationError("experiment: n_grid entries must be at least 2");
    if (k > 0 && c.n_grid[k] <= c.n_grid[k - 1]) {
      throw ValidationError("experiment: n_grid must be increasing");
    }
  }
  if (c.replicates < 2) throw ValidationError("experiment: replicates must be at least 2");
  if (!c.centering.values.empty() && c.centering.values.size() != c.n_grid.size()) {
    throw ValidationError("experiment: centering values must match n_grid");
  }
  if (c.rate.source == RateSource::rate_case) {
    (void)longmem::rate_exponent(c.rate.rate_case, c.rate.beta);
  }
}

double standardization_scale(const ExperimentConfig& config, std::size_t n) {
  const double nn = static_cast<double>(n);
  switch (config.rate.source) {
    case RateSource::exponent:
      return std::pow(nn, config.rate.exponent);
    case RateSource::rate_case:
      return std::pow(nn, longmem::rate_exponent(config.rate.rate_case, config.rate.beta));
    case RateSource::window_normalizer: {
      const double wn = normalizer(config.weights, static_cast<std::int64_t>(n));
      return std::sqrt(nn) * wn;
    }
  }
  return 1.0;
}

double expected_ustat(const WeightSpec& w, std::span<const double> lag_means, std::size_t n,
                      bool include_diagonal) {
  stats::CompensatedSum s;
  if (include_diagonal && !lag_means.empty()) {
    s.add(weight(w, 0) * static_cast<double>(n) * lag_means[0]);
  }
  const std::size_t top = std::min(n, lag_means.size());
  for (std::size_t d = 1; d < top; ++d) {
    const double wd = weight(w, static_cast<std::int64_t>(d));
    if (wd != 0.0) s.add(2.0 * wd * static_cast<double>(n - d) * lag_means[d]);
  }
  return s.value();
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  const std::size_t R = config.replicates;
  const std::size_t K = config.n_grid.size();
  ExperimentResult out;
  out.results.resize(R * K);
  out.centers.resize(K);
  out.center_std_error.assign(K, 0.0);
  out.scales.resize(K);
  out.analytic_center.assign(K, false);

  const auto radius = support_radius(config.weights);
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t n = config.n_grid[k];
    out.scales[k] = standardization_scale(config, n);

    std::vector<double> raw(R);
    parallel_for(R, [&](std::size_t r) {
      const std::uint64_t stream = derive_stream(config.seed, k * R + r, StreamRole::path);
      const auto path = generate(config.process, n, stream, GenerateOptions{.retain_innovations = false});
      raw[r] = compute(path, config.weights, config.kernel, config.include_diagonal).value;
      out.results[k * R + r].stream = stream;
    });

    bool analytic = false;
    double center = 0.0;
    if (!config.centering.values.empty()) {
      center = config.centering.values[k];
      analytic = true;
    } else if (config.centering.mode == CenteringMode::analytic) {
      std::size_t lags = n - 1;
      if (radius) lags = std::min<std::size_t>(lags, static_cast<std::size_t>(*radius));
      if (auto m = analytic_lag_means(config.kernel, config.process, lags)) {
        center = expected_ustat(config.weights, *m, n, config.include_diagonal);
        analytic = true;
      }
    }
    if (!analytic) {
      const std::size_t creps =
          config.centering.center_reps > 0 ? config.centering.center_reps : 10 * R;
      std::vector<double> cv(creps);
      parallel_for(creps, [&](std::size_t r) {
        const auto path = generate(config.process, n,
                                   derive_stream(config.seed, k * creps + r, StreamRole::center),
                                   GenerateOptions{.retain_innovations = false});
        cv[r] = compute(path, config.weights, config.kernel, config.include_diagonal).value;
      });
      const auto cm = stats::moments(cv);
      center = cm.mean;
      out.center_std_error[k] = std::sqrt(cm.variance / static_cast<double>(creps));
      const double spread = std::sqrt(stats::sample_variance(raw));
      if (spread > 0.0 && out.center_std_error[k] / spread > 0.1) out.centering_warning = true;
    }
    out.centers[k] = center;
    out.analytic_center[k] = analytic;

    for (std::size_t r = 0; r < R; ++r) {
      auto& res = out.results[k * R + r];
      res.n = n;
      res.rep = r;
      res.raw = raw[r];
      res.centered = raw[r] - center;
      res.standardized = res.centered / out.scales[k];
    }
  }
  return out;
}

SlopeFit variance_slope(std::span<const ReplicateResult> results) {
  std::map<std::size_t, std::vector<double>> by_n;
  for (const auto& r : results) by_n[r.n].push_back(r.centered);
  if (by_n.size() < 3) throw ArgumentError("variance_slope: need at least 3 distinct n");
  SlopeFit fit;
  std::vector<double> lx, ly, w;
  for (const auto& [n, v] : by_n) {
    if (v.size() < 100) throw ArgumentError("variance_slope: need at least 100 replicates per n");
    const double var = stats::sample_variance(v);
    if (!(var > 0.0)) throw DegenerateError("variance_slope: zero sample variance at some n");
    fit.n.push_back(n);
    fit.variance.push_back(var);
    fit.count.push_back(v.size());
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(var));
    w.push_back((static_cast<double>(v.size()) - 1.0) / 2.0);
  }
  const auto lf = stats::weighted_line_fit(lx, ly, w);
  fit.slope = lf.slope;
  fit.stderr_ = lf.slope_stderr;
  fit.r_squared = lf.r_squared;
  return fit;
}

TestReport normality_tests(std::span<const double> values) {
  if (values.size() < 100) throw ArgumentError("normality_tests: need at least 100 values");
  TestReport t;
  const auto m = stats::moments(values);
  t.count = values.size();
  t.mean = m.mean;
  t.variance = m.variance;
  t.skewness = m.skewness;
  t.excess_kurtosis = m.excess_kurtosis;
  if (!(m.variance > 0.0)) {
    t.degenerate = true;
    t.ks_distance = 1.0;
    t.ks_p_value = 0.0;
    return t;
  }
  const double sd = std::sqrt(m.variance);
  std::vector<double> v(values.begin(), values.end());
  t.ks_distance = stats::ks_distance(v, [&](double x) { return stats::normal_cdf((x - m.mean) / sd); });
  const double n = static_cast<double>(values.size());
  t.ks_p_value = std::clamp(stats::kolmogorov_q(std::sqrt(n) * t.ks_distance), 0.0, 1.0);

  std::sort(v.begin(), v.end());
  const boost::math::normal_distribution<double> z;
  t.qq.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double p = (static_cast<double>(i) + 0.5) / n;
    t.qq.emplace_back(boost::math::quantile(z, p), (v[i] - m.mean) / sd);
  }
  return t;
}

std::vector<TestReport> reports_by_n(const ExperimentResult& r,
                                     std::span<const std::size_t> n_grid) {
  std::vector<TestReport> out;
  for (std::size_t n : n_grid) {
    std::vector<double> z;
    for (const auto& x : r.results) {
      if (x.n == n) z.push_back(x.standardized);
    }
    out.push_back(normality_tests(z));
  }
  return out;
}

}  // namespace wustat::clt
