#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wustat/clt.hpp"
#include "wustat/errors.hpp"
#include "wustat/parallel.hpp"
#include "wustat/stats.hpp"

using namespace wustat;
using namespace wustat::clt;

namespace {

LinearProcessSpec explicit_spec(std::vector<double> a) {
  LinearProcessSpec s;
  s.coefficients.kind = CoefficientRuleKind::explicit_list;
  s.coefficients.values = std::move(a);
  return s;
}

ExperimentConfig partial_sum_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.process = explicit_spec({1.0});
  c.kernel = KernelSpec{KernelKind::additive};
  c.weights = WeightSpec{.kind = WeightKind::delta, .k0 = 0};
  c.n_grid = {64, 128, 256};
  c.replicates = 400;
  c.rate.exponent = 0.5;
  c.seed = seed;
  return c;
}

std::vector<ReplicateResult> synthetic(const std::vector<std::size_t>& ns, double power, std::size_t R) {
  // A fixed zero-mean pattern with unit sample variance, scaled per n.
  std::vector<double> z(R);
  for (std::size_t r = 0; r < R; ++r) z[r] = (r % 2 == 0 ? 1.0 : -1.0);
  const double sd = std::sqrt(stats::sample_variance(z));
  std::vector<ReplicateResult> out;
  for (auto n : ns) {
    for (std::size_t r = 0; r < R; ++r) {
      ReplicateResult x;
      x.n = n;
      x.rep = r;
      x.centered = std::pow(static_cast<double>(n), power / 2) * z[r] / sd;
      out.push_back(x);
    }
  }
  return out;
}

}  // namespace

TEST(VarianceSlope, ExactPowerLaw) {
  const auto rs = synthetic({16, 32, 64, 128}, 3.0, 200);
  const auto f = variance_slope(rs);
  EXPECT_NEAR(f.slope, 3.0, 1e-12);
  EXPECT_LT(f.stderr_, 1e-10);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  ASSERT_EQ(f.n.size(), 4u);
  EXPECT_NEAR(f.variance[0], std::pow(16.0, 3), 1e-6);
}

TEST(VarianceSlope, Preconditions) {
  EXPECT_THROW(variance_slope(synthetic({16, 32}, 1.0, 200)), ArgumentError);
  EXPECT_THROW(variance_slope(synthetic({16, 32, 64}, 1.0, 99)), ArgumentError);
  auto zero = synthetic({16, 32, 64}, 1.0, 100);
  for (auto& r : zero) {
    if (r.n == 32) r.centered = 5.0;
  }
  EXPECT_THROW(variance_slope(zero), DegenerateError);
}

TEST(Normality, CalibrationOnExactNormals) {
  int passes = 0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    oracle::Gen g(1000 + static_cast<std::uint64_t>(s));
    const auto v = g.normals(10000);
    if (normality_tests(v).ks_p_value > 0.01) ++passes;
  }
  EXPECT_GE(passes, 49);
}

TEST(Normality, PowerAgainstExponential) {
  Engine e = make_engine(5);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> v(10000);
  for (auto& x : v) x = ex(e);
  const auto t = normality_tests(v);
  EXPECT_LT(t.ks_p_value, 1e-6);
  EXPECT_NEAR(t.skewness, 2.0, 0.3);
}

TEST(Normality, DegenerateAndQq) {
  const std::vector<double> c(200, 3.0);
  const auto t = normality_tests(c);
  EXPECT_TRUE(t.degenerate);
  EXPECT_EQ(t.ks_distance, 1.0);
  EXPECT_EQ(t.ks_p_value, 0.0);
  EXPECT_THROW(normality_tests(std::vector<double>(99, 1.0)), ArgumentError);

  oracle::Gen g(3);
  const auto r = normality_tests(g.normals(500));
  ASSERT_EQ(r.qq.size(), 500u);
  for (std::size_t i = 1; i < r.qq.size(); ++i) {
    EXPECT_LT(r.qq[i - 1].first, r.qq[i].first);
    EXPECT_LE(r.qq[i - 1].second, r.qq[i].second);
  }
  EXPECT_NEAR(r.qq[250].first, 0.0025, 0.01);
}

TEST(Experiment, GaussianPartialSumsAreStandardNormal) {
  const auto c = partial_sum_config(77);
  const auto res = run_experiment(c);
  ASSERT_EQ(res.results.size(), 3u * 400u);
  const auto reports = reports_by_n(res, c.n_grid);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_TRUE(res.analytic_center[k]);
    EXPECT_EQ(res.centers[k], 0.0);
    EXPECT_EQ(res.scales[k], std::sqrt(static_cast<double>(c.n_grid[k])));
    EXPECT_NEAR(reports[k].mean, 0.0, 4.0 / std::sqrt(400.0));
    EXPECT_NEAR(reports[k].variance, 1.0, 0.25);
    EXPECT_GT(reports[k].ks_p_value, 0.001);
  }
  // The raw value is the partial sum of the path.
  const auto& r0 = res.results.front();
  const auto path = generate(c.process, r0.n, r0.stream);
  EXPECT_NEAR(r0.raw, stats::compensated_sum(path.values), 1e-10);
}

TEST(Experiment, ZeroKernelGivesZeros) {
  auto c = partial_sum_config(3);
  c.process = explicit_spec({0.0});
  c.kernel = KernelSpec{KernelKind::product};
  c.replicates = 10;
  for (const auto& r : run_experiment(c).results) EXPECT_EQ(r.standardized, 0.0);
}

TEST(Experiment, DeterministicAcrossThreadCounts) {
  auto c = partial_sum_config(11);
  c.replicates = 50;
  c.centering.mode = CenteringMode::monte_carlo;
  set_max_threads(1);
  const auto a = run_experiment(c);
  set_max_threads(4);
  const auto b = run_experiment(c);
  set_max_threads(0);
  ASSERT_EQ(a.results.size(), b.results.size());
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    EXPECT_EQ(a.results[i].raw, b.results[i].raw);
    EXPECT_EQ(a.results[i].standardized, b.results[i].standardized);
  }
  EXPECT_EQ(a.centers, b.centers);
  auto d = c;
  d.seed = 12;
  EXPECT_NE(run_experiment(d).results[0].raw, a.results[0].raw);
}

TEST(Experiment, MonteCarloCenterTracksAnalytic) {
  auto c = partial_sum_config(5);
  c.process = explicit_spec({1.0, 0.5});
  c.kernel = KernelSpec{KernelKind::product};
  c.weights = WeightSpec{.kind = WeightKind::delta, .k0 = 1};
  c.replicates = 100;
  const auto an = run_experiment(c);
  c.centering.mode = CenteringMode::monte_carlo;
  const auto mc = run_experiment(c);
  for (std::size_t k = 0; k < c.n_grid.size(); ++k) {
    EXPECT_TRUE(an.analytic_center[k]);
    EXPECT_FALSE(mc.analytic_center[k]);
    EXPECT_NEAR(mc.centers[k], an.centers[k], 4 * mc.center_std_error[k]);
  }
}

TEST(Experiment, ExpectedUstatMatchesDoubleSum) {
  oracle::Gen g(9);
  std::vector<double> a{1.0, -0.4, 0.3};
  auto lin = explicit_spec(a);
  const auto m = autocovariances(lin, 30);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = g.any_weights(5);
    const std::size_t n = static_cast<std::size_t>(g.integer(1, 25));
    const bool diag = g.coin();
    long double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!diag && i == j) continue;
        const std::size_t h = i > j ? i - j : j - i;
        s += oracle::weight(w, static_cast<std::int64_t>(h)) * m[h];
      }
    }
    EXPECT_NEAR(expected_ustat(w, m, n, diag), static_cast<double>(s), 1e-12 * (1 + std::fabs(static_cast<double>(s))));
  }
}

TEST(Experiment, ScaleSources) {
  auto c = partial_sum_config(1);
  c.rate.exponent = 1.5;
  EXPECT_DOUBLE_EQ(standardization_scale(c, 64), 512.0);
  c.rate.source = RateSource::rate_case;
  c.rate.rate_case = longmem::RateCase::wilcoxon;
  c.rate.beta = 0.7;
  EXPECT_NEAR(standardization_scale(c, 1000), std::pow(1000.0, 1.8), 1e-6);
  c.rate.source = RateSource::window_normalizer;
  c.weights = WeightSpec{.kind = WeightKind::constant_one};
  EXPECT_DOUBLE_EQ(standardization_scale(c, 16), 4.0 * 16.0);
}

TEST(Experiment, Validation) {
  auto c = partial_sum_config(1);
  c.n_grid = {128, 64};
  EXPECT_THROW(run_experiment(c), ValidationError);
  c = partial_sum_config(1);
  c.replicates = 1;
  EXPECT_THROW(run_experiment(c), ValidationError);
  c = partial_sum_config(1);
  c.centering.values = {1.0};
  EXPECT_THROW(run_experiment(c), ValidationError);
}
