#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wustat/errors.hpp"
#include "wustat/kernels.hpp"
#include "wustat/process.hpp"
#include "wustat/stats.hpp"
#include "wustat/weights.hpp"

using namespace wustat;

namespace {

LinearProcessSpec explicit_spec(std::vector<double> a, InnovationLaw law = InnovationLaw::standard_normal) {
  LinearProcessSpec s;
  s.coefficients.kind = CoefficientRuleKind::explicit_list;
  s.coefficients.values = std::move(a);
  s.innovations.law = law;
  return s;
}

LinearProcessSpec geometric_spec(double rho, std::size_t M) {
  LinearProcessSpec s;
  s.coefficients.kind = CoefficientRuleKind::geometric;
  s.coefficients.rho = rho;
  s.truncation = M;
  return s;
}

LinearProcessSpec regvar_spec(double beta, std::size_t M) {
  LinearProcessSpec s;
  s.coefficients.kind = CoefficientRuleKind::regvar;
  s.coefficients.beta = beta;
  s.truncation = M;
  return s;
}

IteratedMapSpec map_spec(MapKind k) {
  IteratedMapSpec s;
  s.map = k;
  if (k == MapKind::halving_bernoulli) s.innovations.law = InnovationLaw::bernoulli_half;
  return s;
}

double lag_corr(const std::vector<double>& x, std::size_t h) {
  std::vector<double> a(x.begin(), x.end() - static_cast<std::ptrdiff_t>(h));
  std::vector<double> b(x.begin() + static_cast<std::ptrdiff_t>(h), x.end());
  return stats::correlation(a, b);
}

}  // namespace

// ---------------------------------------------------------------------------
// Linear processes

TEST(Linear, IdentityCoefficientsReturnInnovations) {
  for (auto law : {InnovationLaw::standard_normal, InnovationLaw::uniform_symmetric}) {
    const auto spec = explicit_spec({1.0}, law);
    const auto p = generate_linear(spec, 50, 4);
    ASSERT_TRUE(p.innovations);
    ASSERT_EQ(p.first_innovation_index, 1);
    EXPECT_EQ(p.values, *p.innovations);
  }
}

TEST(Linear, ValuesMatchConvolutionOracle) {
  oracle::Gen g(21);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> a(static_cast<std::size_t>(g.integer(1, 12)));
    for (auto& v : a) v = g.uniform(-1.5, 1.5);
    const auto spec = explicit_spec(a);
    const std::size_t n = static_cast<std::size_t>(g.integer(1, 40));
    const auto eps = g.normals(n + a.size() - 1);
    const auto got = linear_values(spec, eps, n);
    const auto want = oracle::linear(a, eps, n);
    ASSERT_EQ(got.size(), n);
    for (std::size_t t = 0; t < n; ++t) EXPECT_NEAR(got[t], want[t], 1e-13 * (1 + std::fabs(want[t])));
  }
}

TEST(Linear, RetainedInnovationsReproducePath) {
  const ProcessSpec spec = regvar_spec(0.7, 512);
  const auto p = generate(spec, 300, 77);
  ASSERT_TRUE(p.innovations);
  EXPECT_EQ(p.first_innovation_index, 1 - 512);
  EXPECT_EQ(p.innovations->size(), 300u + 512u);
  EXPECT_EQ(reconstruct(spec, p), p.values);
  const auto a = coefficients(std::get<LinearProcessSpec>(spec));
  const auto want = oracle::linear(a, *p.innovations, 300);
  for (std::size_t t = 0; t < 300; ++t) EXPECT_NEAR(p.values[t], want[t], 1e-11);
}

TEST(Linear, SameSeedSamePath) {
  const ProcessSpec spec = geometric_spec(0.5, 64);
  EXPECT_EQ(generate(spec, 100, 5).values, generate(spec, 100, 5).values);
  EXPECT_NE(generate(spec, 100, 5).values, generate(spec, 100, 6).values);
}

TEST(Linear, GeometricLagOneCorrelation) {
  const auto spec = geometric_spec(0.5, 64);
  const auto p = generate_linear(spec, 100000, 9, {.retain_innovations = false});
  // se of a lag-1 sample correlation of AR(1): sqrt((1 − ρ²)/n).
  EXPECT_NEAR(lag_corr(p.values, 1), 0.5, 3.0 * std::sqrt(0.75 / 1e5));
}

TEST(Linear, CovarianceMatchesOracle) {
  oracle::Gen g(2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(static_cast<std::size_t>(g.integer(1, 20)));
    for (auto& v : a) v = g.uniform(-1, 1);
    auto spec = explicit_spec(a, InnovationLaw::uniform_symmetric);
    spec.innovations.scale = 2.0;
    const double var = 4.0 / 3.0;
    const auto all = autocovariances(spec, 25);
    for (std::size_t h = 0; h <= 25; ++h) {
      EXPECT_NEAR(covariance_fn(spec, h), oracle::autocov(a, var, h), 1e-13);
      EXPECT_NEAR(all[h], oracle::autocov(a, var, h), 1e-13);
    }
  }
}

TEST(Linear, CovarianceClosedForms) {
  EXPECT_DOUBLE_EQ(covariance_fn(explicit_spec({1.0}), 0), 1.0);
  const auto geo = geometric_spec(0.5, 200);
  for (std::size_t k : {0u, 1u, 5u}) EXPECT_NEAR(covariance_fn(geo, k), std::pow(0.5, k) / 0.75, 1e-12);
  const auto rv = regvar_spec(0.7, 1u << 16);
  // Γ(k) ~ k^{1−2β}; the ratio converges slowly, so allow a few percent.
  EXPECT_NEAR(covariance_fn(rv, 64) / covariance_fn(rv, 32), std::pow(2.0, -0.4), 0.03);
}

TEST(Linear, RegvarCovarianceDecayExponent) {
  const auto rv = regvar_spec(0.7, 1u << 16);
  const auto g = autocovariances(rv, 512);
  std::vector<double> lx, ly;
  for (std::size_t h = 32; h <= 512; h *= 2) {
    lx.push_back(std::log(static_cast<double>(h)));
    ly.push_back(std::log(g[h]));
  }
  EXPECT_NEAR(stats::line_fit(lx, ly).slope, -0.4, 0.05);
}

TEST(Linear, TruncationKeepsLayout) {
  const auto spec = geometric_spec(0.6, 32);
  EXPECT_EQ(coefficients(truncate_linear(spec, 33)), coefficients(spec));
  const auto t1 = truncate_linear(spec, 1);
  const auto a = coefficients(t1);
  ASSERT_EQ(a.size(), 33u);
  EXPECT_EQ(a[0], 1.0);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_EQ(a[i], 0.0);
  // Same innovations drive both; with ℓ = 1 the truncated path is a_0 ε_n.
  const auto p = generate_linear(spec, 20, 3);
  const auto xt = linear_values(t1, *p.innovations, 20);
  for (std::size_t t = 0; t < 20; ++t) EXPECT_EQ(xt[t], (*p.innovations)[t + 32]);
}

TEST(Linear, TruncationErrorMatchesTailSum) {
  const auto spec = geometric_spec(0.7, 64);
  const std::size_t ell = 3;
  const auto tr = truncate_linear(spec, ell);
  std::vector<double> d(20000);
  for (std::size_t r = 0; r < d.size(); ++r) {
    const auto p = generate_linear(spec, 1, derive_stream(13, r, StreamRole::path));
    d[r] = p.values[0] - linear_values(tr, *p.innovations, 1)[0];
    d[r] *= d[r];
  }
  double tail = 0;
  const auto a = coefficients(spec);
  for (std::size_t i = ell; i < a.size(); ++i) tail += a[i] * a[i];
  const auto m = stats::moments(d);
  EXPECT_NEAR(m.mean, tail, 3.0 * std::sqrt(m.variance / 20000.0));
}

TEST(Linear, ValidationErrors) {
  auto bad = regvar_spec(1.2, 64);
  EXPECT_THROW(validate(bad), ValidationError);
  bad = regvar_spec(0.5, 64);
  EXPECT_THROW(validate(bad), ValidationError);
  EXPECT_THROW(validate(geometric_spec(1.0, 8)), ValidationError);
  EXPECT_THROW(validate(explicit_spec({})), ValidationError);
  EXPECT_THROW(validate(explicit_spec({1.0}, InnovationLaw::bernoulli_half)), ValidationError);
  auto t = explicit_spec({1.0}, InnovationLaw::student_t);
  t.innovations.df = 2.0;
  EXPECT_THROW(validate(t), ValidationError);
  t.innovations.df = 5.0;
  EXPECT_NO_THROW(validate(t));
  EXPECT_THROW(generate_coupled(ProcessSpec{geometric_spec(0.5, 8)}, 4, CouplingMode::fixed_prehistory, 1),
               UnsupportedError);
}

TEST(Innovations, Moments) {
  EXPECT_DOUBLE_EQ(innovation_variance({InnovationLaw::uniform_symmetric, 3.0}), 3.0);
  EXPECT_DOUBLE_EQ(innovation_mean({InnovationLaw::bernoulli_half, 1.0}), 0.5);
  EXPECT_DOUBLE_EQ(innovation_variance({InnovationLaw::bernoulli_half, 1.0}), 0.25);
  EXPECT_DOUBLE_EQ(innovation_fourth_cumulant({InnovationLaw::standard_normal, 2.0}), 0.0);
  EXPECT_TRUE(std::isinf(innovation_variance({InnovationLaw::student_t, 1.0, 2.0})));
  // Student t(5): var 5/3, E ε⁴ = 3·25/(1·3) = 25, cumulant 25 − 3·25/9.
  EXPECT_NEAR(innovation_fourth_cumulant({InnovationLaw::student_t, 1.0, 5.0}), 25.0 - 25.0 / 3.0, 1e-12);

  for (auto law : {InnovationLaw::standard_normal, InnovationLaw::uniform_symmetric,
                   InnovationLaw::bernoulli_half}) {
    InnovationSpec s{law, 1.5};
    InnovationSampler draw(s);
    Engine e = make_engine(31);
    std::vector<double> v(200000);
    draw.fill(e, v);
    const auto m = stats::moments(v);
    EXPECT_NEAR(m.mean, innovation_mean(s), 4.0 * std::sqrt(innovation_variance(s) / 2e5));
    EXPECT_NEAR(m.variance, innovation_variance(s), 0.02 * innovation_variance(s));
  }
}

// ---------------------------------------------------------------------------
// Iterated maps

TEST(Iterated, HalvingMarginalIsUniform) {
  // 64 steps shift the old state below the last bit of a double, so every
  // 64th value forms an independent sample.
  const std::size_t m = 20000;
  const auto p = generate_iterated(map_spec(MapKind::halving_bernoulli), 64 * m, 8, {.retain_innovations = false});
  std::vector<double> thin(m);
  for (std::size_t i = 0; i < m; ++i) thin[i] = p.values[64 * i];
  const double d = stats::ks_distance(thin, [](double x) { return std::clamp(x, 0.0, 1.0); });
  EXPECT_GT(stats::kolmogorov_q(std::sqrt(static_cast<double>(m)) * d), 0.01);
}

TEST(Iterated, StationaryMoments) {
  const auto ar = generate_iterated(map_spec(MapKind::ar1), 200000, 3, {.retain_innovations = false});
  EXPECT_NEAR(stats::sample_variance(ar.values), 4.0 / 3.0, 0.03);
  auto arch = map_spec(MapKind::arch1);
  const auto p = generate_iterated(arch, 200000, 4, {.retain_innovations = false});
  double m2 = 0;
  for (double x : p.values) m2 += x * x;
  EXPECT_NEAR(m2 / 2e5, 10.0 / 7.0, 0.04);
}

TEST(Iterated, RetainedInnovationsReproducePath) {
  for (auto k : {MapKind::ar1, MapKind::halving_bernoulli, MapKind::tar1, MapKind::arch1}) {
    auto s = map_spec(k);
    s.burn_in = 50;
    const ProcessSpec spec = s;
    const auto p = generate(spec, 100, 17);
    ASSERT_TRUE(p.innovations);
    EXPECT_EQ(p.first_innovation_index, -49);
    EXPECT_EQ(reconstruct(spec, p), p.values);
  }
}

TEST(Iterated, ContractionOfCoupledPaths) {
  for (auto k : {MapKind::ar1, MapKind::halving_bernoulli}) {
    auto s = map_spec(k);
    s.burn_in = 30;
    EXPECT_EQ(exact_contraction(s).value_or(-1), 0.5);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto c = generate_coupled(s, 30, CouplingMode::iid_prehistory, seed);
      const double d0 = c.primary.initial_state - c.shadow.initial_state;
      for (std::size_t t = 0; t < 30; ++t) {
        const double want = std::ldexp(d0, -static_cast<int>(t + 1));
        EXPECT_NEAR(c.primary.values[t] - c.shadow.values[t], want, 1e-15 * (1 + std::fabs(d0)));
      }
    }
  }
  EXPECT_FALSE(exact_contraction(map_spec(MapKind::arch1)));
}

TEST(Iterated, FixedPrehistoryStartsFromZ0) {
  auto s = map_spec(MapKind::ar1);
  const auto c = generate_coupled(s, 10, CouplingMode::fixed_prehistory, 5, 3.0);
  EXPECT_EQ(c.shadow.initial_state, 3.0);
  ASSERT_TRUE(c.primary.innovations && c.shadow.innovations);
  // Shared future innovations.
  const auto& a = *c.primary.innovations;
  const auto& b = *c.shadow.innovations;
  for (std::size_t t = 0; t < 10; ++t) EXPECT_EQ(a[a.size() - 10 + t], b[b.size() - 10 + t]);
}

TEST(Iterated, ValidationErrors) {
  auto s = map_spec(MapKind::halving_bernoulli);
  s.innovations.law = InnovationLaw::standard_normal;
  EXPECT_THROW(validate(s), ValidationError);
  s = map_spec(MapKind::arch1);
  s.a1 = 1.0;
  EXPECT_THROW(validate(s), ValidationError);
  s = map_spec(MapKind::ar1);
  s.rho = -1.0;
  EXPECT_THROW(validate(s), ValidationError);
}

// ---------------------------------------------------------------------------
// Weights

TEST(Weights, PointValues) {
  WeightSpec d3{.kind = WeightKind::delta, .k0 = 3};
  EXPECT_EQ(weight(d3, 3), 1.0);
  EXPECT_EQ(weight(d3, -3), 1.0);
  EXPECT_EQ(weight(d3, 2), 0.0);
  WeightSpec p{.kind = WeightKind::power, .beta_w = 0.5, .c = 1.0};
  EXPECT_DOUBLE_EQ(weight(p, 4), 1.0 / std::sqrt(5.0));
  EXPECT_EQ(weight(WeightSpec{.kind = WeightKind::constant_one}, -1000), 1.0);
}

TEST(Weights, SymmetricAndMatchOracle) {
  oracle::Gen g(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto w = g.any_weights(10);
    for (std::int64_t k = 0; k < 30; ++k) {
      EXPECT_EQ(weight(w, k), weight(w, -k));
      EXPECT_NEAR(weight(w, k), oracle::weight(w, k), 1e-15);
    }
  }
}

TEST(Weights, WindowSumsMatchBruteForce) {
  oracle::Gen g(7);
  for (int trial = 0; trial < 60; ++trial) {
    const auto w = g.any_weights(8);
    const std::int64_t n = g.integer(1, 120);
    const auto all = window_sums(w, n);
    long double sq = 0;
    for (std::int64_t i = 1; i <= n; ++i) {
      long double s = 0;
      for (std::int64_t j = 1; j <= n; ++j) s += oracle::weight(w, i - j);
      sq += s * s;
      EXPECT_NEAR(window_sum(w, i, n), static_cast<double>(s), 1e-12 * (1 + std::fabs(static_cast<double>(s))));
      EXPECT_NEAR(all[static_cast<std::size_t>(i - 1)], static_cast<double>(s), 1e-12 * (1 + std::fabs(static_cast<double>(s))));
    }
    const double wn = normalizer(w, n);
    EXPECT_NEAR(wn * wn * static_cast<double>(n), static_cast<double>(sq), 1e-11 * static_cast<double>(sq) + 1e-12);
  }
}

TEST(Weights, WindowSumClosedForms) {
  const WeightSpec one{.kind = WeightKind::constant_one};
  for (std::int64_t i : {1, 20, 64}) EXPECT_EQ(window_sum(one, i, 64), 64.0);
  EXPECT_EQ(normalizer(one, 64), 64.0);
  EXPECT_EQ(window_sum(WeightSpec{.kind = WeightKind::delta, .k0 = 0}, 7, 100), 1.0);
  const WeightSpec d5{.kind = WeightKind::delta, .k0 = 5};
  EXPECT_LE(normalizer(d5, 1000), 2.0);
  for (std::int64_t n : {10, 100, 1000}) {
    const double wn = normalizer(one, n);
    EXPECT_EQ(static_cast<double>(n) * wn * wn, std::pow(static_cast<double>(n), 3));
  }
}

TEST(Weights, PowerNormalizerGrowth) {
  const WeightSpec p{.kind = WeightKind::power, .beta_w = 0.5, .c = 1.0};
  std::vector<double> lx, ly;
  for (std::int64_t n = 256; n <= 8192; n *= 2) {
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(normalizer(p, n)));
  }
  EXPECT_NEAR(stats::line_fit(lx, ly).slope, 0.5, 0.05);
}

TEST(Weights, DiagnoseVerdicts) {
  const auto one = diagnose(WeightSpec{.kind = WeightKind::constant_one}, 4096);
  EXPECT_FALSE(one.summable);
  EXPECT_TRUE(one.ratio_to_zero);
  EXPECT_TRUE(one.liminf_positive);
  for (std::size_t i = 0; i < one.n_grid.size(); ++i) {
    const double n = static_cast<double>(one.n_grid[i]);
    EXPECT_NEAR(one.ratio_t3[i], (n + 1) / (2 * n * n), 1e-12 * one.ratio_t3[i]);
  }

  const auto d0 = diagnose(WeightSpec{.kind = WeightKind::delta, .k0 = 0}, 4096);
  EXPECT_TRUE(d0.summable);
  for (double v : d0.abs_partial_sums) EXPECT_EQ(v, 1.0);

  // Sparse spikes w_n = 2^k at n = 2^{2^k}: not summable, but the T3 ratio
  // stalls instead of vanishing.
  WeightSpec spikes{.kind = WeightKind::explicit_half};
  spikes.half.assign(65537, 0.0);
  for (int k = 0; k <= 4; ++k) spikes.half[std::size_t{1} << (1u << k)] = std::ldexp(1.0, k);
  const auto sp = diagnose(spikes, 1 << 17);
  EXPECT_FALSE(sp.summable);
  EXPECT_FALSE(sp.ratio_to_zero);

  const auto geo = diagnose(WeightSpec{.kind = WeightKind::geometric, .q = 0.5}, 4096);
  EXPECT_TRUE(geo.summable);
  EXPECT_EQ(geo.n_grid.front(), 16);
  EXPECT_EQ(geo.n_grid.back(), 4096);
}

TEST(Weights, ValidationAndSupport) {
  EXPECT_THROW(validate(WeightSpec{.kind = WeightKind::delta, .k0 = -1}), ValidationError);
  EXPECT_THROW(validate(WeightSpec{.kind = WeightKind::geometric, .q = 1.0}), ValidationError);
  EXPECT_THROW(validate(WeightSpec{.kind = WeightKind::explicit_half}), ValidationError);
  EXPECT_EQ(support_radius(WeightSpec{.kind = WeightKind::delta, .k0 = 4}), 4);
  EXPECT_FALSE(support_radius(WeightSpec{.kind = WeightKind::constant_one}));
}

// ---------------------------------------------------------------------------
// Kernels

TEST(Kernels, PointValues) {
  const KernelSpec ind{KernelKind::indicator_distance, 0.1};
  EXPECT_EQ(eval(ind, 0.0, 0.05), 1.0);
  EXPECT_EQ(eval(ind, 0.0, 0.2), 0.0);
  EXPECT_EQ(eval(KernelSpec{KernelKind::wilcoxon}, 0.7, -0.7), 0.0);
  EXPECT_EQ(eval(KernelSpec{KernelKind::product, 0.1, Transform::square}, 2.0, 3.0), 36.0);
}

TEST(Kernels, SymmetricAndMatchOracle) {
  oracle::Gen g(12);
  for (int trial = 0; trial < 500; ++trial) {
    const auto k = g.kernel();
    const double x = g.normal(), y = g.normal();
    EXPECT_EQ(eval(k, x, y), eval(k, y, x));
    EXPECT_EQ(eval(k, x, y), oracle::kernel(k, x, y));
  }
}

TEST(Kernels, AnalyticLagMeansAgreeWithMonteCarlo) {
  struct Case {
    KernelSpec k;
    ProcessSpec p;
  };
  const std::vector<Case> cases{
      {{KernelKind::product, 0.1, Transform::identity}, geometric_spec(0.5, 64)},
      {{KernelKind::product, 0.1, Transform::square}, geometric_spec(0.5, 64)},
      {{KernelKind::wilcoxon}, geometric_spec(0.5, 64)},
      {{KernelKind::indicator_distance, 0.5}, geometric_spec(0.5, 64)},
      {{KernelKind::additive, 0.1, Transform::square}, geometric_spec(0.3, 64)},
      {{KernelKind::indicator_distance, 0.25}, map_spec(MapKind::halving_bernoulli)},
  };
  for (const auto& c : cases) {
    const auto means = analytic_lag_means(c.k, c.p, 8);
    ASSERT_TRUE(means);
    for (std::int64_t gap : {0, 1, 3, 8}) {
      const auto mc = mean_estimate(c.k, c.p, gap, 40000, 100 + static_cast<std::uint64_t>(gap));
      EXPECT_NEAR((*means)[static_cast<std::size_t>(gap)], mc.value, 4.0 * mc.std_error + 1e-12)
          << "gap " << gap;
    }
  }
}

TEST(Kernels, ClosedFormLagMeans) {
  const auto geo = geometric_spec(0.5, 200);
  const auto prod = analytic_lag_means(KernelSpec{KernelKind::product}, geo, 4);
  ASSERT_TRUE(prod);
  for (std::size_t h = 0; h <= 4; ++h) EXPECT_NEAR((*prod)[h], covariance_fn(geo, h), 1e-14);
  const auto wil = analytic_lag_means(KernelSpec{KernelKind::wilcoxon}, regvar_spec(0.7, 1024), 3);
  ASSERT_TRUE(wil);
  EXPECT_EQ((*wil)[2], 0.5);
  // Independent Uniform(0,1) pair at a far lag: P(|U − V| < b) = 2b − b².
  const auto halv = analytic_lag_means(KernelSpec{KernelKind::indicator_distance, 0.25},
                                       map_spec(MapKind::halving_bernoulli), 64);
  ASSERT_TRUE(halv);
  EXPECT_NEAR((*halv)[64], 0.5 - 0.0625, 1e-12);
  EXPECT_EQ((*halv)[0], 1.0);
}
