#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "wustat/parallel.hpp"
#include "wustat/quadrature.hpp"
#include "wustat/rng.hpp"
#include "wustat/simd.hpp"
#include "wustat/stats.hpp"

using namespace wustat;

TEST(Rng, MixIsSplitMixFinalizer) {
  // First SplitMix64 output from state 0.
  EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Rng, DerivedStreamsAreDistinct) {
  std::set<std::uint64_t> ids;
  for (std::uint64_t s = 0; s < 4; ++s) {
    for (std::uint64_t i = 0; i < 500; ++i) {
      for (auto role : {StreamRole::history, StreamRole::future, StreamRole::path, StreamRole::inner}) {
        ids.insert(derive_stream(s, i, role));
      }
    }
  }
  EXPECT_EQ(ids.size(), 4u * 500u * 4u);
}

TEST(Stats, CompensatedSumRecoversCancellation) {
  stats::CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1000.0);
}

TEST(Stats, MomentsMatchDefinition) {
  oracle::Gen g(3);
  const auto v = g.normals(1000);
  long double m = 0;
  for (double x : v) m += x;
  m /= v.size();
  long double m2 = 0, m3 = 0, m4 = 0;
  for (double x : v) {
    const long double d = x - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const auto r = stats::moments(v);
  EXPECT_NEAR(r.mean, static_cast<double>(m), 1e-14);
  EXPECT_NEAR(r.variance, static_cast<double>(m2 / (v.size() - 1)), 1e-12);
  const double n = static_cast<double>(v.size());
  const double skew = static_cast<double>((m3 / n) / std::pow(m2 / n, 1.5L));
  const double kurt = static_cast<double>((m4 / n) / ((m2 / n) * (m2 / n))) - 3.0;
  EXPECT_NEAR(r.skewness, skew, 1e-3);
  EXPECT_NEAR(r.excess_kurtosis, kurt, 1e-2);
}

TEST(Stats, LineFitExact) {
  std::vector<double> x{1, 2, 3, 4, 5}, y;
  for (double v : x) y.push_back(2.5 * v - 1.0);
  const auto f = stats::line_fit(x, y);
  EXPECT_NEAR(f.slope, 2.5, 1e-13);
  EXPECT_NEAR(f.intercept, -1.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_LT(f.slope_stderr, 1e-12);
}

TEST(Stats, WeightedFitIgnoresZeroWeightOutlier) {
  std::vector<double> x{0, 1, 2, 3}, y{0, 1, 2, 100}, w{1, 1, 1, 0};
  const auto f = stats::weighted_line_fit(x, y, w);
  EXPECT_NEAR(f.slope, 1.0, 1e-12);
}

TEST(Stats, KolmogorovTail) {
  // Reference values of the Kolmogorov distribution.
  EXPECT_NEAR(stats::kolmogorov_q(1.0), 0.26999967167735456, 1e-10);
  EXPECT_NEAR(stats::kolmogorov_q(1.36), 0.04949, 1e-4);
  EXPECT_NEAR(stats::kolmogorov_q(0.5), 0.9639452436648751, 1e-9);
  EXPECT_NEAR(stats::kolmogorov_q(0.2), 1.0, 1e-12);
  EXPECT_NEAR(stats::kolmogorov_q(3.0), 3.045996e-8, 1e-12);
}

TEST(Stats, NormalCdf) {
  EXPECT_DOUBLE_EQ(stats::normal_cdf(0.0), 0.5);
  EXPECT_NEAR(stats::normal_cdf(1.959963984540054), 0.975, 1e-12);
  EXPECT_NEAR(stats::normal_pdf(0.0), 0.3989422804014327, 1e-15);
}

TEST(Stats, QuantileInterpolates) {
  std::vector<double> v{0, 1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(stats::quantile_sorted(v, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(stats::quantile_sorted(v, 0.125), 0.5);
  EXPECT_DOUBLE_EQ(stats::quantile_sorted(v, 1.0), 4.0);
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
  std::vector<double> a(1000), b(1000);
  auto fill = [](std::vector<double>& out, unsigned t) {
    parallel_for(out.size(), [&](std::size_t i) {
      Engine e = make_engine(derive_stream(9, i, StreamRole::path));
      out[i] = std::normal_distribution<double>()(e);
    }, t);
  };
  fill(a, 1);
  fill(b, 4);
  EXPECT_EQ(a, b);
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(100, [](std::size_t i) {
                 if (i == 37) throw std::runtime_error("x");
               }, 3),
               std::runtime_error);
}

// ---------------------------------------------------------------------------
// SIMD equivalence: every available ISA must agree with the scalar reference
// bit for bit.

class SimdEquivalence : public ::testing::TestWithParam<simd::Isa> {};

TEST_P(SimdEquivalence, PairSumDotChaos) {
  const auto isa = GetParam();
  if (!simd::available(isa)) GTEST_SKIP() << "ISA not available here";
  const auto& ref = simd::ops(simd::Isa::scalar);
  const auto& v = simd::ops(isa);
  ASSERT_EQ(v.isa, isa);
  oracle::Gen g(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(g.integer(0, 67));
    auto x = trial % 3 == 0 ? g.gridded(n, 0.125, 8) : g.normals(n);
    auto y = trial % 3 == 0 ? g.gridded(n, 0.125, 8) : g.normals(n);
    for (int k = 0; k <= 5; ++k) {
      const auto pk = static_cast<simd::PairKernel>(k);
      const double param = 0.25;
      const double a = ref.pair_sum(pk, param, x.data(), y.data(), n);
      const double b = v.pair_sum(pk, param, x.data(), y.data(), n);
      EXPECT_EQ(std::bit_cast<std::uint64_t>(a), std::bit_cast<std::uint64_t>(b)) << "kernel " << k << " n " << n;
    }
    EXPECT_EQ(ref.dot(x.data(), y.data(), n), v.dot(x.data(), y.data(), n));

    const std::size_t steps = static_cast<std::size_t>(g.integer(1, 40));
    const std::size_t pad = steps + simd::kChaosLanes + 4;
    std::vector<double> p(2 * pad + simd::kChaosLanes + 8);
    for (auto& q : p) q = g.normal();
    std::vector<double> eps = g.normals(steps);
    std::vector<double> acc1 = g.normals(simd::kChaosLanes), v1 = g.normals(simd::kChaosLanes);
    auto acc2 = acc1, v2 = v1;
    const double* p1 = p.data() + pad;
    ref.chaos2(p1, p1 + 3, eps.data(), steps, acc1.data(), v1.data());
    v.chaos2(p1, p1 + 3, eps.data(), steps, acc2.data(), v2.data());
    EXPECT_EQ(acc1, acc2);
    EXPECT_EQ(v1, v2);
  }
}

INSTANTIATE_TEST_SUITE_P(AllIsas, SimdEquivalence,
                         ::testing::Values(simd::Isa::scalar, simd::Isa::avx2, simd::Isa::neon),
                         [](const auto& info) { return std::string(simd::isa_name(info.param)); });

TEST(Simd, PairSumMatchesOracleKernels) {
  oracle::Gen g(5);
  const auto& ops = simd::active();
  const wustat::KernelSpec specs[] = {
      {KernelKind::indicator_distance, 0.25, Transform::identity},
      {KernelKind::product, 0.1, Transform::identity},
      {KernelKind::product, 0.1, Transform::square},
      {KernelKind::wilcoxon, 0.1, Transform::identity},
      {KernelKind::additive, 0.1, Transform::identity},
      {KernelKind::additive, 0.1, Transform::square}};
  for (const auto& k : specs) {
    const auto x = g.gridded(101, 0.125, 6), y = g.gridded(101, 0.125, 6);
    long double ref = 0;
    for (std::size_t i = 0; i < x.size(); ++i) ref += oracle::kernel(k, x[i], y[i]);
    EXPECT_EQ(ops.pair_sum(pair_kernel(k), k.b, x.data(), y.data(), x.size()), static_cast<double>(ref));
  }
}

TEST(Simd, ChaosSweepDefinition) {
  // One lane, written out: acc += p1[l−s] e_s v; v += p2[l−s] e_s.
  oracle::Gen g(8);
  const std::size_t steps = 13, W = simd::kChaosLanes;
  std::vector<double> P(64);
  for (auto& q : P) q = static_cast<double>(g.integer(-3, 3));
  std::vector<double> eps(steps);
  for (auto& e : eps) e = static_cast<double>(g.integer(-2, 2));
  const double* p1 = P.data() + 20;
  const double* p2 = P.data() + 24;
  std::vector<double> acc(W, 0.0), v(W, 0.0);
  simd::active().chaos2(p1, p2, eps.data(), steps, acc.data(), v.data());
  for (std::size_t l = 0; l < W; ++l) {
    double a = 0, vv = 0;
    for (std::size_t s = 0; s < steps; ++s) {
      const auto off = static_cast<std::ptrdiff_t>(l) - static_cast<std::ptrdiff_t>(s);
      a += p1[off] * eps[s] * vv;
      vv += p2[off] * eps[s];
    }
    EXPECT_EQ(acc[l], a);
    EXPECT_EQ(v[l], vv);
  }
}

// ---------------------------------------------------------------------------

TEST(Quadrature, KronrodSmoothAndSingular) {
  auto r = quad::gauss_kronrod([](double x) { return std::exp(x); }, 0.0, 1.0);
  EXPECT_NEAR(r.value, std::exp(1.0) - 1.0, 1e-13);
  EXPECT_TRUE(r.converged);
  r = quad::gauss_kronrod([](double x) { return std::pow(x, -0.7); }, 0.0, 1.0, 1e-10);
  EXPECT_NEAR(r.value, 1.0 / 0.3, 1e-8);
  r = quad::gauss_kronrod([](double x) { return std::log(x); }, 0.0, 1.0, 1e-12);
  EXPECT_NEAR(r.value, -1.0, 1e-10);
}

TEST(Quadrature, DoubleExponentialRoutes) {
  auto r = quad::tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 4.0);
  EXPECT_NEAR(r.value, 4.0, 1e-10);
  r = quad::exp_sinh([](double x) { return std::exp(-x); }, 0.0);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  r = quad::exp_sinh([](double x) { return std::pow(1.0 + x, -1.4); }, 0.0);
  EXPECT_NEAR(r.value, 1.0 / 0.4, 1e-9);
}
