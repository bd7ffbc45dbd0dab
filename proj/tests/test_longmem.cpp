#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wustat/errors.hpp"
#include "wustat/longmem.hpp"

using namespace wustat;
using namespace wustat::longmem;

namespace {

LinearProcessSpec regvar(double beta, std::size_t M) {
  LinearProcessSpec s;
  s.coefficients.kind = CoefficientRuleKind::regvar;
  s.coefficients.beta = beta;
  s.truncation = M;
  return s;
}

// ∫_{-∞}^{1} h(u)² du for h(u) = ∫_0^1 (x − u)_+^{−β} dx, from the closed-form
// antiderivative. The u < 0 part becomes t = −u = e^v and a trapezoid rule,
// which converges geometrically for this smooth, exponentially decaying
// integrand.
double r1_oracle(double beta) {
  const double g = 1.0 - beta;
  const double inside = 1.0 / (g * g * (3.0 - 2.0 * beta));
  auto h_neg = [&](double t) {
    // ((1 + t)^g − t^g) / g without cancellation for large t.
    return std::pow(t, g) * std::expm1(g * std::log1p(1.0 / t)) / g;
  };
  const double step = 1.0 / 64.0;
  long double s = 0.0L;
  for (double v = -60.0; v <= 200.0; v += step) {
    const double t = std::exp(v);
    const double h = h_neg(t);
    s += static_cast<long double>(h * h * t);
  }
  return inside + static_cast<double>(s) * step;
}

// r = 2 over u1 > u2, half the integral over the plane. Integrating u first,
// ∫ (x − u)_+^{−β} (y − u)_+^{−β} du = B(1 − β, 2β − 1) |x − y|^{1−2β}, which
// leaves beta integrals over [0, 1]².
struct R2 {
  double summable, constant_one;
};

R2 r2_oracle(double beta) {
  const double e = 2 * beta - 1, b = std::beta(1 - beta, e);
  // ∫∫ |x − y|^a = 2 / ((a + 1)(a + 2)).
  const double both = b * b * 2 / ((1 - 2 * e) * (2 - 2 * e));
  // ∫_0^1 |z − x|^{−e} dx = (z^{1−e} + (1 − z)^{1−e}) / (1 − e), squared and integrated.
  const double cross =
      2 * b * b / ((1 - e) * (1 - e)) * (2 / (3 - 2 * e) + 2 * std::beta(2 - e, 2 - e));
  const double single = b * 2 / ((1 - e) * (2 - e));
  // F = 2 (h12 + h1 h2) for constant weights.
  return {both / 2, 2 * (both + cross + single * single)};
}

}  // namespace

TEST(Rates, Exponents) {
  EXPECT_DOUBLE_EQ(rate_exponent(RateCase::wilcoxon, 0.7), 1.8);
  EXPECT_DOUBLE_EQ(rate_exponent(RateCase::sample_covariance, 0.6), 0.8);
  EXPECT_DOUBLE_EQ(rate_exponent(RateCase::sample_covariance, 0.85), 0.5);
  EXPECT_DOUBLE_EQ(rate_exponent(RateCase::correlation_integral), 1.5);
  EXPECT_DOUBLE_EQ(rate_exponent(RateCase::clt_summable), 0.5);
  EXPECT_THROW(rate_exponent(RateCase::sample_covariance, 0.75), DomainError);
  EXPECT_THROW(rate_exponent(RateCase::wilcoxon, 1.0), DomainError);
}

TEST(Wilcoxon, DerivativeValues) {
  EXPECT_NEAR(wilcoxon_derivative(0.0), 0.5 / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_NEAR(wilcoxon_derivative(0.0), 0.2820947918, 1e-9);
  EXPECT_NEAR(wilcoxon_derivative(1.0), 0.1994711402, 1e-9);
  const auto spec = regvar(0.7, 1u << 14);
  const double rho = covariance_fn(spec, 100) / covariance_fn(spec, 0);
  EXPECT_NEAR(wilcoxon_derivative(rho), 1.0 / (std::sqrt(2 * std::numbers::pi) * std::sqrt(2 * (1 + rho))), 1e-15);
  EXPECT_THROW(wilcoxon_derivative(-1.0), DomainError);
}

TEST(ZTerm, ExhaustiveAgainstTripleLoop) {
  oracle::Gen g(19);
  for (std::int64_t n = 3; n <= 6; ++n) {
    for (std::size_t M = 0; M <= 8; ++M) {
      for (std::int64_t k = 2; k < n; ++k) {
        std::vector<double> a(M + 1), eps(static_cast<std::size_t>(n) + M);
        for (auto& v : a) v = static_cast<double>(g.integer(-3, 3));
        for (auto& v : eps) v = static_cast<double>(g.integer(-3, 3));
        const double ex2 = static_cast<double>(g.integer(1, 5));
        const auto got = z_term_covariance(eps, a, ex2, static_cast<std::size_t>(n), k);
        EXPECT_EQ(got.value, static_cast<double>(oracle::zterm(eps, a, ex2, n, k)))
            << "n " << n << " M " << M << " k " << k;
        EXPECT_EQ(got.r, 2);
      }
    }
  }
}

TEST(ZTerm, RealValuedInputsAgreeClosely) {
  oracle::Gen g(20);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t M = static_cast<std::size_t>(g.integer(0, 30));
    const std::int64_t n = g.integer(3, 40), k = g.integer(2, n - 1);
    std::vector<double> a(M + 1);
    for (auto& v : a) v = g.uniform(-1, 1);
    const auto eps = g.normals(static_cast<std::size_t>(n) + M);
    const auto want = oracle::zterm(eps, a, 1.3, n, k);
    EXPECT_NEAR(z_term_covariance(eps, a, 1.3, static_cast<std::size_t>(n), k).value,
                static_cast<double>(want), 1e-10 * (1 + std::fabs(static_cast<double>(want))));
  }
}

TEST(ZTerm, ZeroInnovationsAndErrors) {
  std::vector<double> a{1, 0.5, 0.25}, eps(12, 0.0);
  EXPECT_EQ(z_term_covariance(eps, a, 1.0, 10, 2).value, 0.0);
  EXPECT_THROW(z_term_covariance(eps, a, 1.0, 10, 1), ArgumentError);
  EXPECT_THROW(z_term_covariance(eps, a, 1.0, 9, 2), ArgumentError);
}

TEST(ZTerm, PathOverloadUsesSpecMoments) {
  const auto spec = regvar(0.6, 64);
  const auto p = generate_linear(spec, 50, 3);
  const auto a = coefficients(spec);
  const auto got = z_term_covariance(spec, p, 3);
  EXPECT_EQ(got.value, z_term_covariance(*p.innovations, a, covariance_fn(spec, 0), 50, 3).value);
  auto no_eps = p;
  no_eps.innovations.reset();
  EXPECT_THROW(z_term_covariance(spec, no_eps, 3), ArgumentError);
}

TEST(ZTerm, WilcoxonMatchesDoubleLoop) {
  const auto spec = regvar(0.7, 256);
  const auto x = generate_linear(spec, 40, 8).values;
  const double g0 = covariance_fn(spec, 0);
  long double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const std::size_t h = i > j ? i - j : j - i;
      s += wilcoxon_derivative(covariance_fn(spec, h) / g0) * (x[i] + x[j]);
    }
  }
  const auto z = z_term_wilcoxon(spec, x);
  EXPECT_NEAR(z.value, static_cast<double>(s) / std::sqrt(g0), 1e-10 * (1 + std::fabs(z.value)));
  EXPECT_EQ(z.r, 1);
}

TEST(LimitVariance, InnerIntegralClosedForm) {
  for (double beta : {0.6, 0.7, 0.9}) {
    for (double u : {-3.0, -0.5, -1e-3, 0.0, 0.4}) {
      const double g = 1 - beta;
      const double want = u <= 0 ? (std::pow(1 - u, g) - std::pow(-u, g)) / g : std::pow(1 - u, g) / g;
      const double uu[] = {u};
      EXPECT_NEAR(inner_integral(beta, uu), want, 1e-9 * want);
    }
  }
}

TEST(LimitVariance, RoutesAgreeForRankOne) {
  for (double beta : {0.6, 0.7, 0.9}) {
    const auto lv = limit_variance(beta, 1, WeightMode::constant_one);
    ASSERT_TRUE(lv.cross_checked);
    EXPECT_NEAR(lv.value, lv.cross_value, 1e-4 * lv.value);
    // F = h(∅) h({1}) + h({1}) h(∅) = 2 h.
    EXPECT_NEAR(lv.value, 4.0 * r1_oracle(beta), 1e-6 * lv.value) << beta;
    const auto sc = limit_variance(beta, 1, WeightMode::summable_constant, 2.0);
    EXPECT_NEAR(sc.value, 4.0 * r1_oracle(beta), 1e-6 * sc.value);
  }
}

TEST(LimitVariance, RankTwoClosedForm) {
  for (double beta : {0.55, 0.6, 0.7}) {
    const auto want = r2_oracle(beta);
    const auto sc = limit_variance(beta, 2, WeightMode::summable_constant, 1.0, 1e-8);
    ASSERT_TRUE(sc.cross_checked);
    EXPECT_NEAR(sc.value, want.summable, 1e-7 * want.summable) << beta;
    EXPECT_NEAR(sc.cross_value, want.summable, 1e-7 * want.summable) << beta;
    const auto one = limit_variance(beta, 2, WeightMode::constant_one, 1.0, 1e-8);
    EXPECT_NEAR(one.value, want.constant_one, 1e-7 * want.constant_one) << beta;
    EXPECT_NEAR(one.cross_value, want.constant_one, 1e-7 * want.constant_one) << beta;
  }
}

TEST(LimitVariance, RankTwoQmcAgrees) {
  for (auto mode : {WeightMode::summable_constant, WeightMode::constant_one}) {
    const auto q = limit_variance(0.6, 2, mode);
    const auto mc = limit_variance_qmc(0.6, 2, mode, 1.0, 1 << 16, 3);
    EXPECT_NEAR(mc.value, q.value, 4 * mc.error + 0.02 * q.value);
  }
}

TEST(LimitVariance, DomainErrors) {
  EXPECT_THROW(limit_variance(0.75, 2, WeightMode::constant_one), DomainError);
  EXPECT_THROW(limit_variance(0.9, 2, WeightMode::summable_constant), DomainError);
  EXPECT_THROW(limit_variance(0.7, 0, WeightMode::constant_one), ArgumentError);
}

TEST(LimitVariance, HigherRankUsesQmc) {
  const auto lv = limit_variance(0.55, 3, WeightMode::summable_constant, 1.0, 1e-8, 1 << 12);
  EXPECT_FALSE(lv.cross_checked);
  EXPECT_GT(lv.value, 0.0);
  EXPECT_TRUE(std::isfinite(lv.error));
}

TEST(Condition27, Examples) {
  auto c = condition27_check(0.7, 2, SlowlyVarying::one);
  EXPECT_NEAR(c.exponent, -1.1, 1e-12);
  EXPECT_TRUE(c.converges);
  c = condition27_check(0.75, 2, SlowlyVarying::one);
  EXPECT_NEAR(c.exponent, -1.25, 1e-12);
  EXPECT_TRUE(c.converges);
  c = condition27_check(0.75, 1, SlowlyVarying::inv_log);
  EXPECT_TRUE(c.boundary);
  EXPECT_TRUE(c.converges);
  c = condition27_check(0.75, 1, SlowlyVarying::one);
  EXPECT_TRUE(c.boundary);
  EXPECT_FALSE(c.converges);
  c = condition27_check(0.6, 1, SlowlyVarying::one);
  EXPECT_FALSE(c.converges);
}
