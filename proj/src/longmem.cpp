#include "wustat/longmem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>

#include "wustat/errors.hpp"
#include "wustat/parallel.hpp"
#include "wustat/quadrature.hpp"
#include "wustat/rng.hpp"
#include "wustat/simd.hpp"
#include "wustat/stats.hpp"

namespace wustat::longmem {

namespace {

void check_beta(double beta, const char* who) {
  if (!(beta > 0.5 && beta < 1.0)) {
    throw DomainError(std::string(who) + ": beta must lie in (1/2, 1)");
  }
}

}  // namespace

void validate(const LongMemCase& c) {
  check_beta(c.beta, "LongMemCase");
  if (c.rho < 1) throw ValidationError("LongMemCase: rho must be a positive integer");
  if (c.example == Example::sample_covariance && c.lag < 2) {
    throw ValidationError("LongMemCase: sample_covariance needs lag >= 2");
  }
}

double rate_exponent(RateCase c, double beta) {
  switch (c) {
    case RateCase::clt_summable:
      return 0.5;
    case RateCase::unit_weights:
    case RateCase::correlation_integral:
      return 1.5;
    case RateCase::wilcoxon:
      check_beta(beta, "rate_exponent");
      return 2.5 - beta;
    case RateCase::sample_covariance:
      check_beta(beta, "rate_exponent");
      if (std::fabs(beta - 0.75) < 1e-12) {
        throw DomainError("rate_exponent: beta = 3/4 is the boundary between the two regimes");
      }
      return beta < 0.75 ? 2.0 - 2.0 * beta : 0.5;
  }
  return 0.0;
}

double rate_exponent(const LongMemCase& c) {
  validate(c);
  return rate_exponent(
      c.example == Example::wilcoxon ? RateCase::wilcoxon : RateCase::sample_covariance, c.beta);
}

double wilcoxon_derivative(double rho) {
  if (!(rho > -1.0)) throw DomainError("wilcoxon_derivative: rho must exceed -1");
  const double phi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return phi0 / std::sqrt(2.0 * (1.0 + rho));
}

// ---------------------------------------------------------------------------
// Z-terms

DecompositionTerm z_term_covariance(std::span<const double> innovations,
                                    std::span<const double> coeffs, double second_moment,
                                    std::size_t n, std::int64_t k) {
  if (k < 2) throw ArgumentError("z_term_covariance: lag must be at least 2");
  if (coeffs.empty()) throw ArgumentError("z_term_covariance: empty coefficient list");
  const std::size_t M = coeffs.size() - 1;
  if (innovations.size() != n + M) {
    throw ArgumentError("z_term_covariance: expected n + M innovations");
  }
  DecompositionTerm term;
  term.r = 2;
  term.description = "second-order chaos term of the lagged sample covariance of squares";
  const auto K = static_cast<std::size_t>(k);
  if (n <= K) return term;
  const std::size_t rows = n - K;

  constexpr std::size_t W = simd::kChaosLanes;
  const std::size_t Q0 = W - 1 + K;
  std::vector<double> P(M + 2 * K + 2 * W, 0.0);
  for (std::size_t m = 0; m <= M; ++m) P[Q0 + m] = coeffs[m];
  std::vector<double> eps(innovations.begin(), innovations.end());
  eps.resize(innovations.size() + W + K, 0.0);

  const std::size_t blocks = (rows + W - 1) / W;
  const std::size_t steps = M + W + K;
  std::vector<double> block_sum(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    const auto& ops = simd::active();
    const std::size_t i0 = 1 + b * W;
    std::array<double, W> acc{}, v{};
    const double* p1 = P.data() + M + Q0;
    // j0 = i0 − M sits at eps index i0 − 1.
    ops.chaos2(p1, p1 + K, eps.data() + (i0 - 1), steps, acc.data(), v.data());
    stats::CompensatedSum s;
    for (std::size_t l = 0; l < W && i0 + l <= rows; ++l) s.add(acc[l]);
    block_sum[b] = s.value();
  });
  term.value = 8.0 * second_moment * stats::compensated_sum(block_sum);
  return term;
}

DecompositionTerm z_term_covariance(const LinearProcessSpec& spec, const SamplePath& path,
                                    std::int64_t k) {
  validate(spec);
  const std::size_t M = max_lag(spec);
  if (!path.innovations) throw ArgumentError("z_term_covariance: path has no retained innovations");
  if (path.first_innovation_index != 1 - static_cast<std::int64_t>(M) ||
      path.innovations->size() != path.size() + M) {
    throw ArgumentError("z_term_covariance: innovations do not cover the truncated history");
  }
  const auto a = coefficients(spec);
  auto term = z_term_covariance(*path.innovations, a, covariance_fn(spec, 0), path.size(), k);
  if (spec.coefficients.kind == CoefficientRuleKind::regvar) {
    term.normalizer_exponent = 2.0 - 2.0 * spec.coefficients.beta;
  }
  return term;
}

DecompositionTerm z_term_wilcoxon(const LinearProcessSpec& spec, std::span<const double> x) {
  validate(spec);
  const std::size_t n = x.size();
  DecompositionTerm term;
  term.r = 1;
  term.description = "first-order term of the Wilcoxon statistic";
  if (spec.coefficients.kind == CoefficientRuleKind::regvar) {
    term.normalizer_exponent = 2.5 - spec.coefficients.beta;
  }
  if (n == 0) return term;
  const auto gamma = autocovariances(spec, n - 1);
  if (!(gamma[0] > 0.0)) throw DegenerateError("z_term_wilcoxon: process variance is zero");
  std::vector<double> prefix(n);  // Σ_{h<=m} d_h
  stats::CompensatedSum run;
  for (std::size_t h = 0; h < n; ++h) {
    run.add(wilcoxon_derivative(gamma[h] / gamma[0]));
    prefix[h] = run.value();
  }
  const double d0 = prefix[0];
  stats::CompensatedSum s;
  for (std::size_t i = 1; i <= n; ++i) {
    const double row = prefix[i - 1] + prefix[n - i] - d0;
    s.add(x[i - 1] * row);
  }
  term.value = 2.0 * s.value() / std::sqrt(gamma[0]);
  return term;
}

// ---------------------------------------------------------------------------
// Limit variances

namespace {

enum class Route { kronrod, double_exponential };

constexpr double kInnerTol = 1e-12;
// Refinement cap for double-exponential rules inside another integral. Near
// u = 1 the pieces are tiny but resolve slowly, and a relative tolerance on
// each piece would otherwise refine them to full depth.
constexpr std::size_t kNestedLevels = 8;

// ∫_{t0}^{t1} t^{−β}(t + d)^{−β} dt. With t = d s and z = s/(1 + s) this is
// d^{1−2β} times an incomplete beta integral with a = 1 − β, b = 2β − 1.
double pair_beta(double beta, double d, double t0, double t1) {
  const double a = 1.0 - beta, b = 2.0 * beta - 1.0;
  const double y1 = d / (d + t1);
  double diff;
  if (y1 > 0.5) {
    diff = boost::math::beta(a, b, t1 / (d + t1)) - boost::math::beta(a, b, t0 / (d + t0));
  } else {
    diff = boost::math::beta(b, a, d / (d + t0)) - boost::math::beta(b, a, y1);
  }
  return std::pow(d, -b) * diff;
}

double inner(double beta, std::span<const double> u, Route route) {
  if (u.empty()) return 1.0;
  const auto top = std::max_element(u.begin(), u.end());
  const double umax = *top;
  const double lo = std::max(0.0, umax);
  if (lo >= 1.0) return 0.0;
  if (route == Route::double_exponential) {
    // x = lo + t keeps the distance to the singular endpoint exact.
    auto f = [&](double t) {
      double p = 1.0;
      for (double us : u) {
        const double d = (lo - us) + t;
        if (!(d > 0.0)) return 0.0;
        p *= std::pow(d, -beta);
      }
      // Two nearly equal u overflow only on abscissas next to t = 0, whose
      // weights are far below the integral's scale.
      return std::min(p, std::numeric_limits<double>::max());
    };
    return quad::tanh_sinh(f, 0.0, 1.0 - lo, kInnerTol, kNestedLevels).value;
  }
  // v = (x − umax)^{1−β} removes the singularity of the largest u.
  const double g = 1.0 / (1.0 - beta);
  const auto skip = static_cast<std::size_t>(top - u.begin());
  auto f = [&](double v) {
    const double w = std::pow(v, g);
    double p = g;
    for (std::size_t s = 0; s < u.size(); ++s) {
      if (s != skip) p *= std::pow((umax - u[s]) + w, -beta);
    }
    return p;
  };
  if (u.size() == 1) {
    const double gm = 1.0 - beta;
    if (umax >= 0.0) return std::pow(1.0 - umax, gm) * g;
    // (1 + t)^γ − t^γ without cancellation for large t = −u.
    const double t = -umax;
    return std::pow(t, gm) * std::expm1(gm * std::log1p(1.0 / t)) * g;
  }
  if (u.size() == 2 && umax > -1.0 && u[0] != u[1]) {
    return pair_beta(beta, umax - u[1 - skip], lo - umax, 1.0 - umax);
  }
  if (umax <= -1.0) {
    // Every factor is smooth on [0, 1]; the v map would only add cancellation.
    auto h = [&](double x) {
      double p = 1.0;
      for (double us : u) p *= std::pow(x - us, -beta);
      return p;
    };
    return quad::gauss_kronrod(h, 0.0, 1.0, kInnerTol).value;
  }
  const double v0 = std::pow(lo - umax, 1.0 - beta);
  const double v1 = std::pow(1.0 - umax, 1.0 - beta);
  return quad::gauss_kronrod(f, v0, v1, kInnerTol).value;
}

double integrand_f(double beta, int r, WeightMode mode, double C, std::span<const double> u,
                   Route route) {
  if (mode == WeightMode::summable_constant) return C * inner(beta, u, route);
  double total = 0.0;
  std::array<double, 16> a{}, b{};
  const unsigned full = (1u << r) - 1;
  for (unsigned mask = 0; mask <= full; ++mask) {
    std::size_t na = 0, nb = 0;
    for (int s = 0; s < r; ++s) {
      if (mask & (1u << s)) {
        a[na++] = u[static_cast<std::size_t>(s)];
      } else {
        b[nb++] = u[static_cast<std::size_t>(s)];
      }
    }
    total += inner(beta, {a.data(), na}, route) * inner(beta, {b.data(), nb}, route);
  }
  return C * total;
}

// Inner integral for the pair (u1, u1 − d), taking the gap exactly: forming
// u1 − d would round small gaps to zero and drop the mass next to the
// diagonal, where F² ~ d^{2−4β}.
double pair_inner(double beta, double u1, double d, Route route) {
  if (!(d > 0.0)) return 0.0;
  const double lo = std::max(0.0, u1);
  if (lo >= 1.0) return 0.0;
  const double t0 = lo - u1;
  if (route == Route::double_exponential) {
    auto f = [&](double t) {
      const double p = std::pow(t0 + t, -beta) * std::pow(t0 + d + t, -beta);
      return std::min(p, std::numeric_limits<double>::max());
    };
    return quad::tanh_sinh(f, 0.0, 1.0 - lo, kInnerTol, kNestedLevels).value;
  }
  if (u1 > -1.0) return pair_beta(beta, d, t0, 1.0 - u1);
  auto h = [&](double x) { return std::pow(x - u1, -beta) * std::pow(x - u1 + d, -beta); };
  return quad::gauss_kronrod(h, 0.0, 1.0, kInnerTol).value;
}

double integrand_f2(double beta, WeightMode mode, double C, double u1, double d, Route route) {
  const double both = pair_inner(beta, u1, d, route);
  if (mode == WeightMode::summable_constant) return C * both;
  // Splits {}|{1,2} and {1,2}|{} give both, {1}|{2} and {2}|{1} the product.
  const double u2 = u1 - d;
  return 2.0 * C * (both + inner(beta, {&u1, 1}, route) * inner(beta, {&u2, 1}, route));
}

struct Acc {
  double value = 0.0;
  double error = 0.0;
  std::size_t evals = 0;
  void add(const quad::Result& r) {
    value += r.value;
    error += r.error;
    evals += r.evaluations;
  }
};

// x = e^v − 1 turns an algebraic tail in x into an exponential one in v, which
// the exp-sinh rule resolves; a tail like x^{−1.1} taken directly loses 1e-4.
template <class F>
auto log_tail(F f) {
  return [f](double v) {
    const double x = std::expm1(v);
    return std::isfinite(x) ? f(x) * (x + 1.0) : 0.0;
  };
}

// ∫_{−∞}^{c} f. The left tail uses u = m − (s^{−p} − 1); with p matched to
// the decay |u|^{−1−1/p} the transformed integrand is bounded at s = 0.
Acc integrate_below(const quad::Integrand& f, double c, double p, Route route, double tol,
                    std::size_t levels = 15) {
  Acc acc;
  const double m = c > 0.0 ? 0.0 : c;
  if (route == Route::double_exponential) {
    if (c > m) acc.add(quad::tanh_sinh(f, m, c, tol, levels));
    acc.add(quad::exp_sinh(log_tail([&](double x) { return f(m - x); }), 0.0, tol, levels));
    return acc;
  }
  if (c > m) acc.add(quad::gauss_kronrod(f, m, c, tol));
  acc.add(quad::gauss_kronrod(
      [&](double s) {
        const double sp = std::pow(s, -p);
        const double jac = p * sp / s;
        if (!std::isfinite(sp) || !std::isfinite(jac)) return 0.0;
        const double val = f(m - (sp - 1.0));
        return val == 0.0 ? 0.0 : val * jac;
      },
      0.0, 1.0, tol));
  return acc;
}

// ∫_0^∞ f(d) dd for f with an integrable power singularity at d = 0, handled
// by d = y^q, and a tail decaying like d^{−1−1/p}. The split point d0 is where
// f may have a kink.
Acc integrate_gap(const quad::Integrand& f, double d0, double p, double q, Route route,
                  double tol, std::size_t levels) {
  Acc acc;
  if (route == Route::double_exponential) {
    acc.add(quad::tanh_sinh(f, 0.0, d0, tol, levels));
    acc.add(quad::exp_sinh(log_tail([&](double x) { return f(d0 + x); }), 0.0, tol, levels));
    return acc;
  }
  acc.add(quad::gauss_kronrod(
      [&](double y) {
        const double d = std::pow(y, q);
        return d > 0.0 ? f(d) * q * std::pow(y, q - 1.0) : 0.0;
      },
      0.0, std::pow(d0, 1.0 / q), tol));
  acc.add(quad::gauss_kronrod(
      [&](double s) {
        const double sp = std::pow(s, -p);
        const double jac = p * sp / s;
        if (!std::isfinite(sp) || !std::isfinite(jac)) return 0.0;
        const double val = f(d0 + (sp - 1.0));
        return val == 0.0 ? 0.0 : val * jac;
      },
      0.0, 1.0, tol));
  return acc;
}

Acc quadrature_route(double beta, int r, WeightMode mode, double C, Route route, double tol) {
  const double e = 2.0 * beta - 1.0;
  if (r == 1) {
    auto g = [&](double u) {
      const double f = integrand_f(beta, 1, mode, C, {&u, 1}, route);
      return f * f;
    };
    return integrate_below(g, 1.0, 1.0 / e, route, tol);
  }
  // r == 2 over u1 > u2 = u1 − d. F² ~ d^{2−4β} near the diagonal; the
  // split at d = u1 puts the kink where u2 crosses 0 on an endpoint.
  const double q = 1.0 / (3.0 - 4.0 * beta);
  std::size_t inner_evals = 0;
  auto outer = [&](double u1) {
    auto g = [&](double d) {
      const double f = integrand_f2(beta, mode, C, u1, d, route);
      return f * f;
    };
    const auto a = integrate_gap(g, u1 > 0.0 ? u1 : 1.0, 1.0 / e, q, route, tol * 0.1, kNestedLevels);
    inner_evals += a.evals;
    return a.value;
  };
  auto acc = integrate_below(outer, 1.0, 1.0 / (2.0 * e), route, tol, 10);
  acc.evals += inner_evals;
  return acc;
}

// Radical inverse in base b.
double radical_inverse(std::uint64_t i, unsigned b) {
  double inv = 1.0 / b, f = inv, x = 0.0;
  while (i > 0) {
    x += f * static_cast<double>(i % b);
    i /= b;
    f *= inv;
  }
  return x;
}

constexpr std::array<unsigned, 12> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

double inner_integral(double beta, std::span<const double> u) {
  check_beta(beta, "inner_integral");
  return inner(beta, u, Route::kronrod);
}

LimitVariance limit_variance(double beta, int r, WeightMode mode, double C, double rel_tol,
                             std::size_t qmc_points, std::uint64_t seed) {
  check_beta(beta, "limit_variance");
  if (r < 1) throw ArgumentError("limit_variance: r must be positive");
  if (!(r * (2.0 * beta - 1.0) < 1.0)) {
    throw DomainError("limit_variance: r(2 beta - 1) must be below 1");
  }
  if (r > 2) return limit_variance_qmc(beta, r, mode, C, qmc_points, seed);
  LimitVariance lv;
  lv.beta = beta;
  lv.r = r;
  lv.mode = mode;
  lv.C = C;
  const auto a = quadrature_route(beta, r, mode, C, Route::kronrod, rel_tol);
  lv.value = a.value;
  lv.error = a.error;
  lv.method = "gauss_kronrod";
  const auto b = quadrature_route(beta, r, mode, C, Route::double_exponential, rel_tol);
  lv.cross_checked = true;
  lv.cross_value = b.value;
  lv.cross_error = b.error;
  return lv;
}

// Randomly shifted Halton points over the full cube (−∞, 1)^r; F is symmetric,
// so the ordered-simplex integral is the cube integral divided by r!.
LimitVariance limit_variance_qmc(double beta, int r, WeightMode mode, double C,
                                 std::size_t points, std::uint64_t seed) {
  check_beta(beta, "limit_variance");
  if (r < 1 || r > static_cast<int>(kPrimes.size())) {
    throw ArgumentError("limit_variance: r out of range for quasi-Monte Carlo");
  }
  if (points < 16) throw ArgumentError("limit_variance: too few quasi-Monte Carlo points");
  const double p = 1.0 / (2.0 * beta - 1.0);
  constexpr std::size_t shifts = 16;
  std::vector<double> est(shifts);
  parallel_for(shifts, [&](std::size_t sh) {
    Engine eng = make_engine(derive_stream(seed, sh, StreamRole::pilot));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> shift(static_cast<std::size_t>(r));
    for (auto& s : shift) s = unif(eng);
    std::vector<double> u(static_cast<std::size_t>(r));
    stats::CompensatedSum sum;
    for (std::size_t i = 0; i < points; ++i) {
      double jac = 1.0;
      bool skip = false;
      for (int d = 0; d < r; ++d) {
        double y = radical_inverse(i + 1, kPrimes[static_cast<std::size_t>(d)]) +
                   shift[static_cast<std::size_t>(d)];
        if (y >= 1.0) y -= 1.0;
        if (y <= 0.0) {
          skip = true;
          break;
        }
        const double yp = std::pow(y, -p);
        u[static_cast<std::size_t>(d)] = 1.0 - (yp - 1.0);
        jac *= p * yp / y;
      }
      if (skip || !std::isfinite(jac)) continue;
      const double f = integrand_f(beta, r, mode, C, u, Route::kronrod);
      sum.add(f * f * jac);
    }
    est[sh] = sum.value() / static_cast<double>(points);
  });
  double fact = 1.0;
  for (int d = 2; d <= r; ++d) fact *= d;
  const auto m = stats::moments(est);
  LimitVariance lv;
  lv.beta = beta;
  lv.r = r;
  lv.mode = mode;
  lv.C = C;
  lv.value = m.mean / fact;
  lv.error = std::sqrt(m.variance / static_cast<double>(shifts)) / fact;
  lv.method = "randomized_halton";
  return lv;
}

double wilcoxon_variance_prediction(const LinearProcessSpec& spec, std::size_t n,
                                    const LimitVariance& lv) {
  validate(spec);
  if (spec.coefficients.kind != CoefficientRuleKind::regvar) {
    throw UnsupportedError("wilcoxon_variance_prediction: needs regularly varying coefficients");
  }
  if (lv.r != 1 || lv.mode != WeightMode::constant_one) {
    throw ArgumentError("wilcoxon_variance_prediction: needs the r = 1, w = 1 limit variance");
  }
  const double beta = spec.coefficients.beta;
  const double nn = static_cast<double>(n);
  const double L = slowly_varying_value(spec.coefficients.slowly_varying, nn);
  const double ratio = innovation_variance(spec.innovations) / covariance_fn(spec, 0);
  return std::pow(nn, 5.0 - 2.0 * beta) * L * L * ratio * lv.value / (4.0 * std::numbers::pi);
}

Condition27 condition27_check(double beta, int rho, SlowlyVarying l) {
  Condition27 c;
  c.exponent = -beta * (rho + 1) + rho / 2.0;
  if (std::fabs(c.exponent + 1.0) < 1e-12) {
    c.boundary = true;
    c.converges = l == SlowlyVarying::inv_log;
    c.note = c.converges ? "boundary exponent -1; sum of L^(rho+1)/n converges for 1/log"
                         : "boundary exponent -1; sum of L^(rho+1)/n diverges";
  } else {
    c.converges = c.exponent < -1.0;
    c.note = c.converges ? "exponent below -1; series converges"
                         : "exponent above -1; series diverges";
  }
  return c;
}

}  // namespace wustat::longmem
