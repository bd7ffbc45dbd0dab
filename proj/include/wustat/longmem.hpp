#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wustat/process.hpp"

namespace wustat::longmem {

enum class Example { sample_covariance, wilcoxon };

struct LongMemCase {
  Example example = Example::wilcoxon;
  double beta = 0.7;
  SlowlyVarying slowly_varying = SlowlyVarying::one;
  int rho = 1;            // expansion order
  std::int64_t lag = 2;   // sample_covariance only
};

void validate(const LongMemCase& c);

enum class RateCase {
  clt_summable,
  unit_weights,
  correlation_integral,
  sample_covariance,
  wilcoxon,
};

/// Growth exponent of the standard deviation of U_n − EU_n. Variance slopes
/// are twice this.
double rate_exponent(RateCase c, double beta = 0.0);
double rate_exponent(const LongMemCase& c);

/// φ(0) / sqrt(2(1 + ρ)).
double wilcoxon_derivative(double rho);

struct DecompositionTerm {
  int r = 0;
  double value = 0.0;
  double normalizer_exponent = 0.0;
  std::string description;
};

/// 8 E(X²) Σ_{i=1}^{n−k} Σ_{j1>j2} a_{i−j1} a_{i+k−j2} ε_{j1} ε_{j2}.
/// innovations holds ε_{1−M}..ε_n (M = coeffs.size() − 1).
DecompositionTerm z_term_covariance(std::span<const double> innovations,
                                    std::span<const double> coeffs, double second_moment,
                                    std::size_t n, std::int64_t k);

/// Same, with coefficients and E(X²) taken from `spec` and innovations from
/// a path generated with retain_innovations.
DecompositionTerm z_term_covariance(const LinearProcessSpec& spec, const SamplePath& path,
                                    std::int64_t k);

/// Σ_{i1,i2} d_{i1−i2} (X_{i1} + X_{i2}) / σ_X with d_h = wilcoxon_derivative(ρ_h).
DecompositionTerm z_term_wilcoxon(const LinearProcessSpec& spec, std::span<const double> x);

// ---------------------------------------------------------------------------
// Limit variances

enum class WeightMode { summable_constant, constant_one };

struct LimitVariance {
  double beta = 0.0;
  int r = 1;
  WeightMode mode = WeightMode::constant_one;
  double C = 1.0;
  double value = 0.0;
  double error = 0.0;
  std::string method;
  // Independent second route (r <= 2): Boost double-exponential rules.
  bool cross_checked = false;
  double cross_value = 0.0;
  double cross_error = 0.0;
};

/// h(S)(u) = ∫_0^1 Π_{s∈S} (x − u_s)_+^{−β} dx.
double inner_integral(double beta, std::span<const double> u);

/// ∫_{u_1 > … > u_r, u_1 < 1} F(u)² du with F = C h({1..r}) for summable
/// weights and F = C Σ_{S ⊆ {1..r}} h(S) h(S^c) for w ≡ 1.
LimitVariance limit_variance(double beta, int r, WeightMode mode, double C = 1.0,
                             double rel_tol = 1e-8, std::size_t qmc_points = 1 << 14,
                             std::uint64_t seed = 1);

/// Randomized quasi-Monte Carlo route (used for r > 2).
LimitVariance limit_variance_qmc(double beta, int r, WeightMode mode, double C,
                                 std::size_t points, std::uint64_t seed);

/// Predicted Var(U_n) for the Wilcoxon statistic with w ≡ 1 on a regvar
/// Gaussian process: n^{5−2β} L(n)² (σ_ε²/σ_X²) · value / (4π).
double wilcoxon_variance_prediction(const LinearProcessSpec& spec, std::size_t n,
                                    const LimitVariance& lv);

// ---------------------------------------------------------------------------

struct Condition27 {
  double exponent = 0.0;  // −β(ρ+1) + ρ/2
  bool boundary = false;
  bool converges = false;
  std::string note;
};

Condition27 condition27_check(double beta, int rho, SlowlyVarying l);

}  // namespace wustat::longmem
