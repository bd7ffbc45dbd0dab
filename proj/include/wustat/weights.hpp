#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace wustat {

enum class WeightKind { delta, constant_one, power, geometric, explicit_half };

/// Symmetric weights w_k = w_{−k}.
struct WeightSpec {
  WeightKind kind = WeightKind::delta;
  std::int64_t k0 = 0;       // delta
  double beta_w = 0.5;       // power: c (1 + |k|)^{-beta_w}
  double c = 1.0;            // power
  double q = 0.5;            // geometric: q^{|k|}
  std::vector<double> half;  // explicit_half: w_0..w_m, zero beyond

  bool operator==(const WeightSpec&) const = default;
};

void validate(const WeightSpec& spec);

double weight(const WeightSpec& spec, std::int64_t k);

/// Largest |k| with w_k possibly nonzero; empty for unbounded support.
std::optional<std::int64_t> support_radius(const WeightSpec& spec);

/// w_0..w_{count-1}.
std::vector<double> weight_table(const WeightSpec& spec, std::size_t count);

/// W_n(i) = Σ_{j=1}^n w_{i−j}, 1 <= i <= n.
double window_sum(const WeightSpec& spec, std::int64_t i, std::int64_t n);

/// All W_n(1..n) from one prefix table.
std::vector<double> window_sums(const WeightSpec& spec, std::int64_t n);

/// W_n = [Σ_i W_n(i)² / n]^{1/2}.
double normalizer(const WeightSpec& spec, std::int64_t n);

struct WeightDiagnostics {
  std::vector<std::int64_t> n_grid;
  std::vector<double> abs_partial_sums;  // Σ_{|i|<=n} |w_i|
  std::vector<double> wn_curve;          // W_n
  std::vector<double> ratio_t3;          // Σ_{k=0}^n (n−k) w_k² / (n W_n²)
  std::vector<double> liminf_proxy;      // W_n / Σ_{i=0}^n |w_i|

  // Trend verdicts over the finite grid; heuristics, not proofs.
  bool summable = false;
  bool ratio_to_zero = false;
  bool liminf_positive = false;
  double ratio_slope = 0.0;    // log-log slope of ratio_t3 over the upper half
  double abs_sum_growth = 0.0; // relative increase of abs sum over the upper half
  double liminf_min = 0.0;     // smallest liminf proxy over the upper half
};

/// Curves on the grid 16, 32, ..., up to n_max (n_max itself appended when it
/// is not a power of two).
WeightDiagnostics diagnose(const WeightSpec& spec, std::int64_t n_max);

void write_csv(std::ostream& os, const WeightDiagnostics& d);

}  // namespace wustat
