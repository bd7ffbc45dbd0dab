#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wustat/kernels.hpp"
#include "wustat/process.hpp"
#include "wustat/weights.hpp"

namespace wustat {

// ---------------------------------------------------------------------------
// Geometric moment contraction: E|X_n − X'_n|^α <= C r^n

struct GmcEstimate {
  double alpha = 1.0;
  std::vector<std::size_t> horizons;
  std::vector<double> moment;     // mean |X_n − X'_n|^α
  std::vector<double> std_error;
  double r_hat = 0.0;             // exp(slope) of log moment against n
  double C_hat = 0.0;             // exp(intercept)
  double log_r_stderr = 0.0;
  std::size_t points_used = 0;    // horizons with a positive moment
  bool degenerate = false;        // fewer than two positive moments
  std::size_t reps = 0;
};

/// One iid-prehistory coupled pair per replicate, followed across all horizons.
GmcEstimate estimate_gmc(const IteratedMapSpec& spec, double alpha,
                         const std::vector<std::size_t>& horizons, std::size_t reps,
                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Coupling distance δ_ℓ = sup_j ‖Y_{1,j} − Ỹ_{1,j}‖

/// {1, 2, 4, 8, 16, 32} plus the far gap 256.
std::vector<std::int64_t> default_j_grid();

struct DeltaCurve {
  std::vector<std::size_t> ell;
  std::vector<std::int64_t> j_grid;
  std::vector<double> delta;       // max over j
  std::vector<double> std_error;   // at the maximizing j
  std::vector<std::int64_t> argmax_j;
  std::size_t reps = 0;
};

/// Linear specs are truncated with truncate_linear (ℓ = 0 gives X̃ ≡ 0);
/// iterated maps restart from 0 exactly ℓ steps back.
DeltaCurve estimate_delta(const ProcessSpec& spec, const KernelSpec& kernel,
                          const std::vector<std::size_t>& ell_grid,
                          const std::vector<std::int64_t>& j_grid, std::size_t reps,
                          std::uint64_t seed);

// ---------------------------------------------------------------------------
// Projection norms θ_{i,j} = ‖P_0 Y_{i,j}‖

struct ThetaEstimate {
  std::int64_t i = 0;
  std::int64_t j = 0;
  double theta = 0.0;
  double std_error = 0.0;
  double theta_sq = 0.0;  // bias-corrected, before clamping
  double theta_sq_std_error = 0.0;
  bool clamped = false;   // theta_sq < 0 was clamped to 0
  std::size_t outer_reps = 0;
  std::size_t inner_reps = 0;
};

/// Nested Monte Carlo. The outer loop fixes the history through time 0; the
/// inner loop draws the future and a fresh ε_0 with common random numbers, so
/// each inner draw gives one sample of E[Y|Z_0] − E[Y|Z_{−1}].
ThetaEstimate estimate_theta(const ProcessSpec& spec, const KernelSpec& kernel, std::int64_t i,
                             std::int64_t j, std::size_t outer_reps, std::size_t inner_reps,
                             std::uint64_t seed);

/// θ_{i,i−k} on a (k, i) rectangle.
struct ThetaGrid {
  std::vector<std::int64_t> k_values;
  std::vector<std::int64_t> i_values;
  std::vector<std::vector<ThetaEstimate>> cells;  // [k index][i index]
};

ThetaGrid estimate_theta_grid(const ProcessSpec& spec, const KernelSpec& kernel,
                              const std::vector<std::int64_t>& k_values,
                              const std::vector<std::int64_t>& i_values, std::size_t outer_reps,
                              std::size_t inner_reps, std::uint64_t seed);

struct Condition3Score {
  double score = 0.0;                // Σ_k Σ_i |w_k| θ_{i,i−k}
  double std_error = 0.0;
  std::vector<double> cumulative_by_k;
  double tail_share = 0.0;           // share of the score from the upper half of k
  std::string note;
};

Condition3Score condition3_score(const WeightSpec& weights, const ThetaGrid& grid);

// ---------------------------------------------------------------------------
// Concentration: sup_{j, x} P(x < X_0 − X_j <= x + τ)

struct ConcentrationProbe {
  std::vector<double> tau;
  std::vector<std::int64_t> j_grid;
  std::vector<double> sup_hat;
  std::vector<double> std_error;  // binomial, at the maximizing cell
  std::vector<std::int64_t> argmax_j;
  std::vector<double> argmax_x;
  std::size_t x_points = 0;
  std::size_t reps = 0;
  // sup_hat ≈ C log^{−2κ}(1/τ)
  bool kappa_fitted = false;
  double kappa_hat = 0.0;
  double kappa_std_error = 0.0;
};

/// Windows (x, x + τ] are centred on x_points quantiles of a pilot sample of
/// X_0 − X_j, one grid per j. Main-sample differences come from independent
/// paths.
ConcentrationProbe probe_concentration(const ProcessSpec& spec,
                                       const std::vector<std::int64_t>& j_grid,
                                       const std::vector<double>& tau_grid, std::size_t x_points,
                                       std::size_t reps, std::uint64_t seed);

}  // namespace wustat
