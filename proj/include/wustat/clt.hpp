#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wustat/kernels.hpp"
#include "wustat/longmem.hpp"
#include "wustat/process.hpp"
#include "wustat/weights.hpp"

namespace wustat::clt {

enum class CenteringMode { analytic, monte_carlo };

struct Centering {
  CenteringMode mode = CenteringMode::analytic;
  std::size_t center_reps = 0;  // monte_carlo; 0 means 10 R
  /// Explicit E U_n per n (same length as n_grid). Empty: use the catalog.
  std::vector<double> values;
};

enum class RateSource { exponent, rate_case, window_normalizer };

struct Rate {
  RateSource source = RateSource::exponent;
  double exponent = 0.5;
  longmem::RateCase rate_case = longmem::RateCase::clt_summable;
  double beta = 0.0;  // for rate cases that need it
};

struct ExperimentConfig {
  ProcessSpec process;
  KernelSpec kernel;
  WeightSpec weights;
  std::vector<std::size_t> n_grid;
  std::size_t replicates = 100;
  Centering centering;
  Rate rate;
  bool include_diagonal = true;
  std::uint64_t seed = 1;
};

void validate(const ExperimentConfig& c);

struct ReplicateResult {
  std::size_t n = 0;
  std::size_t rep = 0;
  double raw = 0.0;
  double centered = 0.0;
  double standardized = 0.0;
  std::uint64_t stream = 0;
};

struct ExperimentResult {
  std::vector<ReplicateResult> results;  // n-major, then replicate
  std::vector<double> centers;           // per n
  std::vector<double> center_std_error;  // 0 for analytic centering
  std::vector<double> scales;            // per n
  std::vector<bool> analytic_center;     // per n
  bool centering_warning = false;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Scale dividing U_n − center at sample size n.
double standardization_scale(const ExperimentConfig& config, std::size_t n);

/// E U_n from lag means m_h = E K(X_1, X_{1+h}).
double expected_ustat(const WeightSpec& w, std::span<const double> lag_means, std::size_t n,
                      bool include_diagonal);

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  double r_squared = 0.0;
  std::vector<std::size_t> n;
  std::vector<double> variance;
  std::vector<std::size_t> count;
};

/// WLS of log Var(U_n − center) on log n with weights (R − 1)/2.
SlopeFit variance_slope(std::span<const ReplicateResult> results);

struct TestReport {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_distance = 0.0;
  double ks_p_value = 0.0;
  bool parameters_estimated = true;  // p-value ignores the fitted mean and sd
  bool degenerate = false;
  std::vector<std::pair<double, double>> qq;  // (normal quantile, standardized order statistic)
};

TestReport normality_tests(std::span<const double> values);

/// Per-n reports over the standardized values.
std::vector<TestReport> reports_by_n(const ExperimentResult& r, std::span<const std::size_t> n_grid);

}  // namespace wustat::clt
