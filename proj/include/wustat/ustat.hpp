#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wustat/kernels.hpp"
#include "wustat/process.hpp"
#include "wustat/weights.hpp"

namespace wustat {

enum class UStatMethod { dense, banded, sorted_indicator };

std::string_view method_name(UStatMethod m) noexcept;

struct UStatResult {
  double value = 0.0;
  std::size_t n = 0;
  bool include_diagonal = true;
  std::string path_fingerprint;
  UStatMethod method = UStatMethod::dense;
};

/// U_n = Σ_{1<=i,j<=n} w_{i−j} K(X_i, X_j), evaluated lag by lag as
/// w_0 Σ_i K(X_i, X_i) + 2 Σ_{d>=1} w_d Σ_i K(X_i, X_{i+d}).
UStatResult compute_dense(std::span<const double> x, const WeightSpec& weights,
                          const KernelSpec& kernel, bool include_diagonal = true,
                          std::string fingerprint = {});

/// Same value as compute_dense, visiting only lags within the weight support.
/// Throws UnsupportedError for weights without finite support.
UStatResult compute_banded(std::span<const double> x, const WeightSpec& weights,
                           const KernelSpec& kernel, bool include_diagonal = true,
                           std::string fingerprint = {});

/// N_b = #{(i, j) : |X_i − X_j| < b}, ordered pairs, diagonal included.
UStatResult correlation_integral(std::span<const double> x, double b,
                                 std::string fingerprint = {});

/// Picks the cheapest exact method for the inputs.
UStatResult compute(std::span<const double> x, const WeightSpec& weights,
                    const KernelSpec& kernel, bool include_diagonal = true,
                    std::string fingerprint = {});

inline UStatResult compute(const SamplePath& path, const WeightSpec& weights,
                           const KernelSpec& kernel, bool include_diagonal = true) {
  return compute(path.view(), weights, kernel, include_diagonal, path.spec_fingerprint);
}

struct SignedRankResult {
  double value = 0.0;        // Σ Ψ_i R_i^+
  std::size_t tied_pairs = 0;  // adjacent equal |X_i| after sorting
  std::size_t zeros = 0;       // X_i == 0, counted with Ψ = +1
  bool ties() const noexcept { return tied_pairs > 0; }
};

/// Signed-rank statistic. Ranks of |X_i| break ties by index.
SignedRankResult signed_rank(std::span<const double> x);

}  // namespace wustat
