#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wustat/process.hpp"
#include "wustat/simd.hpp"

namespace wustat {

enum class KernelKind { indicator_distance, product, wilcoxon, additive };
enum class Transform { identity, square };

struct KernelSpec {
  KernelKind kind = KernelKind::additive;
  double b = 0.1;                           // indicator_distance
  Transform transform = Transform::identity;  // product T, additive G

  bool operator==(const KernelSpec&) const = default;
};

void validate(const KernelSpec& spec);

simd::PairKernel pair_kernel(const KernelSpec& spec) noexcept;
inline double pair_param(const KernelSpec& spec) noexcept { return spec.b; }

/// K(x, y). Boundaries are strict: |x − y| < b and x + y > 0.
double eval(const KernelSpec& spec, double x, double y) noexcept;

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo E K(X_1, X_{1+gap}) from reps independent paths.
Estimate mean_estimate(const KernelSpec& kernel, const ProcessSpec& process, std::int64_t gap,
                       std::size_t reps, std::uint64_t seed);

/// E K(X_1, X_{1+h}) for h = 0..max_lag when a closed form is known for this
/// (kernel, process) pair; empty otherwise.
std::optional<std::vector<double>> analytic_lag_means(const KernelSpec& kernel,
                                                      const ProcessSpec& process,
                                                      std::size_t max_lag);

}  // namespace wustat
