#pragma once

#include <cstddef>
#include <functional>

namespace wustat::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  std::size_t evaluations = 0;
  bool converged = true;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 7/15-point Gauss–Kronrod on a finite interval. Nodes are
/// interior, so integrable endpoint singularities are tolerated.
Result gauss_kronrod(const Integrand& f, double a, double b, double rel_tol = 1e-10,
                     double abs_tol = 0.0, std::size_t max_intervals = 2000);

/// Boost double-exponential rules (tanh-sinh on finite intervals,
/// exp-sinh on [a, ∞)), used as an independent second route. Each level
/// halves the step; nested integrals usually want fewer than the default.
Result tanh_sinh(const Integrand& f, double a, double b, double rel_tol = 1e-10,
                 std::size_t max_levels = 15);
Result exp_sinh(const Integrand& f, double a, double rel_tol = 1e-10, std::size_t max_levels = 15);

}  // namespace wustat::quad
