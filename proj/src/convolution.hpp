#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wustat::detail {

/// y_t = Σ_{i=0}^{m} a_i e_{t+m−i} for t in [0, n), with e.size() == n + m and
/// a.size() == m + 1. The method (direct dot or FFT) depends only on (n, m),
/// so equal inputs always give bit-identical outputs.
std::vector<double> convolve_valid(std::span<const double> a, std::span<const double> e,
                                   std::size_t n);

/// c_h = Σ_i a_i a_{i+h} for h in [0, max_lag].
std::vector<double> autocorrelate(std::span<const double> a, std::size_t max_lag);

}  // namespace wustat::detail
