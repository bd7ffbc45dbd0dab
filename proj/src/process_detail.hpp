#pragma once

#include <cstdint>
#include <vector>

#include "wustat/process.hpp"

namespace wustat::detail {

/// The innovations generate_linear would use for (spec, n, seed):
/// ε_{1−M}..ε_n in time order.
std::vector<double> linear_innovations(const LinearProcessSpec& spec, std::size_t n,
                                       std::uint64_t seed);

/// The innovations generate_iterated would use: ε_{1−B}..ε_n.
std::vector<double> iterated_innovations(const IteratedMapSpec& spec, std::size_t n,
                                         std::uint64_t seed);

}  // namespace wustat::detail
