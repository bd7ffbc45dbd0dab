#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "wustat/kernels.hpp"
#include "wustat/process.hpp"
#include "wustat/weights.hpp"

namespace wustat::io {

using Json = nlohmann::json;

std::string_view name(InnovationLaw v) noexcept;
std::string_view name(CoefficientRuleKind v) noexcept;
std::string_view name(SlowlyVarying v) noexcept;
std::string_view name(MapKind v) noexcept;
std::string_view name(WeightKind v) noexcept;
std::string_view name(KernelKind v) noexcept;
std::string_view name(Transform v) noexcept;
std::string_view name(CouplingMode v) noexcept;

// Canonical JSON forms with every field spelled out. Key order is sorted, so
// dump() output is a stable fingerprint input.
Json to_json(const InnovationSpec& s);
Json to_json(const LinearProcessSpec& s);
Json to_json(const IteratedMapSpec& s);
Json to_json(const ProcessSpec& s);
Json to_json(const WeightSpec& s);
Json to_json(const KernelSpec& s);

std::string sha256_hex(std::string_view data);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

}  // namespace wustat::io
