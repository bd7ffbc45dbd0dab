#include "wustat/spec_io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace wustat::io {

std::string_view name(InnovationLaw v) noexcept {
  switch (v) {
    case InnovationLaw::standard_normal: return "standard_normal";
    case InnovationLaw::bernoulli_half: return "bernoulli_half";
    case InnovationLaw::uniform_symmetric: return "uniform_symmetric";
    case InnovationLaw::student_t: return "student_t";
  }
  return "?";
}

std::string_view name(CoefficientRuleKind v) noexcept {
  switch (v) {
    case CoefficientRuleKind::explicit_list: return "explicit";
    case CoefficientRuleKind::geometric: return "geometric";
    case CoefficientRuleKind::regvar: return "regvar";
  }
  return "?";
}

std::string_view name(SlowlyVarying v) noexcept {
  switch (v) {
    case SlowlyVarying::one: return "one";
    case SlowlyVarying::log: return "log";
    case SlowlyVarying::inv_log: return "inv_log";
  }
  return "?";
}

std::string_view name(MapKind v) noexcept {
  switch (v) {
    case MapKind::ar1: return "ar1";
    case MapKind::halving_bernoulli: return "halving_bernoulli";
    case MapKind::tar1: return "tar1";
    case MapKind::arch1: return "arch1";
  }
  return "?";
}

std::string_view name(WeightKind v) noexcept {
  switch (v) {
    case WeightKind::delta: return "delta";
    case WeightKind::constant_one: return "constant_one";
    case WeightKind::power: return "power";
    case WeightKind::geometric: return "geometric";
    case WeightKind::explicit_half: return "explicit";
  }
  return "?";
}

std::string_view name(KernelKind v) noexcept {
  switch (v) {
    case KernelKind::indicator_distance: return "indicator_distance";
    case KernelKind::product: return "product";
    case KernelKind::wilcoxon: return "wilcoxon";
    case KernelKind::additive: return "additive";
  }
  return "?";
}

std::string_view name(Transform v) noexcept {
  return v == Transform::identity ? "identity" : "square";
}

std::string_view name(CouplingMode v) noexcept {
  return v == CouplingMode::iid_prehistory ? "iid_prehistory" : "fixed_prehistory";
}

Json to_json(const InnovationSpec& s) {
  Json j{{"law", name(s.law)}, {"scale", s.scale}};
  if (s.law == InnovationLaw::student_t) j["df"] = s.df;
  return j;
}

Json to_json(const LinearProcessSpec& s) {
  Json c{{"rule", name(s.coefficients.kind)}};
  switch (s.coefficients.kind) {
    case CoefficientRuleKind::explicit_list:
      c["values"] = s.coefficients.values;
      break;
    case CoefficientRuleKind::geometric:
      c["rho"] = s.coefficients.rho;
      break;
    case CoefficientRuleKind::regvar:
      c["beta"] = s.coefficients.beta;
      c["slowly_varying"] = name(s.coefficients.slowly_varying);
      break;
  }
  Json j{{"type", "linear"}, {"coefficients", c}, {"innovations", to_json(s.innovations)}};
  if (s.coefficients.kind != CoefficientRuleKind::explicit_list) j["truncation"] = s.truncation;
  if (s.cutoff) j["cutoff"] = *s.cutoff;
  return j;
}

Json to_json(const IteratedMapSpec& s) {
  Json j{{"type", "iterated"},
         {"map", name(s.map)},
         {"innovations", to_json(s.innovations)},
         {"burn_in", s.burn_in}};
  switch (s.map) {
    case MapKind::ar1:
      j["rho"] = s.rho;
      break;
    case MapKind::tar1:
      j["phi_plus"] = s.phi_plus;
      j["phi_minus"] = s.phi_minus;
      break;
    case MapKind::arch1:
      j["a0"] = s.a0;
      j["a1"] = s.a1;
      break;
    case MapKind::halving_bernoulli:
      break;
  }
  return j;
}

Json to_json(const ProcessSpec& s) {
  return std::visit([](const auto& v) { return to_json(v); }, s);
}

Json to_json(const WeightSpec& s) {
  Json j{{"kind", name(s.kind)}};
  switch (s.kind) {
    case WeightKind::delta:
      j["k0"] = s.k0;
      break;
    case WeightKind::constant_one:
      break;
    case WeightKind::power:
      j["beta_w"] = s.beta_w;
      j["c"] = s.c;
      break;
    case WeightKind::geometric:
      j["q"] = s.q;
      break;
    case WeightKind::explicit_half:
      j["values"] = s.half;
      break;
  }
  return j;
}

Json to_json(const KernelSpec& s) {
  Json j{{"kind", name(s.kind)}};
  switch (s.kind) {
    case KernelKind::indicator_distance:
      j["b"] = s.b;
      break;
    case KernelKind::product:
    case KernelKind::additive:
      j["transform"] = name(s.transform);
      break;
    case KernelKind::wilcoxon:
      break;
  }
  return j;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), end);
}

}  // namespace wustat::io
