#include "wustat/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "convolution.hpp"
#include "process_detail.hpp"
#include "wustat/errors.hpp"
#include "wustat/quadrature.hpp"
#include "wustat/spec_io.hpp"
#include "wustat/stats.hpp"

namespace wustat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The first `count` draws of one stream. History streams are consumed
// backward from time 0 (ε_0, ε_{−1}, ...), so a longer history extends a
// shorter one without changing the shared part.
std::vector<double> draw(const InnovationSpec& law, std::uint64_t stream, std::size_t count) {
  Engine eng = make_engine(stream);
  InnovationSampler sampler(law);
  std::vector<double> out(count);
  sampler.fill(eng, out);
  return out;
}

// Innovations ε_{1−m}..ε_n laid out in time order.
std::vector<double> linear_innovations(const LinearProcessSpec& spec, std::size_t n,
                                       std::uint64_t history_stream, std::uint64_t future_stream) {
  const std::size_t m = max_lag(spec);
  std::vector<double> e(n + m);
  const auto hist = draw(spec.innovations, history_stream, m);
  for (std::size_t q = 0; q < m; ++q) e[m - 1 - q] = hist[q];
  const auto fut = draw(spec.innovations, future_stream, n);
  std::copy(fut.begin(), fut.end(), e.begin() + static_cast<std::ptrdiff_t>(m));
  return e;
}

SamplePath linear_path(const LinearProcessSpec& spec, std::size_t n, std::uint64_t seed,
                       std::vector<double> innovations, bool retain) {
  SamplePath p;
  p.values = linear_values(spec, innovations, n);
  p.seed = seed;
  p.first_innovation_index = 1 - static_cast<std::int64_t>(max_lag(spec));
  p.spec_fingerprint = fingerprint(ProcessSpec{spec});
  if (retain) p.innovations = std::move(innovations);
  return p;
}

// Runs the map from `start` over innovations [first, last) and records every
// state produced at a time index >= 1.
SamplePath iterate(const IteratedMapSpec& spec, std::size_t n, double start,
                   std::vector<double> innovations, std::int64_t first_index, bool retain) {
  SamplePath p;
  p.values.reserve(n);
  double x = start;
  std::int64_t t = first_index;
  if (first_index >= 1) p.initial_state = start;
  for (double e : innovations) {
    x = apply_map(spec, x, e);
    if (t == 0) p.initial_state = x;
    if (t >= 1) p.values.push_back(x);
    ++t;
  }
  p.first_innovation_index = first_index;
  p.spec_fingerprint = fingerprint(ProcessSpec{spec});
  if (retain) p.innovations = std::move(innovations);
  return p;
}

std::vector<double> iterated_innovations(const IteratedMapSpec& spec, std::size_t n,
                                         std::uint64_t history_stream,
                                         std::uint64_t future_stream) {
  const std::size_t b = spec.burn_in;
  std::vector<double> e(b + n);
  const auto hist = draw(spec.innovations, history_stream, b);
  for (std::size_t q = 0; q < b; ++q) e[b - 1 - q] = hist[q];
  const auto fut = draw(spec.innovations, future_stream, n);
  std::copy(fut.begin(), fut.end(), e.begin() + static_cast<std::ptrdiff_t>(b));
  return e;
}

}  // namespace

// ---------------------------------------------------------------------------
// Innovations

void validate(const InnovationSpec& spec) {
  if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) {
    throw ValidationError("innovations.scale must be positive and finite");
  }
  if (spec.law == InnovationLaw::student_t && !(spec.df > 0.0)) {
    throw ValidationError("innovations.df must be positive for student_t");
  }
}

double innovation_mean(const InnovationSpec& spec) {
  if (spec.law == InnovationLaw::bernoulli_half) return 0.5 * spec.scale;
  if (spec.law == InnovationLaw::student_t && spec.df <= 1.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return 0.0;
}

double innovation_variance(const InnovationSpec& spec) {
  const double s2 = spec.scale * spec.scale;
  switch (spec.law) {
    case InnovationLaw::standard_normal:
      return s2;
    case InnovationLaw::bernoulli_half:
      return 0.25 * s2;
    case InnovationLaw::uniform_symmetric:
      return s2 / 3.0;
    case InnovationLaw::student_t:
      return spec.df > 2.0 ? s2 * spec.df / (spec.df - 2.0) : kInf;
  }
  return kInf;
}

double innovation_fourth_cumulant(const InnovationSpec& spec) {
  const double s4 = std::pow(spec.scale, 4);
  switch (spec.law) {
    case InnovationLaw::standard_normal:
      return 0.0;
    case InnovationLaw::bernoulli_half:
      return -s4 / 8.0;
    case InnovationLaw::uniform_symmetric:
      return -2.0 * s4 / 15.0;
    case InnovationLaw::student_t: {
      const double v = spec.df;
      if (v <= 4.0) return kInf;
      return s4 * 6.0 * v * v / ((v - 2.0) * (v - 2.0) * (v - 4.0));
    }
  }
  return kInf;
}

bool is_symmetric(const InnovationSpec& spec) {
  return spec.law != InnovationLaw::bernoulli_half;
}

InnovationSampler::InnovationSampler(const InnovationSpec& spec)
    : spec_(spec), normal_(0.0, 1.0), student_(spec.df > 0.0 ? spec.df : 1.0) {}

double InnovationSampler::operator()(Engine& engine) {
  switch (spec_.law) {
    case InnovationLaw::standard_normal:
      return spec_.scale * normal_(engine);
    case InnovationLaw::bernoulli_half:
      return bernoulli_(engine) ? spec_.scale : 0.0;
    case InnovationLaw::uniform_symmetric:
      return spec_.scale * uniform_(engine);
    case InnovationLaw::student_t:
      return spec_.scale * student_(engine);
  }
  return 0.0;
}

void InnovationSampler::fill(Engine& engine, std::span<double> out) {
  for (double& v : out) v = (*this)(engine);
}

// ---------------------------------------------------------------------------
// Linear processes

double slowly_varying_value(SlowlyVarying l, double x) {
  switch (l) {
    case SlowlyVarying::one:
      return 1.0;
    case SlowlyVarying::log:
      return std::log(std::numbers::e + x);
    case SlowlyVarying::inv_log:
      return 1.0 / std::log(std::numbers::e + x);
  }
  return 1.0;
}

void validate(const LinearProcessSpec& spec) {
  validate(spec.innovations);
  if (spec.innovations.law == InnovationLaw::bernoulli_half) {
    throw ValidationError(
        "innovations.law: bernoulli_half has nonzero mean and is only accepted by iterated maps");
  }
  if (spec.innovations.law == InnovationLaw::student_t && spec.innovations.df <= 2.0) {
    throw ValidationError("innovations.df must exceed 2 for linear processes (finite variance)");
  }
  const auto& c = spec.coefficients;
  switch (c.kind) {
    case CoefficientRuleKind::explicit_list:
      if (c.values.empty()) throw ValidationError("coefficients.values must not be empty");
      for (double v : c.values) {
        if (!std::isfinite(v)) throw ValidationError("coefficients.values must be finite");
      }
      break;
    case CoefficientRuleKind::geometric:
      if (!(std::fabs(c.rho) < 1.0)) throw ValidationError("coefficients.rho must satisfy |rho| < 1");
      break;
    case CoefficientRuleKind::regvar:
      if (!(c.beta > 0.5 && c.beta < 1.0)) {
        throw ValidationError("coefficients.beta must lie in (1/2, 1)");
      }
      break;
  }
  if (c.kind != CoefficientRuleKind::explicit_list && spec.truncation < 1) {
    throw ValidationError("truncation must be at least 1");
  }
  if (spec.cutoff && *spec.cutoff < 1) throw ValidationError("cutoff must be at least 1");
}

std::size_t max_lag(const LinearProcessSpec& spec) {
  if (spec.coefficients.kind == CoefficientRuleKind::explicit_list) {
    return spec.coefficients.values.empty() ? 0 : spec.coefficients.values.size() - 1;
  }
  return spec.truncation;
}

std::vector<double> coefficients(const LinearProcessSpec& spec) {
  const std::size_t m = max_lag(spec);
  const auto& c = spec.coefficients;
  std::vector<double> a(m + 1, 0.0);
  switch (c.kind) {
    case CoefficientRuleKind::explicit_list:
      std::copy(c.values.begin(), c.values.end(), a.begin());
      break;
    case CoefficientRuleKind::geometric:
      for (std::size_t j = 0; j <= m; ++j) a[j] = std::pow(c.rho, static_cast<double>(j));
      break;
    case CoefficientRuleKind::regvar:
      for (std::size_t j = 1; j <= m; ++j) {
        const double x = static_cast<double>(j);
        a[j] = std::pow(x, -c.beta) * slowly_varying_value(c.slowly_varying, x);
      }
      break;
  }
  if (spec.cutoff) {
    for (std::size_t i = *spec.cutoff; i <= m; ++i) a[i] = 0.0;
  }
  return a;
}

LinearProcessSpec truncate_linear(const LinearProcessSpec& spec, std::size_t ell) {
  if (ell < 1) throw ArgumentError("truncate_linear: ell must be at least 1");
  LinearProcessSpec out = spec;
  std::size_t cut = spec.cutoff ? std::min(*spec.cutoff, ell) : ell;
  if (cut >= max_lag(spec) + 1) {
    out.cutoff.reset();
  } else {
    out.cutoff = cut;
  }
  return out;
}

double covariance_fn(const LinearProcessSpec& spec, std::size_t lag) {
  const double s2 = innovation_variance(spec.innovations);
  if (!std::isfinite(s2)) throw DomainError("covariance_fn: innovation variance is infinite");
  const auto a = coefficients(spec);
  if (lag >= a.size()) return 0.0;
  stats::CompensatedSum s;
  for (std::size_t i = 0; i + lag < a.size(); ++i) s.add(a[i] * a[i + lag]);
  return s2 * s.value();
}

std::vector<double> autocovariances(const LinearProcessSpec& spec, std::size_t max_lag_) {
  const double s2 = innovation_variance(spec.innovations);
  if (!std::isfinite(s2)) throw DomainError("autocovariances: innovation variance is infinite");
  auto c = detail::autocorrelate(coefficients(spec), max_lag_);
  for (double& v : c) v *= s2;
  return c;
}

double truncation_tail_variance(const LinearProcessSpec& spec) {
  const double s2 = innovation_variance(spec.innovations);
  if (!std::isfinite(s2)) throw DomainError("truncation_tail_variance: infinite variance");
  const std::size_t m = max_lag(spec);
  const std::size_t start = spec.cutoff ? *spec.cutoff : m + 1;
  const auto& c = spec.coefficients;
  // Stored coefficients zeroed by a cutoff.
  stats::CompensatedSum s;
  if (start <= m) {
    LinearProcessSpec full = spec;
    full.cutoff.reset();
    const auto a = coefficients(full);
    for (std::size_t i = start; i <= m; ++i) s.add(a[i] * a[i]);
  }
  switch (c.kind) {
    case CoefficientRuleKind::explicit_list:
      break;
    case CoefficientRuleKind::geometric:
      s.add(std::pow(c.rho, 2.0 * static_cast<double>(m + 1)) / (1.0 - c.rho * c.rho));
      break;
    case CoefficientRuleKind::regvar: {
      // Σ_{i>m} f(i) by the midpoint integral ∫_{m+1/2}^∞ f; the error is
      // O(f''(m)) which is negligible at the truncations in use.
      const double lo = static_cast<double>(m) + 0.5;
      const double two_beta = 2.0 * c.beta;
      if (c.slowly_varying == SlowlyVarying::one) {
        s.add(std::pow(lo, 1.0 - two_beta) / (two_beta - 1.0));
      } else {
        auto f = [&](double x) {
          const double l = slowly_varying_value(c.slowly_varying, x);
          return std::pow(x, -two_beta) * l * l;
        };
        s.add(quad::exp_sinh(f, lo, 1e-12).value);
      }
      break;
    }
  }
  return s2 * s.value();
}

// ---------------------------------------------------------------------------
// Iterated maps

void validate(const IteratedMapSpec& spec) {
  validate(spec.innovations);
  switch (spec.map) {
    case MapKind::ar1:
      if (!(std::fabs(spec.rho) < 1.0)) throw ValidationError("rho must satisfy |rho| < 1");
      break;
    case MapKind::halving_bernoulli:
      if (spec.innovations.law != InnovationLaw::bernoulli_half) {
        throw ValidationError("halving_bernoulli requires innovations.law = bernoulli_half");
      }
      break;
    case MapKind::tar1:
      if (!(std::fabs(spec.phi_plus) < 1.0)) throw ValidationError("phi_plus must satisfy |phi_plus| < 1");
      if (!(std::fabs(spec.phi_minus) < 1.0)) {
        throw ValidationError("phi_minus must satisfy |phi_minus| < 1");
      }
      break;
    case MapKind::arch1:
      if (!(spec.a0 > 0.0)) throw ValidationError("a0 must be positive");
      if (!(spec.a1 >= 0.0 && spec.a1 < 1.0)) throw ValidationError("a1 must lie in [0, 1)");
      break;
  }
}

double apply_map(const IteratedMapSpec& spec, double x, double eps) {
  switch (spec.map) {
    case MapKind::ar1:
      return spec.rho * x + eps;
    case MapKind::halving_bernoulli:
      return 0.5 * (x + eps);
    case MapKind::tar1:
      return spec.phi_plus * std::max(x, 0.0) + spec.phi_minus * std::min(x, 0.0) + eps;
    case MapKind::arch1:
      return eps * std::sqrt(spec.a0 + spec.a1 * x * x);
  }
  return x;
}

std::optional<double> exact_contraction(const IteratedMapSpec& spec) {
  switch (spec.map) {
    case MapKind::ar1:
      return std::fabs(spec.rho);
    case MapKind::halving_bernoulli:
      return 0.5;
    case MapKind::tar1:
      if (spec.phi_plus == spec.phi_minus) return std::fabs(spec.phi_plus);
      return std::nullopt;
    case MapKind::arch1:
      return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Paths

void validate(const ProcessSpec& spec) {
  std::visit([](const auto& s) { validate(s); }, spec);
}

std::string fingerprint(const ProcessSpec& spec) {
  return io::sha256_hex(io::to_json(spec).dump()).substr(0, 16);
}

std::vector<double> linear_values(const LinearProcessSpec& spec, std::span<const double> innovations,
                                  std::size_t n) {
  const std::size_t m = max_lag(spec);
  if (innovations.size() != n + m) {
    throw ArgumentError("linear_values: expected n + M innovations");
  }
  const auto a = coefficients(spec);
  return detail::convolve_valid(a, innovations, n);
}

SamplePath generate_linear(const LinearProcessSpec& spec, std::size_t n, std::uint64_t seed,
                           GenerateOptions options) {
  validate(spec);
  if (n < 1) throw ArgumentError("generate_linear: n must be at least 1");
  auto e = linear_innovations(spec, n, derive_stream(seed, StreamRole::history),
                              derive_stream(seed, StreamRole::future));
  return linear_path(spec, n, seed, std::move(e), options.retain_innovations);
}

SamplePath generate_iterated(const IteratedMapSpec& spec, std::size_t n, std::uint64_t seed,
                             GenerateOptions options) {
  validate(spec);
  if (n < 1) throw ArgumentError("generate_iterated: n must be at least 1");
  auto e = iterated_innovations(spec, n, derive_stream(seed, StreamRole::history),
                                derive_stream(seed, StreamRole::future));
  const std::int64_t first = 1 - static_cast<std::int64_t>(spec.burn_in);
  SamplePath p = iterate(spec, n, 0.0, std::move(e), first, options.retain_innovations);
  p.seed = seed;
  return p;
}

SamplePath generate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed,
                    GenerateOptions options) {
  if (const auto* lin = std::get_if<LinearProcessSpec>(&spec)) {
    return generate_linear(*lin, n, seed, options);
  }
  return generate_iterated(std::get<IteratedMapSpec>(spec), n, seed, options);
}

std::vector<double> reconstruct(const ProcessSpec& spec, const SamplePath& path) {
  if (!path.innovations) throw ArgumentError("reconstruct: path has no retained innovations");
  const auto& e = *path.innovations;
  if (const auto* lin = std::get_if<LinearProcessSpec>(&spec)) {
    return linear_values(*lin, e, path.size());
  }
  const auto& it = std::get<IteratedMapSpec>(spec);
  // Retained innovations start either after a burn-in from 0 or, for a
  // fixed pre-history, at time 1 from the recorded initial state.
  const double start = path.first_innovation_index >= 1 ? path.initial_state : 0.0;
  SamplePath p = iterate(it, path.size(), start, e, path.first_innovation_index, false);
  return p.values;
}

namespace detail {

std::vector<double> linear_innovations(const LinearProcessSpec& spec, std::size_t n,
                                       std::uint64_t seed) {
  return wustat::linear_innovations(spec, n, derive_stream(seed, StreamRole::history),
                                    derive_stream(seed, StreamRole::future));
}

std::vector<double> iterated_innovations(const IteratedMapSpec& spec, std::size_t n,
                                         std::uint64_t seed) {
  return wustat::iterated_innovations(spec, n, derive_stream(seed, StreamRole::history),
                                      derive_stream(seed, StreamRole::future));
}

}  // namespace detail

CoupledPair generate_coupled(const ProcessSpec& spec, std::size_t n, CouplingMode mode,
                             std::uint64_t seed, double z0) {
  validate(spec);
  if (n < 1) throw ArgumentError("generate_coupled: n must be at least 1");
  CoupledPair pair;
  pair.mode = mode;
  pair.z0 = z0;
  pair.coupling_time = 1;
  const std::uint64_t hist = derive_stream(seed, StreamRole::history);
  const std::uint64_t shadow = derive_stream(seed, StreamRole::shadow_history);
  const std::uint64_t fut = derive_stream(seed, StreamRole::future);
  if (const auto* lin = std::get_if<LinearProcessSpec>(&spec)) {
    if (mode == CouplingMode::fixed_prehistory) {
      throw UnsupportedError(
          "fixed_prehistory coupling is not defined for linear processes; use truncate_linear");
    }
    pair.primary = linear_path(*lin, n, seed, linear_innovations(*lin, n, hist, fut), true);
    pair.shadow = linear_path(*lin, n, seed, linear_innovations(*lin, n, shadow, fut), true);
    return pair;
  }
  const auto& it = std::get<IteratedMapSpec>(spec);
  const std::int64_t first = 1 - static_cast<std::int64_t>(it.burn_in);
  pair.primary = iterate(it, n, 0.0, iterated_innovations(it, n, hist, fut), first, true);
  pair.primary.seed = seed;
  if (mode == CouplingMode::iid_prehistory) {
    pair.shadow = iterate(it, n, 0.0, iterated_innovations(it, n, shadow, fut), first, true);
  } else {
    pair.shadow = iterate(it, n, z0, draw(it.innovations, fut, n), 1, true);
  }
  pair.shadow.seed = seed;
  return pair;
}

}  // namespace wustat
