#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wustat/rng.hpp"

namespace wustat {

// ---------------------------------------------------------------------------
// Innovations
// ---------------------------------------------------------------------------

enum class InnovationLaw {
  standard_normal,
  bernoulli_half,     // values 0/1 with probability 1/2 each
  uniform_symmetric,  // Uniform(-1, 1)
  student_t,
};

struct InnovationSpec {
  InnovationLaw law = InnovationLaw::standard_normal;
  double scale = 1.0;  // multiplier on every draw
  double df = 0.0;     // student_t only

  bool operator==(const InnovationSpec&) const = default;
};

void validate(const InnovationSpec& spec);
double innovation_mean(const InnovationSpec& spec);
/// +infinity for student_t with df <= 2.
double innovation_variance(const InnovationSpec& spec);
/// E ε⁴ − 3σ⁴; +infinity when the fourth moment does not exist.
double innovation_fourth_cumulant(const InnovationSpec& spec);
bool is_symmetric(const InnovationSpec& spec);

/// Draws scaled innovations from one engine. Holds distribution state, so a
/// sampler must stay paired with the engine it was first used with.
class InnovationSampler {
 public:
  explicit InnovationSampler(const InnovationSpec& spec);

  double operator()(Engine& engine);
  void fill(Engine& engine, std::span<double> out);

 private:
  InnovationSpec spec_;
  std::normal_distribution<double> normal_;
  std::bernoulli_distribution bernoulli_{0.5};
  std::uniform_real_distribution<double> uniform_{-1.0, 1.0};
  std::student_t_distribution<double> student_;
};

// ---------------------------------------------------------------------------
// Causal linear processes  X_t = Σ_{i=0}^{M} a_i ε_{t−i}
// ---------------------------------------------------------------------------

enum class CoefficientRuleKind { explicit_list, geometric, regvar };

/// L(j) in a_j = j^{−β} L(j).
enum class SlowlyVarying { one, log, inv_log };

double slowly_varying_value(SlowlyVarying l, double x);

struct CoefficientRule {
  CoefficientRuleKind kind = CoefficientRuleKind::geometric;
  std::vector<double> values;  // explicit_list: a_0..a_m
  double rho = 0.5;            // geometric: a_j = rho^j
  double beta = 0.75;          // regvar: a_j = j^{-beta} L(j), a_0 = 0
  SlowlyVarying slowly_varying = SlowlyVarying::one;

  bool operator==(const CoefficientRule&) const = default;
};

struct LinearProcessSpec {
  CoefficientRule coefficients;
  std::size_t truncation = 1024;  // M, ignored for explicit lists
  InnovationSpec innovations;
  /// Set by truncate_linear: a_i = 0 for i >= cutoff.
  std::optional<std::size_t> cutoff;

  bool operator==(const LinearProcessSpec&) const = default;
};

void validate(const LinearProcessSpec& spec);

/// History length M (largest lag with a stored coefficient slot).
std::size_t max_lag(const LinearProcessSpec& spec);

/// a_0..a_M with the cutoff applied.
std::vector<double> coefficients(const LinearProcessSpec& spec);

/// ã_i = a_i I(i < ell); the same innovation layout is kept.
LinearProcessSpec truncate_linear(const LinearProcessSpec& spec, std::size_t ell);

/// Γ(lag) = σ_ε² Σ_i a_i a_{i+lag} over the stored support.
double covariance_fn(const LinearProcessSpec& spec, std::size_t lag);

/// Γ(0..max_lag) in one pass.
std::vector<double> autocovariances(const LinearProcessSpec& spec, std::size_t max_lag);

/// σ_ε² Σ_{i>M} a_i², the variance dropped by truncating the infinite sum.
double truncation_tail_variance(const LinearProcessSpec& spec);

// ---------------------------------------------------------------------------
// Iterated random functions  X_n = F(X_{n−1}, ε_n)
// ---------------------------------------------------------------------------

enum class MapKind { ar1, halving_bernoulli, tar1, arch1 };

struct IteratedMapSpec {
  MapKind map = MapKind::ar1;
  double rho = 0.5;        // ar1
  double phi_plus = 0.5;   // tar1
  double phi_minus = 0.5;  // tar1
  double a0 = 1.0;         // arch1
  double a1 = 0.3;         // arch1
  InnovationSpec innovations;
  std::size_t burn_in = 1000;

  bool operator==(const IteratedMapSpec&) const = default;
};

void validate(const IteratedMapSpec& spec);

/// One step F(x, ε). ARCH(1) uses X_n = ε_n sqrt(a0 + a1 X_{n−1}²).
double apply_map(const IteratedMapSpec& spec, double x, double eps);

/// Per-step contraction |F(x,ε) − F(y,ε)| / |x − y| when it does not depend on
/// (x, y, ε); empty otherwise.
std::optional<double> exact_contraction(const IteratedMapSpec& spec);

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

using ProcessSpec = std::variant<LinearProcessSpec, IteratedMapSpec>;

void validate(const ProcessSpec& spec);

/// Short hex digest of the canonical serialization of a spec.
std::string fingerprint(const ProcessSpec& spec);

struct SamplePath {
  std::vector<double> values;  // X_1..X_n
  std::uint64_t seed = 0;
  /// ε_{first_innovation_index} .. ε_n when retained.
  std::optional<std::vector<double>> innovations;
  std::int64_t first_innovation_index = 1;
  /// X_0 for iterated maps (state before the first reported value).
  double initial_state = 0.0;
  std::string spec_fingerprint;

  std::size_t size() const noexcept { return values.size(); }
  std::span<const double> view() const noexcept { return values; }
};

struct GenerateOptions {
  bool retain_innovations = true;
};

SamplePath generate_linear(const LinearProcessSpec& spec, std::size_t n, std::uint64_t seed,
                           GenerateOptions options = {});
SamplePath generate_iterated(const IteratedMapSpec& spec, std::size_t n, std::uint64_t seed,
                             GenerateOptions options = {});
SamplePath generate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed,
                    GenerateOptions options = {});

/// Recomputes X_1..X_n from the retained innovations.
std::vector<double> reconstruct(const ProcessSpec& spec, const SamplePath& path);

/// Linear process values from an explicit innovation vector
/// ε_{1−M}..ε_n (length n + M).
std::vector<double> linear_values(const LinearProcessSpec& spec, std::span<const double> innovations,
                                  std::size_t n);

enum class CouplingMode { iid_prehistory, fixed_prehistory };

/// Two paths driven by the same innovations at indices >= coupling_time and
/// different pre-histories before it.
struct CoupledPair {
  SamplePath primary;
  SamplePath shadow;
  std::int64_t coupling_time = 1;
  CouplingMode mode = CouplingMode::iid_prehistory;
  double z0 = 0.0;
};

CoupledPair generate_coupled(const ProcessSpec& spec, std::size_t n, CouplingMode mode,
                             std::uint64_t seed, double z0 = 0.0);

}  // namespace wustat
