#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wustat/clt.hpp"
#include "wustat/contraction.hpp"
#include "wustat/longmem.hpp"
#include "wustat/spec_io.hpp"

namespace wustat::cfg {

struct ExperimentSection {
  std::uint64_t seed = 1;
  std::vector<std::size_t> n_grid;
  std::size_t replicates = 100;
  clt::Centering centering;
  clt::Rate rate;
  bool include_diagonal = true;
};

struct SimulateOptions {
  std::size_t n = 1024;
  bool innovations = false;  // also write the innovations
};

struct UstatOptions {
  std::size_t n = 1024;
  bool include_diagonal = true;
};

struct GmcOptions {
  double alpha = 1.0;
  std::vector<std::size_t> horizons{1, 2, 4, 8, 12, 16, 20, 24};
  std::size_t reps = 20000;
};

struct DeltaOptions {
  std::vector<std::size_t> ell_grid{0, 1, 2, 4, 8, 16, 32};
  std::vector<std::int64_t> j_grid = default_j_grid();
  std::size_t reps = 20000;
};

struct ThetaOptions {
  std::vector<std::int64_t> k_values{0, 1, 2, 4, 8};
  std::vector<std::int64_t> i_values{0, 1, 2, 3, 4, 5};
  std::size_t outer_reps = 2000;
  std::size_t inner_reps = 64;
};

struct ConcentrationOptions {
  std::vector<std::int64_t> j_grid{1, 2, 4, 8};
  std::vector<double> tau_grid{0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  std::size_t x_points = 64;
  std::size_t reps = 100000;
};

struct WeightsOptions {
  std::int64_t n_max = 1 << 16;
};

enum class LongmemAction { rates, zterm, limitvar, cond27 };

struct LongmemOptions {
  LongmemAction action = LongmemAction::rates;
  longmem::Example example = longmem::Example::wilcoxon;
  double beta = 0.7;
  int r = 1;
  longmem::WeightMode mode = longmem::WeightMode::constant_one;
  double C = 1.0;
  int rho = 2;
  SlowlyVarying slowly_varying = SlowlyVarying::one;
  std::int64_t lag = 2;
  std::size_t n = 4096;
  std::size_t replicates = 200;
};

struct Diagnostics {
  std::optional<SimulateOptions> simulate;
  std::optional<UstatOptions> ustat;
  std::optional<GmcOptions> gmc;
  std::optional<DeltaOptions> delta;
  std::optional<ThetaOptions> theta;
  std::optional<ConcentrationOptions> concentration;
  std::optional<WeightsOptions> weights;
  std::optional<LongmemOptions> longmem;
};

struct OutputSection {
  std::string dir;  // empty: default
};

struct Config {
  std::optional<ProcessSpec> process;
  std::optional<KernelSpec> kernel;
  std::optional<WeightSpec> weights;
  std::optional<ExperimentSection> experiment;
  Diagnostics diagnostics;
  OutputSection output;

  std::uint64_t seed() const { return experiment ? experiment->seed : 1; }
};

/// Every problem found in a document, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  std::vector<std::string> errors_;
};

Config parse_config(std::string_view text);
Config parse_config_file(const std::filesystem::path& path);

/// Canonical form with defaults filled in; parse(serialize(c)) reproduces c.
io::Json to_json(const Config& c);
std::string serialize(const Config& c);

/// ExperimentConfig for the clt subcommand. Throws ConfigError when a
/// required section is missing.
clt::ExperimentConfig experiment_config(const Config& c);

std::string_view name(LongmemAction a) noexcept;
std::string_view name(longmem::RateCase c) noexcept;

}  // namespace wustat::cfg
