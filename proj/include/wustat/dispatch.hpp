#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wustat/config.hpp"

namespace wustat::cli {

struct Options {
  std::string subcommand;
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  unsigned threads = 0;
  std::optional<std::filesystem::path> path;  // ustat: read X_1..X_n from a CSV file
};

enum ExitCode : int { ok = 0, validation_error = 1, runtime_failure = 2 };

const std::vector<std::string_view>& subcommands();
std::string usage();

/// Output directory: --out, then WUSTAT_OUT_DIR, then output.dir, then "out".
std::filesystem::path output_dir(const Options& opt, const cfg::Config& c);

/// Runs one subcommand and writes its files plus manifest.json.
int dispatch(const Options& opt, std::ostream& out, std::ostream& err);

/// Values from a CSV with one number per row, or "t,x" rows; a non-numeric
/// first row is treated as a header.
std::vector<double> read_path_csv(const std::filesystem::path& p);

}  // namespace wustat::cli
