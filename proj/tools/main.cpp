#include <iostream>

#include "CLI11.hpp"
#include "wustat/dispatch.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weighted U-statistic experiments"};
  app.footer(wustat::cli::usage());
  wustat::cli::Options opt;
  std::string config, out, path;
  std::uint64_t seed = 0;
  app.add_option("subcommand", opt.subcommand, "simulate, ustat, gmc, delta, theta, concentration, weights, clt or longmem")
      ->required();
  auto* config_opt = app.add_option("--config", config, "Experiment config (JSON)");
  auto* seed_opt = app.add_option("--seed", seed, "Override experiment.seed");
  auto* out_opt = app.add_option("--out", out, "Output directory");
  app.add_option("--threads", opt.threads, "Worker thread cap (0 = all cores)");
  auto* path_opt = app.add_option("--path", path, "ustat: CSV file with the sample path");
  app.set_version_flag("--version", WUSTAT_VERSION);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return wustat::cli::validation_error;
  }
  if (*config_opt) opt.config = config;
  if (*seed_opt) opt.seed = seed;
  if (*out_opt) opt.out = out;
  if (*path_opt) opt.path = path;
  return wustat::cli::dispatch(opt, std::cout, std::cerr);
}
