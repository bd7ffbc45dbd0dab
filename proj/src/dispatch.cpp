#include "wustat/dispatch.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wustat/clt.hpp"
#include "wustat/contraction.hpp"
#include "wustat/errors.hpp"
#include "wustat/longmem.hpp"
#include "wustat/parallel.hpp"
#include "wustat/simd.hpp"
#include "wustat/stats.hpp"
#include "wustat/ustat.hpp"

namespace wustat::cli {

using io::Json;
using io::format_double;

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    f << content;
    if (!f) throw std::runtime_error("write failed for " + (dir_ / name).string());
    files_.push_back({{"file", name}, {"sha256", io::sha256_hex(content)}, {"bytes", content.size()}});
  }

  void json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  const std::filesystem::path& dir() const { return dir_; }
  const Json& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  Json files_ = Json::array();
};

// CSV builder with round-trip number formatting.
class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      if (!first) s_ << ',';
      s_ << h;
      first = false;
    }
    s_ << '\n';
  }

  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((s_ << (first ? "" : ",") << cell(v), first = false), ...);
    s_ << '\n';
  }

  std::string str() const { return s_.str(); }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(std::string_view v) { return std::string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I v) {
    return std::to_string(v);
  }

  std::ostringstream s_;
};

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

struct Context {
  const cfg::Config& config;
  const Options& opt;
  std::uint64_t seed;
  Outputs& out;
};

[[noreturn]] void missing(std::string_view what) {
  throw cfg::ConfigError({std::string(what) + ": section required for this subcommand"});
}

const ProcessSpec& need_process(const Context& c) {
  if (!c.config.process) missing("process");
  return *c.config.process;
}
const KernelSpec& need_kernel(const Context& c) {
  if (!c.config.kernel) missing("kernel");
  return *c.config.kernel;
}
const WeightSpec& need_weights(const Context& c) {
  if (!c.config.weights) missing("weights");
  return *c.config.weights;
}

void run_simulate(Context& c) {
  const auto& spec = need_process(c);
  const auto o = c.config.diagnostics.simulate.value_or(cfg::SimulateOptions{});
  const auto path = generate(spec, o.n, c.seed, GenerateOptions{.retain_innovations = o.innovations});
  Csv csv({"t", "x"});
  for (std::size_t t = 0; t < path.size(); ++t) csv.row(t + 1, path.values[t]);
  c.out.write("path.csv", csv.str());
  if (o.innovations && path.innovations) {
    Csv e({"index", "eps"});
    for (std::size_t k = 0; k < path.innovations->size(); ++k) {
      e.row(path.first_innovation_index + static_cast<std::int64_t>(k), (*path.innovations)[k]);
    }
    c.out.write("innovations.csv", e.str());
  }
  const auto m = stats::moments(path.values);
  c.out.json("summary.json", Json{{"n", path.size()},
                                  {"seed", c.seed},
                                  {"spec_fingerprint", path.spec_fingerprint},
                                  {"initial_state", path.initial_state},
                                  {"mean", num(m.mean)},
                                  {"variance", num(m.variance)}});
}

void run_ustat(Context& c) {
  const auto& kernel = need_kernel(c);
  const auto& weights = need_weights(c);
  const auto o = c.config.diagnostics.ustat.value_or(cfg::UstatOptions{});
  UStatResult r;
  std::string source;
  if (c.opt.path) {
    const auto x = read_path_csv(*c.opt.path);
    r = compute(x, weights, kernel, o.include_diagonal, io::sha256_hex(c.opt.path->string()).substr(0, 16));
    source = "file";
  } else {
    const auto path = generate(need_process(c), o.n, c.seed, GenerateOptions{.retain_innovations = false});
    r = compute(path, weights, kernel, o.include_diagonal);
    source = "generated";
  }
  c.out.json("ustat.json", Json{{"value", num(r.value)},
                                {"n", r.n},
                                {"include_diagonal", r.include_diagonal},
                                {"method", method_name(r.method)},
                                {"path_fingerprint", r.path_fingerprint},
                                {"source", source},
                                {"seed", c.seed}});
}

void run_gmc(Context& c) {
  const auto& spec = need_process(c);
  const auto* it = std::get_if<IteratedMapSpec>(&spec);
  if (!it) throw ValidationError("gmc: process.type must be iterated");
  const auto o = c.config.diagnostics.gmc.value_or(cfg::GmcOptions{});
  const auto g = estimate_gmc(*it, o.alpha, o.horizons, o.reps, c.seed);
  Csv csv({"n", "moment", "std_error"});
  for (std::size_t k = 0; k < g.horizons.size(); ++k) csv.row(g.horizons[k], g.moment[k], g.std_error[k]);
  c.out.write("gmc.csv", csv.str());
  const auto exact = exact_contraction(*it);
  c.out.json("gmc.json", Json{{"alpha", g.alpha},
                              {"r_hat", num(g.r_hat)},
                              {"C_hat", num(g.C_hat)},
                              {"log_r_stderr", num(g.log_r_stderr)},
                              {"points_used", g.points_used},
                              {"degenerate", g.degenerate},
                              {"reps", g.reps},
                              {"exact_contraction", exact ? Json(*exact) : Json(nullptr)}});
}

void run_delta(Context& c) {
  const auto o = c.config.diagnostics.delta.value_or(cfg::DeltaOptions{});
  const auto d = estimate_delta(need_process(c), need_kernel(c), o.ell_grid, o.j_grid, o.reps, c.seed);
  Csv csv({"ell", "delta", "std_error", "argmax_j"});
  for (std::size_t k = 0; k < d.ell.size(); ++k) csv.row(d.ell[k], d.delta[k], d.std_error[k], d.argmax_j[k]);
  c.out.write("delta.csv", csv.str());
}

void run_theta(Context& c) {
  const auto o = c.config.diagnostics.theta.value_or(cfg::ThetaOptions{});
  const auto g = estimate_theta_grid(need_process(c), need_kernel(c), o.k_values, o.i_values,
                                     o.outer_reps, o.inner_reps, c.seed);
  Csv csv({"k", "i", "j", "theta", "std_error", "theta_sq", "theta_sq_std_error", "clamped"});
  for (std::size_t a = 0; a < g.k_values.size(); ++a) {
    for (const auto& t : g.cells[a]) {
      csv.row(g.k_values[a], t.i, t.j, t.theta, t.std_error, t.theta_sq, t.theta_sq_std_error, t.clamped);
    }
  }
  c.out.write("theta.csv", csv.str());
  if (c.config.weights) {
    const auto s = condition3_score(*c.config.weights, g);
    c.out.json("condition3.json", Json{{"score", num(s.score)},
                                       {"std_error", num(s.std_error)},
                                       {"cumulative_by_k", s.cumulative_by_k},
                                       {"k_values", g.k_values},
                                       {"tail_share", num(s.tail_share)},
                                       {"note", s.note}});
  }
}

void run_concentration(Context& c) {
  const auto o = c.config.diagnostics.concentration.value_or(cfg::ConcentrationOptions{});
  const auto p = probe_concentration(need_process(c), o.j_grid, o.tau_grid, o.x_points, o.reps, c.seed);
  Csv csv({"tau", "sup_hat", "std_error", "argmax_j", "argmax_x"});
  for (std::size_t k = 0; k < p.tau.size(); ++k) {
    csv.row(p.tau[k], p.sup_hat[k], p.std_error[k], p.argmax_j[k], p.argmax_x[k]);
  }
  c.out.write("concentration.csv", csv.str());
  c.out.json("concentration.json", Json{{"x_points", p.x_points},
                                        {"reps", p.reps},
                                        {"kappa_fitted", p.kappa_fitted},
                                        {"kappa_hat", num(p.kappa_hat)},
                                        {"kappa_std_error", num(p.kappa_std_error)}});
}

void run_weights(Context& c) {
  const auto& w = need_weights(c);
  const auto o = c.config.diagnostics.weights.value_or(cfg::WeightsOptions{});
  const auto d = diagnose(w, o.n_max);
  std::ostringstream csv;
  write_csv(csv, d);
  c.out.write("weights.csv", csv.str());
  c.out.json("weights.json", Json{{"summable", d.summable},
                                  {"ratio_to_zero", d.ratio_to_zero},
                                  {"liminf_positive", d.liminf_positive},
                                  {"ratio_slope", num(d.ratio_slope)},
                                  {"abs_sum_growth", num(d.abs_sum_growth)},
                                  {"liminf_min", num(d.liminf_min)}});
}

void run_clt(Context& c) {
  auto e = cfg::experiment_config(c.config);
  e.seed = c.seed;
  const auto r = clt::run_experiment(e);
  Csv reps({"n", "rep", "raw", "centered", "standardized"});
  for (const auto& x : r.results) reps.row(x.n, x.rep, x.raw, x.centered, x.standardized);
  c.out.write("replicates.csv", reps.str());

  Json per_n = Json::array();
  Csv qq({"n", "normal_quantile", "sample_quantile"});
  const bool testable = e.replicates >= 100;
  for (std::size_t k = 0; k < e.n_grid.size(); ++k) {
    std::vector<double> z;
    for (std::size_t i = 0; i < e.replicates; ++i) z.push_back(r.results[k * e.replicates + i].standardized);
    Json row{{"n", e.n_grid[k]},
             {"center", num(r.centers[k])},
             {"center_std_error", num(r.center_std_error[k])},
             {"analytic_center", static_cast<bool>(r.analytic_center[k])},
             {"scale", num(r.scales[k])}};
    const auto m = stats::moments(z);
    row["mean"] = num(m.mean);
    row["variance"] = num(m.variance);
    if (testable) {
      const auto t = clt::normality_tests(z);
      row["ks_distance"] = num(t.ks_distance);
      row["ks_p_value"] = num(t.ks_p_value);
      row["skewness"] = num(t.skewness);
      row["excess_kurtosis"] = num(t.excess_kurtosis);
      row["degenerate"] = t.degenerate;
      for (const auto& [a, b] : t.qq) qq.row(e.n_grid[k], a, b);
    }
    per_n.push_back(row);
  }
  Json report{{"per_n", per_n},
              {"centering_warning", r.centering_warning},
              {"ks_parameters_estimated", true},
              {"seed", c.seed}};
  if (testable && e.n_grid.size() >= 3) {
    try {
      const auto s = clt::variance_slope(r.results);
      report["variance_slope"] = Json{{"slope", num(s.slope)}, {"stderr", num(s.stderr_)},
                                      {"r_squared", num(s.r_squared)}};
    } catch (const DegenerateError& ex) {
      report["variance_slope"] = Json{{"error", ex.what()}};
    }
  }
  c.out.write("qq.csv", qq.str());
  c.out.json("report.json", report);
}

void run_longmem(Context& c) {
  const auto o = c.config.diagnostics.longmem.value_or(cfg::LongmemOptions{});
  using namespace longmem;
  switch (o.action) {
    case cfg::LongmemAction::rates: {
      Csv csv({"case", "beta", "sd_exponent", "variance_slope"});
      for (auto rc : {RateCase::clt_summable, RateCase::unit_weights, RateCase::correlation_integral,
                      RateCase::wilcoxon, RateCase::sample_covariance}) {
        try {
          const double e = rate_exponent(rc, o.beta);
          csv.row(cfg::name(rc), o.beta, e, 2.0 * e);
        } catch (const DomainError&) {
          csv.row(cfg::name(rc), o.beta, "boundary", "boundary");
        }
      }
      c.out.write("rates.csv", csv.str());
      return;
    }
    case cfg::LongmemAction::cond27: {
      const auto r = condition27_check(o.beta, o.rho, o.slowly_varying);
      c.out.json("cond27.json", Json{{"beta", o.beta},
                                     {"rho", o.rho},
                                     {"slowly_varying", io::name(o.slowly_varying)},
                                     {"exponent", r.exponent},
                                     {"boundary", r.boundary},
                                     {"converges", r.converges},
                                     {"note", r.note}});
      return;
    }
    case cfg::LongmemAction::limitvar: {
      const auto lv = limit_variance(o.beta, o.r, o.mode, o.C, 1e-8, 1 << 14, c.seed);
      Json j{{"beta", lv.beta}, {"r", lv.r},
             {"mode", lv.mode == WeightMode::constant_one ? "constant_one" : "summable_constant"},
             {"C", lv.C}, {"value", num(lv.value)}, {"error", num(lv.error)}, {"method", lv.method}};
      if (lv.cross_checked) {
        j["cross_value"] = num(lv.cross_value);
        j["cross_error"] = num(lv.cross_error);
      }
      c.out.json("limitvar.json", j);
      return;
    }
    case cfg::LongmemAction::zterm: {
      const auto* lin = std::get_if<LinearProcessSpec>(&need_process(c));
      if (!lin) throw ValidationError("longmem zterm: process.type must be linear");
      const bool cov = o.example == Example::sample_covariance;
      WeightSpec w;
      KernelSpec k;
      if (cov) {
        w.kind = WeightKind::delta;
        w.k0 = o.lag;
        k.kind = KernelKind::product;
        k.transform = Transform::square;
      } else {
        w.kind = WeightKind::constant_one;
        k.kind = KernelKind::wilcoxon;
      }
      const bool diag = !cov;
      const std::size_t lags = cov ? static_cast<std::size_t>(o.lag) : o.n - 1;
      const auto means = analytic_lag_means(k, ProcessSpec{*lin}, lags);
      if (!means) throw UnsupportedError("longmem zterm: no closed-form mean for this process");
      const double eu = clt::expected_ustat(w, *means, o.n, diag);
      std::vector<double> u(o.replicates), z(o.replicates);
      for (std::size_t r = 0; r < o.replicates; ++r) {
        const auto path = generate(ProcessSpec{*lin}, o.n, derive_stream(c.seed, r, StreamRole::path),
                                   GenerateOptions{.retain_innovations = cov});
        u[r] = compute(path, w, k, diag).value - eu;
        z[r] = cov ? z_term_covariance(*lin, path, o.lag).value : z_term_wilcoxon(*lin, path.view()).value;
      }
      Csv csv({"rep", "u_centered", "z"});
      for (std::size_t r = 0; r < o.replicates; ++r) csv.row(r, u[r], z[r]);
      c.out.write("zterm.csv", csv.str());
      c.out.json("zterm.json", Json{{"example", cov ? "sample_covariance" : "wilcoxon"},
                                    {"n", o.n},
                                    {"replicates", o.replicates},
                                    {"expected_u", num(eu)},
                                    {"correlation", num(o.replicates >= 2 ? stats::correlation(z, u) : 0.0)}});
      return;
    }
  }
}

bool known(std::string_view s) {
  for (auto k : subcommands()) {
    if (k == s) return true;
  }
  return false;
}

}  // namespace

const std::vector<std::string_view>& subcommands() {
  static const std::vector<std::string_view> v{"simulate", "ustat",   "gmc",  "delta",  "theta",
                                               "concentration", "weights", "clt", "longmem"};
  return v;
}

std::string usage() {
  std::string s = "usage: wustat <subcommand> --config PATH [--seed U64] [--out DIR] [--threads N] [--path CSV]\n";
  s += "subcommands:";
  for (auto k : subcommands()) s += " " + std::string(k);
  s += "\n";
  return s;
}

std::filesystem::path output_dir(const Options& opt, const cfg::Config& c) {
  if (opt.out) return *opt.out;
  if (const char* env = std::getenv("WUSTAT_OUT_DIR"); env && *env) return env;
  if (!c.output.dir.empty()) return c.output.dir;
  return "out";
}

std::vector<double> read_path_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ArgumentError("cannot open path file '" + p.string() + "'");
  std::vector<double> x;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str()) {
      if (first) {
        first = false;
        continue;
      }
      throw ArgumentError("path file: non-numeric row '" + line + "'");
    }
    first = false;
    x.push_back(v);
  }
  if (x.empty()) throw ArgumentError("path file has no values");
  return x;
}

int dispatch(const Options& opt, std::ostream& out, std::ostream& err) {
  if (!known(opt.subcommand)) {
    err << "unknown subcommand '" << opt.subcommand << "'\n" << usage();
    return validation_error;
  }
  try {
    if (!opt.config) throw cfg::ConfigError({"--config is required"});
    const auto config = cfg::parse_config_file(*opt.config);
    if (opt.threads > 0) set_max_threads(opt.threads);
    const std::uint64_t seed = opt.seed.value_or(config.seed());
    const std::string started = utc_now();
    Outputs files(output_dir(opt, config));
    Context c{config, opt, seed, files};
    const auto& s = opt.subcommand;
    if (s == "simulate") run_simulate(c);
    else if (s == "ustat") run_ustat(c);
    else if (s == "gmc") run_gmc(c);
    else if (s == "delta") run_delta(c);
    else if (s == "theta") run_theta(c);
    else if (s == "concentration") run_concentration(c);
    else if (s == "weights") run_weights(c);
    else if (s == "clt") run_clt(c);
    else if (s == "longmem") run_longmem(c);

    const Json manifest{{"toolkit_version", WUSTAT_VERSION},
                        {"subcommand", s},
                        {"seed", seed},
                        {"config_digest", io::sha256_hex(cfg::serialize(config))},
                        {"isa", simd::isa_name(simd::active_isa())},
                        {"started", started},
                        {"finished", utc_now()},
                        {"outputs", files.files()}};
    std::ofstream m(files.dir() / "manifest.json", std::ios::binary);
    m << manifest.dump(2) << "\n";
    if (!m) throw std::runtime_error("cannot write manifest.json");
    out << "wrote " << files.files().size() << " file(s) to " << files.dir().string() << "\n";
    return ok;
  } catch (const cfg::ConfigError& e) {
    for (const auto& msg : e.errors()) err << "config error: " << msg << "\n";
    return validation_error;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return validation_error;
  } catch (const ArgumentError& e) {
    err << "argument error: " << e.what() << "\n";
    return validation_error;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return validation_error;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << "\n";
    return validation_error;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return runtime_failure;
  }
}

}  // namespace wustat::cli
