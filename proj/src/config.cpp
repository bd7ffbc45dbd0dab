#include "wustat/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "wustat/errors.hpp"

namespace wustat::cfg {

using io::Json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& e : v) {
    if (!s.empty()) s += "; ";
    s += e;
  }
  return s;
}

template <class E, std::size_t N>
std::optional<E> lookup(std::string_view s, const E (&all)[N]) {
  for (E e : all) {
    if (io::name(e) == s) return e;
  }
  return std::nullopt;
}

constexpr InnovationLaw kLaws[] = {InnovationLaw::standard_normal, InnovationLaw::bernoulli_half,
                                   InnovationLaw::uniform_symmetric, InnovationLaw::student_t};
constexpr CoefficientRuleKind kRules[] = {CoefficientRuleKind::explicit_list,
                                          CoefficientRuleKind::geometric,
                                          CoefficientRuleKind::regvar};
constexpr SlowlyVarying kSlow[] = {SlowlyVarying::one, SlowlyVarying::log, SlowlyVarying::inv_log};
constexpr MapKind kMaps[] = {MapKind::ar1, MapKind::halving_bernoulli, MapKind::tar1,
                             MapKind::arch1};
constexpr WeightKind kWeights[] = {WeightKind::delta, WeightKind::constant_one, WeightKind::power,
                                   WeightKind::geometric, WeightKind::explicit_half};
constexpr KernelKind kKernels[] = {KernelKind::indicator_distance, KernelKind::product,
                                   KernelKind::wilcoxon, KernelKind::additive};
constexpr Transform kTransforms[] = {Transform::identity, Transform::square};

constexpr longmem::RateCase kRateCases[] = {
    longmem::RateCase::clt_summable, longmem::RateCase::unit_weights,
    longmem::RateCase::correlation_integral, longmem::RateCase::sample_covariance,
    longmem::RateCase::wilcoxon};
constexpr LongmemAction kActions[] = {LongmemAction::rates, LongmemAction::zterm,
                                      LongmemAction::limitvar, LongmemAction::cond27};

std::string_view name(longmem::Example e) {
  return e == longmem::Example::wilcoxon ? "wilcoxon" : "sample_covariance";
}
std::string_view name(longmem::WeightMode m) {
  return m == longmem::WeightMode::constant_one ? "constant_one" : "summable_constant";
}
std::string_view name(clt::CenteringMode m) {
  return m == clt::CenteringMode::analytic ? "analytic" : "monte_carlo";
}
std::string_view name(clt::RateSource s) {
  switch (s) {
    case clt::RateSource::exponent: return "exponent";
    case clt::RateSource::rate_case: return "case";
    case clt::RateSource::window_normalizer: return "window_normalizer";
  }
  return "?";
}

class Reader {
 public:
  std::vector<std::string> errors;

  void error(const std::string& path, const std::string& msg) {
    errors.push_back(path + ": " + msg);
  }

  bool is_object(const Json& j, const std::string& path) {
    if (!j.is_object()) {
      error(path, "expected an object");
      return false;
    }
    return true;
  }

  void allow(const Json& j, const std::string& path, std::initializer_list<std::string_view> keys) {
    for (const auto& [k, v] : j.items()) {
      bool ok = false;
      for (auto a : keys) ok = ok || a == k;
      if (!ok) error(path + "." + k, "unknown key");
    }
  }

  double number(const Json& j, const char* key, const std::string& path, double def) {
    if (!j.contains(key)) return def;
    const auto& v = j.at(key);
    if (!v.is_number()) {
      error(path + "." + key, "expected a number");
      return def;
    }
    return v.get<double>();
  }

  std::uint64_t unsigned_int(const Json& j, const char* key, const std::string& path,
                             std::uint64_t def) {
    if (!j.contains(key)) return def;
    const auto& v = j.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      error(path + "." + key, "expected a non-negative integer");
      return def;
    }
    return v.get<std::uint64_t>();
  }

  std::int64_t signed_int(const Json& j, const char* key, const std::string& path,
                          std::int64_t def) {
    if (!j.contains(key)) return def;
    const auto& v = j.at(key);
    if (!v.is_number_integer()) {
      error(path + "." + key, "expected an integer");
      return def;
    }
    return v.get<std::int64_t>();
  }

  bool boolean(const Json& j, const char* key, const std::string& path, bool def) {
    if (!j.contains(key)) return def;
    const auto& v = j.at(key);
    if (!v.is_boolean()) {
      error(path + "." + key, "expected true or false");
      return def;
    }
    return v.get<bool>();
  }

  std::optional<std::string> string(const Json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) return std::nullopt;
    const auto& v = j.at(key);
    if (!v.is_string()) {
      error(path + "." + key, "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  template <class E, std::size_t N>
  E choice(const Json& j, const char* key, const std::string& path, E def, const E (&all)[N],
           bool required = false) {
    const auto s = string(j, key, path);
    if (!s) {
      if (required && !j.contains(key)) error(path + "." + key, "required");
      return def;
    }
    if (auto e = lookup(*s, all)) return *e;
    std::string opts;
    for (E e : all) opts += (opts.empty() ? "" : ", ") + std::string(io::name(e));
    error(path + "." + key, "unknown value '" + *s + "' (expected one of " + opts + ")");
    return def;
  }

  std::vector<double> doubles(const Json& j, const char* key, const std::string& path,
                              std::vector<double> def) {
    if (!j.contains(key)) return def;
    const auto& v = j.at(key);
    if (!v.is_array()) {
      error(path + "." + key, "expected an array of numbers");
      return def;
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) {
        error(path + "." + key, "expected an array of numbers");
        return def;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  template <class I>
  std::vector<I> integers(const Json& j, const char* key, const std::string& path,
                          std::vector<I> def) {
    if (!j.contains(key)) return def;
    const auto& v = j.at(key);
    const char* what = std::is_signed_v<I> ? "expected an array of integers"
                                           : "expected an array of non-negative integers";
    if (!v.is_array()) {
      error(path + "." + key, what);
      return def;
    }
    std::vector<I> out;
    for (const auto& e : v) {
      const bool ok = e.is_number_integer() &&
                      (std::is_signed_v<I> || e.is_number_unsigned() || e.get<std::int64_t>() >= 0);
      if (!ok) {
        error(path + "." + key, what);
        return def;
      }
      out.push_back(e.get<I>());
    }
    return out;
  }

  // Runs a spec validator and records its message under the section name.
  template <class F>
  void check(const std::string& section, F&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      errors.push_back(section + "." + e.what());
    }
  }
};

InnovationSpec read_innovations(Reader& r, const Json& parent, const std::string& path,
                                InnovationLaw def) {
  InnovationSpec s;
  s.law = def;
  if (!parent.contains("innovations")) return s;
  const auto& j = parent.at("innovations");
  const std::string p = path + ".innovations";
  if (!r.is_object(j, p)) return s;
  r.allow(j, p, {"law", "scale", "df"});
  s.law = r.choice(j, "law", p, def, kLaws);
  s.scale = r.number(j, "scale", p, 1.0);
  s.df = r.number(j, "df", p, 0.0);
  if (s.law != InnovationLaw::student_t && j.contains("df")) r.error(p + ".df", "only for student_t");
  return s;
}

std::optional<ProcessSpec> read_process(Reader& r, const Json& j) {
  const std::string path = "process";
  if (!r.is_object(j, path)) return std::nullopt;
  const auto type = r.string(j, "type", path);
  if (!type) {
    if (!j.contains("type")) r.error(path + ".type", "required (linear or iterated)");
    return std::nullopt;
  }
  if (*type == "linear") {
    r.allow(j, path, {"type", "coefficients", "truncation", "cutoff", "innovations"});
    LinearProcessSpec s;
    if (!j.contains("coefficients")) {
      r.error(path + ".coefficients", "required");
      return std::nullopt;
    }
    const auto& c = j.at("coefficients");
    const std::string cp = path + ".coefficients";
    if (!r.is_object(c, cp)) return std::nullopt;
    s.coefficients.kind = r.choice(c, "rule", cp, CoefficientRuleKind::geometric, kRules, true);
    switch (s.coefficients.kind) {
      case CoefficientRuleKind::explicit_list:
        r.allow(c, cp, {"rule", "values"});
        s.coefficients.values = r.doubles(c, "values", cp, {});
        if (!c.contains("values")) r.error(cp + ".values", "required");
        if (j.contains("truncation")) r.error(path + ".truncation", "not used with explicit coefficients");
        break;
      case CoefficientRuleKind::geometric:
        r.allow(c, cp, {"rule", "rho"});
        s.coefficients.rho = r.number(c, "rho", cp, 0.5);
        s.truncation = 1024;
        break;
      case CoefficientRuleKind::regvar:
        r.allow(c, cp, {"rule", "beta", "slowly_varying"});
        s.coefficients.beta = r.number(c, "beta", cp, 0.75);
        s.coefficients.slowly_varying =
            r.choice(c, "slowly_varying", cp, SlowlyVarying::one, kSlow);
        s.truncation = 1 << 16;
        break;
    }
    s.truncation = r.unsigned_int(j, "truncation", path, s.truncation);
    if (j.contains("cutoff")) s.cutoff = r.unsigned_int(j, "cutoff", path, 0);
    s.innovations = read_innovations(r, j, path, InnovationLaw::standard_normal);
    r.check(path, [&] { validate(s); });
    return ProcessSpec{s};
  }
  if (*type == "iterated") {
    r.allow(j, path, {"type", "map", "innovations", "burn_in", "rho", "phi_plus", "phi_minus",
                      "a0", "a1"});
    IteratedMapSpec s;
    s.map = r.choice(j, "map", path, MapKind::ar1, kMaps, true);
    const std::initializer_list<std::pair<MapKind, const char*>> params = {
        {MapKind::ar1, "rho"},       {MapKind::tar1, "phi_plus"}, {MapKind::tar1, "phi_minus"},
        {MapKind::arch1, "a0"},      {MapKind::arch1, "a1"}};
    for (const auto& [m, key] : params) {
      if (m != s.map && j.contains(key)) r.error(path + "." + key, "not used by this map");
    }
    s.rho = r.number(j, "rho", path, s.rho);
    s.phi_plus = r.number(j, "phi_plus", path, s.phi_plus);
    s.phi_minus = r.number(j, "phi_minus", path, s.phi_minus);
    s.a0 = r.number(j, "a0", path, s.a0);
    s.a1 = r.number(j, "a1", path, s.a1);
    s.burn_in = r.unsigned_int(j, "burn_in", path, s.burn_in);
    s.innovations = read_innovations(r, j, path,
                                     s.map == MapKind::halving_bernoulli
                                         ? InnovationLaw::bernoulli_half
                                         : InnovationLaw::standard_normal);
    r.check(path, [&] { validate(s); });
    return ProcessSpec{s};
  }
  r.error(path + ".type", "unknown value '" + *type + "' (expected linear or iterated)");
  return std::nullopt;
}

std::optional<KernelSpec> read_kernel(Reader& r, const Json& j) {
  const std::string path = "kernel";
  if (!r.is_object(j, path)) return std::nullopt;
  KernelSpec s;
  s.kind = r.choice(j, "kind", path, KernelKind::additive, kKernels, true);
  switch (s.kind) {
    case KernelKind::indicator_distance:
      r.allow(j, path, {"kind", "b"});
      s.b = r.number(j, "b", path, s.b);
      break;
    case KernelKind::product:
    case KernelKind::additive:
      r.allow(j, path, {"kind", "transform"});
      s.transform = r.choice(j, "transform", path, Transform::identity, kTransforms);
      break;
    case KernelKind::wilcoxon:
      r.allow(j, path, {"kind"});
      break;
  }
  r.check(path, [&] { validate(s); });
  return s;
}

std::optional<WeightSpec> read_weights(Reader& r, const Json& j) {
  const std::string path = "weights";
  if (!r.is_object(j, path)) return std::nullopt;
  WeightSpec s;
  s.kind = r.choice(j, "kind", path, WeightKind::delta, kWeights, true);
  switch (s.kind) {
    case WeightKind::delta:
      r.allow(j, path, {"kind", "k0"});
      s.k0 = r.signed_int(j, "k0", path, 0);
      break;
    case WeightKind::constant_one:
      r.allow(j, path, {"kind"});
      break;
    case WeightKind::power:
      r.allow(j, path, {"kind", "beta_w", "c"});
      s.beta_w = r.number(j, "beta_w", path, s.beta_w);
      s.c = r.number(j, "c", path, s.c);
      break;
    case WeightKind::geometric:
      r.allow(j, path, {"kind", "q"});
      s.q = r.number(j, "q", path, s.q);
      break;
    case WeightKind::explicit_half:
      r.allow(j, path, {"kind", "values"});
      s.half = r.doubles(j, "values", path, {});
      break;
  }
  // validate() messages already start with "weights.".
  try {
    validate(s);
  } catch (const std::exception& e) {
    r.errors.emplace_back(e.what());
  }
  return s;
}

std::optional<ExperimentSection> read_experiment(Reader& r, const Json& j) {
  const std::string path = "experiment";
  if (!r.is_object(j, path)) return std::nullopt;
  r.allow(j, path, {"seed", "n_grid", "replicates", "centering", "rate", "include_diagonal"});
  ExperimentSection e;
  e.seed = r.unsigned_int(j, "seed", path, 1);
  e.n_grid = r.integers<std::size_t>(j, "n_grid", path, {});
  e.replicates = r.unsigned_int(j, "replicates", path, e.replicates);
  e.include_diagonal = r.boolean(j, "include_diagonal", path, true);
  for (std::size_t k = 0; k < e.n_grid.size(); ++k) {
    if (e.n_grid[k] < 2) r.error(path + ".n_grid", "entries must be at least 2");
    if (k > 0 && e.n_grid[k] <= e.n_grid[k - 1]) r.error(path + ".n_grid", "must be increasing");
  }
  if (e.replicates < 2) r.error(path + ".replicates", "must be at least 2");
  if (j.contains("centering")) {
    const auto& c = j.at("centering");
    const std::string cp = path + ".centering";
    if (r.is_object(c, cp)) {
      r.allow(c, cp, {"mode", "center_reps", "values"});
      const auto mode = r.string(c, "mode", cp);
      if (mode) {
        if (*mode == "analytic") {
          e.centering.mode = clt::CenteringMode::analytic;
        } else if (*mode == "monte_carlo") {
          e.centering.mode = clt::CenteringMode::monte_carlo;
        } else {
          r.error(cp + ".mode", "unknown value '" + *mode + "' (expected analytic or monte_carlo)");
        }
      }
      e.centering.center_reps = r.unsigned_int(c, "center_reps", cp, 0);
      if (e.centering.center_reps != 0 && e.centering.center_reps < 10 * e.replicates) {
        r.error(cp + ".center_reps", "must be at least 10 x replicates");
      }
      e.centering.values = r.doubles(c, "values", cp, {});
      if (!e.centering.values.empty() && e.centering.values.size() != e.n_grid.size()) {
        r.error(cp + ".values", "must have one entry per n_grid value");
      }
    }
  }
  if (j.contains("rate")) {
    const auto& c = j.at("rate");
    const std::string cp = path + ".rate";
    if (r.is_object(c, cp)) {
      r.allow(c, cp, {"source", "exponent", "case", "beta"});
      const auto src = r.string(c, "source", cp).value_or("exponent");
      if (src == "exponent") {
        e.rate.source = clt::RateSource::exponent;
        e.rate.exponent = r.number(c, "exponent", cp, 0.5);
      } else if (src == "case") {
        e.rate.source = clt::RateSource::rate_case;
        const auto cs = r.string(c, "case", cp);
        bool found = false;
        for (auto rc : kRateCases) {
          if (cs && *cs == cfg::name(rc)) {
            e.rate.rate_case = rc;
            found = true;
          }
        }
        if (!found) r.error(cp + ".case", "required: one of clt_summable, unit_weights, "
                                          "correlation_integral, sample_covariance, wilcoxon");
        e.rate.beta = r.number(c, "beta", cp, 0.0);
        if (found) {
          r.check(cp, [&] { (void)longmem::rate_exponent(e.rate.rate_case, e.rate.beta); });
        }
      } else if (src == "window_normalizer") {
        e.rate.source = clt::RateSource::window_normalizer;
      } else {
        r.error(cp + ".source", "unknown value '" + src +
                                    "' (expected exponent, case or window_normalizer)");
      }
    }
  }
  return e;
}

template <class T, class F>
std::optional<T> sub(Reader& r, const Json& j, const char* key, F&& read) {
  if (!j.contains(key)) return std::nullopt;
  const auto& s = j.at(key);
  const std::string path = std::string("diagnostics.") + key;
  if (!r.is_object(s, path)) return std::nullopt;
  T t;
  read(s, path, t);
  return t;
}

Diagnostics read_diagnostics(Reader& r, const Json& j) {
  Diagnostics d;
  if (!r.is_object(j, "diagnostics")) return d;
  r.allow(j, "diagnostics",
          {"simulate", "ustat", "gmc", "delta", "theta", "concentration", "weights", "longmem"});
  d.simulate = sub<SimulateOptions>(r, j, "simulate", [&](const Json& s, const std::string& p, auto& t) {
    r.allow(s, p, {"n", "innovations"});
    t.n = r.unsigned_int(s, "n", p, t.n);
    t.innovations = r.boolean(s, "innovations", p, t.innovations);
    if (t.n < 1) r.error(p + ".n", "must be positive");
  });
  d.ustat = sub<UstatOptions>(r, j, "ustat", [&](const Json& s, const std::string& p, auto& t) {
    r.allow(s, p, {"n", "include_diagonal"});
    t.n = r.unsigned_int(s, "n", p, t.n);
    t.include_diagonal = r.boolean(s, "include_diagonal", p, t.include_diagonal);
    if (t.n < 1) r.error(p + ".n", "must be positive");
  });
  d.gmc = sub<GmcOptions>(r, j, "gmc", [&](const Json& s, const std::string& p, auto& t) {
    r.allow(s, p, {"alpha", "horizons", "reps"});
    t.alpha = r.number(s, "alpha", p, t.alpha);
    t.horizons = r.integers<std::size_t>(s, "horizons", p, t.horizons);
    t.reps = r.unsigned_int(s, "reps", p, t.reps);
    if (!(t.alpha > 0.0)) r.error(p + ".alpha", "must be positive");
    if (t.reps < 1000) r.error(p + ".reps", "must be at least 1000");
  });
  d.delta = sub<DeltaOptions>(r, j, "delta", [&](const Json& s, const std::string& p, auto& t) {
    r.allow(s, p, {"ell_grid", "j_grid", "reps"});
    t.ell_grid = r.integers<std::size_t>(s, "ell_grid", p, t.ell_grid);
    t.j_grid = r.integers<std::int64_t>(s, "j_grid", p, t.j_grid);
    t.reps = r.unsigned_int(s, "reps", p, t.reps);
  });
  d.theta = sub<ThetaOptions>(r, j, "theta", [&](const Json& s, const std::string& p, auto& t) {
    r.allow(s, p, {"k_values", "i_values", "outer_reps", "inner_reps"});
    t.k_values = r.integers<std::int64_t>(s, "k_values", p, t.k_values);
    t.i_values = r.integers<std::int64_t>(s, "i_values", p, t.i_values);
    t.outer_reps = r.unsigned_int(s, "outer_reps", p, t.outer_reps);
    t.inner_reps = r.unsigned_int(s, "inner_reps", p, t.inner_reps);
  });
  d.concentration =
      sub<ConcentrationOptions>(r, j, "concentration", [&](const Json& s, const std::string& p, auto& t) {
        r.allow(s, p, {"j_grid", "tau_grid", "x_points", "reps"});
        t.j_grid = r.integers<std::int64_t>(s, "j_grid", p, t.j_grid);
        t.tau_grid = r.doubles(s, "tau_grid", p, t.tau_grid);
        t.x_points = r.unsigned_int(s, "x_points", p, t.x_points);
        t.reps = r.unsigned_int(s, "reps", p, t.reps);
        for (double tau : t.tau_grid) {
          if (!(tau > 0.0 && tau < 0.5)) r.error(p + ".tau_grid", "entries must lie in (0, 1/2)");
        }
      });
  d.weights = sub<WeightsOptions>(r, j, "weights", [&](const Json& s, const std::string& p, auto& t) {
    r.allow(s, p, {"n_max"});
    t.n_max = r.signed_int(s, "n_max", p, t.n_max);
    if (t.n_max < 16) r.error(p + ".n_max", "must be at least 16");
  });
  d.longmem = sub<LongmemOptions>(r, j, "longmem", [&](const Json& s, const std::string& p, auto& t) {
    r.allow(s, p, {"action", "example", "beta", "r", "mode", "C", "rho", "slowly_varying", "lag",
                   "n", "replicates"});
    const auto act = r.string(s, "action", p);
    bool found = !act;
    for (auto a : kActions) {
      if (act && *act == cfg::name(a)) {
        t.action = a;
        found = true;
      }
    }
    if (!found) r.error(p + ".action", "unknown value (expected rates, zterm, limitvar or cond27)");
    if (auto ex = r.string(s, "example", p)) {
      if (*ex == "wilcoxon") {
        t.example = longmem::Example::wilcoxon;
      } else if (*ex == "sample_covariance") {
        t.example = longmem::Example::sample_covariance;
      } else {
        r.error(p + ".example", "unknown value (expected wilcoxon or sample_covariance)");
      }
    }
    if (auto m = r.string(s, "mode", p)) {
      if (*m == "constant_one") {
        t.mode = longmem::WeightMode::constant_one;
      } else if (*m == "summable_constant") {
        t.mode = longmem::WeightMode::summable_constant;
      } else {
        r.error(p + ".mode", "unknown value (expected constant_one or summable_constant)");
      }
    }
    t.beta = r.number(s, "beta", p, t.beta);
    t.r = static_cast<int>(r.signed_int(s, "r", p, t.r));
    t.C = r.number(s, "C", p, t.C);
    t.rho = static_cast<int>(r.signed_int(s, "rho", p, t.rho));
    t.slowly_varying = r.choice(s, "slowly_varying", p, t.slowly_varying, kSlow);
    t.lag = r.signed_int(s, "lag", p, t.lag);
    t.n = r.unsigned_int(s, "n", p, t.n);
    t.replicates = r.unsigned_int(s, "replicates", p, t.replicates);
    if (!(t.beta > 0.5 && t.beta < 1.0)) r.error(p + ".beta", "must lie in (1/2, 1)");
    if (t.r < 1) r.error(p + ".r", "must be positive");
    if (t.rho < 1) r.error(p + ".rho", "must be positive");
  });
  return d;
}

Json parse_json(std::string_view text) {
  std::vector<std::set<std::string>> seen;
  std::vector<std::string> dups;
  Json::parser_callback_t cb = [&](int, Json::parse_event_t ev, Json& parsed) {
    switch (ev) {
      case Json::parse_event_t::object_start:
        seen.emplace_back();
        break;
      case Json::parse_event_t::object_end:
        if (!seen.empty()) seen.pop_back();
        break;
      case Json::parse_event_t::key: {
        const auto k = parsed.get<std::string>();
        if (!seen.empty() && !seen.back().insert(k).second) dups.push_back(k);
        break;
      }
      default:
        break;
    }
    return true;
  };
  Json j;
  try {
    j = Json::parse(text.begin(), text.end(), cb);
  } catch (const Json::parse_error& e) {
    throw ConfigError({std::string("syntax: ") + e.what()});
  }
  if (!dups.empty()) {
    std::vector<std::string> errs;
    for (const auto& k : dups) errs.push_back("duplicate key '" + k + "'");
    throw ConfigError(errs);
  }
  return j;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

Config parse_config(std::string_view text) {
  const Json j = parse_json(text);
  Reader r;
  Config c;
  if (!j.is_object()) throw ConfigError({"top level: expected an object"});
  r.allow(j, "top level", {"process", "kernel", "weights", "experiment", "diagnostics", "output"});
  if (j.contains("process")) c.process = read_process(r, j.at("process"));
  if (j.contains("kernel")) c.kernel = read_kernel(r, j.at("kernel"));
  if (j.contains("weights")) c.weights = read_weights(r, j.at("weights"));
  if (j.contains("experiment")) c.experiment = read_experiment(r, j.at("experiment"));
  if (j.contains("diagnostics")) c.diagnostics = read_diagnostics(r, j.at("diagnostics"));
  if (j.contains("output") && r.is_object(j.at("output"), "output")) {
    r.allow(j.at("output"), "output", {"dir"});
    c.output.dir = r.string(j.at("output"), "dir", "output").value_or("");
  }
  if (!r.errors.empty()) throw ConfigError(r.errors);
  return c;
}

Config parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot open config file '" + path.string() + "'"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Json to_json(const Config& c) {
  Json j = Json::object();
  if (c.process) j["process"] = io::to_json(*c.process);
  if (c.kernel) j["kernel"] = io::to_json(*c.kernel);
  if (c.weights) j["weights"] = io::to_json(*c.weights);
  if (c.experiment) {
    const auto& e = *c.experiment;
    Json rate{{"source", name(e.rate.source)}};
    if (e.rate.source == clt::RateSource::exponent) rate["exponent"] = e.rate.exponent;
    if (e.rate.source == clt::RateSource::rate_case) {
      rate["case"] = name(e.rate.rate_case);
      rate["beta"] = e.rate.beta;
    }
    Json centering{{"mode", name(e.centering.mode)}, {"center_reps", e.centering.center_reps}};
    if (!e.centering.values.empty()) centering["values"] = e.centering.values;
    j["experiment"] = Json{{"seed", e.seed},
                           {"n_grid", e.n_grid},
                           {"replicates", e.replicates},
                           {"include_diagonal", e.include_diagonal},
                           {"centering", centering},
                           {"rate", rate}};
  }
  Json d = Json::object();
  const auto& g = c.diagnostics;
  if (g.simulate) d["simulate"] = Json{{"n", g.simulate->n}, {"innovations", g.simulate->innovations}};
  if (g.ustat) d["ustat"] = Json{{"n", g.ustat->n}, {"include_diagonal", g.ustat->include_diagonal}};
  if (g.gmc) {
    d["gmc"] = Json{{"alpha", g.gmc->alpha}, {"horizons", g.gmc->horizons}, {"reps", g.gmc->reps}};
  }
  if (g.delta) {
    d["delta"] = Json{{"ell_grid", g.delta->ell_grid}, {"j_grid", g.delta->j_grid},
                      {"reps", g.delta->reps}};
  }
  if (g.theta) {
    d["theta"] = Json{{"k_values", g.theta->k_values}, {"i_values", g.theta->i_values},
                      {"outer_reps", g.theta->outer_reps}, {"inner_reps", g.theta->inner_reps}};
  }
  if (g.concentration) {
    d["concentration"] = Json{{"j_grid", g.concentration->j_grid},
                              {"tau_grid", g.concentration->tau_grid},
                              {"x_points", g.concentration->x_points},
                              {"reps", g.concentration->reps}};
  }
  if (g.weights) d["weights"] = Json{{"n_max", g.weights->n_max}};
  if (g.longmem) {
    const auto& l = *g.longmem;
    d["longmem"] = Json{{"action", name(l.action)},
                        {"example", name(l.example)},
                        {"beta", l.beta},
                        {"r", l.r},
                        {"mode", name(l.mode)},
                        {"C", l.C},
                        {"rho", l.rho},
                        {"slowly_varying", io::name(l.slowly_varying)},
                        {"lag", l.lag},
                        {"n", l.n},
                        {"replicates", l.replicates}};
  }
  if (!d.empty()) j["diagnostics"] = d;
  if (!c.output.dir.empty()) j["output"] = Json{{"dir", c.output.dir}};
  return j;
}

std::string serialize(const Config& c) { return to_json(c).dump(2) + "\n"; }

clt::ExperimentConfig experiment_config(const Config& c) {
  std::vector<std::string> missing;
  if (!c.process) missing.push_back("process: section required");
  if (!c.kernel) missing.push_back("kernel: section required");
  if (!c.weights) missing.push_back("weights: section required");
  if (!c.experiment) {
    missing.push_back("experiment: section required");
  } else if (c.experiment->n_grid.empty()) {
    missing.push_back("experiment.n_grid: required");
  }
  if (!missing.empty()) throw ConfigError(missing);
  clt::ExperimentConfig e;
  e.process = *c.process;
  e.kernel = *c.kernel;
  e.weights = *c.weights;
  e.n_grid = c.experiment->n_grid;
  e.replicates = c.experiment->replicates;
  e.centering = c.experiment->centering;
  e.rate = c.experiment->rate;
  e.include_diagonal = c.experiment->include_diagonal;
  e.seed = c.experiment->seed;
  return e;
}

std::string_view name(LongmemAction a) noexcept {
  switch (a) {
    case LongmemAction::rates: return "rates";
    case LongmemAction::zterm: return "zterm";
    case LongmemAction::limitvar: return "limitvar";
    case LongmemAction::cond27: return "cond27";
  }
  return "?";
}

std::string_view name(longmem::RateCase c) noexcept {
  switch (c) {
    case longmem::RateCase::clt_summable: return "clt_summable";
    case longmem::RateCase::unit_weights: return "unit_weights";
    case longmem::RateCase::correlation_integral: return "correlation_integral";
    case longmem::RateCase::sample_covariance: return "sample_covariance";
    case longmem::RateCase::wilcoxon: return "wilcoxon";
  }
  return "?";
}

}  // namespace wustat::cfg
