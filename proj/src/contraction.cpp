#include "wustat/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "process_detail.hpp"
#include "wustat/errors.hpp"
#include "wustat/parallel.hpp"
#include "wustat/simd.hpp"
#include "wustat/stats.hpp"

namespace wustat {

namespace {

// Standard error of a sample standard deviation from the fourth moment.
struct SpreadEstimate {
  double sd = 0.0;
  double sd_error = 0.0;
};

SpreadEstimate spread(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double m = stats::mean(v);
  stats::CompensatedSum s2, s4;
  for (double x : v) {
    const double d = (x - m) * (x - m);
    s2.add(d);
    s4.add(d * d);
  }
  const double var = s2.value() / (n - 1.0);
  const double mu4 = s4.value() / n;
  SpreadEstimate e;
  e.sd = std::sqrt(std::max(var, 0.0));
  if (e.sd > 0.0) {
    const double var_of_var = std::max(mu4 - var * var, 0.0) / n;
    e.sd_error = std::sqrt(var_of_var) / (2.0 * e.sd);
  }
  return e;
}

std::vector<double> reversed(const std::vector<double>& a) { return {a.rbegin(), a.rend()}; }

}  // namespace

// ---------------------------------------------------------------------------
// GMC

GmcEstimate estimate_gmc(const IteratedMapSpec& spec, double alpha,
                         const std::vector<std::size_t>& horizons, std::size_t reps,
                         std::uint64_t seed) {
  validate(spec);
  if (!(alpha > 0.0)) throw ArgumentError("estimate_gmc: alpha must be positive");
  if (reps < 1000) throw ArgumentError("estimate_gmc: reps must be at least 1000");
  if (horizons.empty() || horizons.front() < 1) {
    throw ArgumentError("estimate_gmc: horizons must be non-empty and start at 1 or later");
  }
  for (std::size_t k = 1; k < horizons.size(); ++k) {
    if (horizons[k] <= horizons[k - 1]) throw ArgumentError("estimate_gmc: horizons must increase");
  }
  const std::size_t K = horizons.size();
  const std::size_t H = horizons.back();
  std::vector<double> d(reps * K);
  parallel_for(reps, [&](std::size_t r) {
    const auto pair = generate_coupled(ProcessSpec{spec}, H, CouplingMode::iid_prehistory,
                                       derive_stream(seed, r, StreamRole::path));
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t t = horizons[k] - 1;
      d[r * K + k] = std::pow(std::fabs(pair.primary.values[t] - pair.shadow.values[t]), alpha);
    }
  });

  GmcEstimate g;
  g.alpha = alpha;
  g.horizons = horizons;
  g.reps = reps;
  std::vector<double> col(reps);
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t r = 0; r < reps; ++r) col[r] = d[r * K + k];
    const auto m = stats::moments(col);
    g.moment.push_back(m.mean);
    g.std_error.push_back(std::sqrt(m.variance / static_cast<double>(reps)));
    if (m.mean > 0.0 && std::isfinite(m.mean)) {
      lx.push_back(static_cast<double>(horizons[k]));
      ly.push_back(std::log(m.mean));
    }
  }
  g.points_used = lx.size();
  if (lx.size() < 2) {
    g.degenerate = true;
    g.r_hat = std::numeric_limits<double>::quiet_NaN();
    g.C_hat = std::numeric_limits<double>::quiet_NaN();
    return g;
  }
  const auto fit = stats::line_fit(lx, ly);
  g.r_hat = std::exp(fit.slope);
  g.C_hat = std::exp(fit.intercept);
  g.log_r_stderr = fit.slope_stderr;
  return g;
}

// ---------------------------------------------------------------------------
// δ_ℓ

std::vector<std::int64_t> default_j_grid() { return {1, 2, 4, 8, 16, 32, 256}; }

DeltaCurve estimate_delta(const ProcessSpec& spec, const KernelSpec& kernel,
                          const std::vector<std::size_t>& ell_grid,
                          const std::vector<std::int64_t>& j_grid, std::size_t reps,
                          std::uint64_t seed) {
  validate(spec);
  validate(kernel);
  if (reps < 2) throw ArgumentError("estimate_delta: reps must be at least 2");
  if (ell_grid.empty() || j_grid.empty()) throw ArgumentError("estimate_delta: empty grid");
  for (auto j : j_grid) {
    if (j < 1) throw ArgumentError("estimate_delta: j grid entries must be >= 1");
  }
  const std::size_t L = ell_grid.size();
  const std::size_t Jn = j_grid.size();
  const auto J = static_cast<std::size_t>(*std::max_element(j_grid.begin(), j_grid.end()));
  const auto* lin = std::get_if<LinearProcessSpec>(&spec);
  const auto* it = std::get_if<IteratedMapSpec>(&spec);
  if (it) {
    for (auto ell : ell_grid) {
      if (ell > it->burn_in + 1) {
        throw ArgumentError("estimate_delta: ell exceeds burn_in + 1 for an iterated map");
      }
    }
  }

  // Reversed coefficient vectors: the full process and one per ℓ.
  std::vector<double> full_rev;
  std::vector<std::vector<double>> trunc_rev(L);
  std::size_t M = 0;
  if (lin) {
    M = max_lag(*lin);
    full_rev = reversed(coefficients(*lin));
    for (std::size_t l = 0; l < L; ++l) {
      if (ell_grid[l] >= 1) trunc_rev[l] = reversed(coefficients(truncate_linear(*lin, ell_grid[l])));
    }
  }

  std::vector<double> diffs(reps * L * Jn);
  parallel_for(reps, [&](std::size_t r) {
    const std::uint64_t stream = derive_stream(seed, r, StreamRole::path);
    const auto& ops = simd::active();
    double* out = diffs.data() + r * L * Jn;
    if (lin) {
      const auto e = detail::linear_innovations(*lin, J, stream);
      auto x_at = [&](const std::vector<double>& rev, std::int64_t t) {
        return ops.dot(rev.data(), e.data() + (t - 1), M + 1);
      };
      const double x1 = x_at(full_rev, 1);
      for (std::size_t l = 0; l < L; ++l) {
        const bool zero = ell_grid[l] == 0;
        const double t1 = zero ? 0.0 : x_at(trunc_rev[l], 1);
        for (std::size_t q = 0; q < Jn; ++q) {
          const double xj = x_at(full_rev, j_grid[q]);
          const double tj = zero ? 0.0 : x_at(trunc_rev[l], j_grid[q]);
          out[l * Jn + q] = eval(kernel, x1, xj) - eval(kernel, t1, tj);
        }
      }
      return;
    }
    const auto e = detail::iterated_innovations(*it, J, stream);
    const auto B = static_cast<std::int64_t>(it->burn_in);
    // ε_s lives at e[s + B − 1].
    std::vector<double> x(J + 1);
    double state = 0.0;
    for (std::int64_t s = 1 - B; s <= static_cast<std::int64_t>(J); ++s) {
      state = apply_map(*it, state, e[static_cast<std::size_t>(s + B - 1)]);
      if (s >= 1) x[static_cast<std::size_t>(s)] = state;
    }
    auto restart = [&](std::size_t ell, std::int64_t t) {
      double z = 0.0;
      for (std::int64_t s = t - static_cast<std::int64_t>(ell) + 1; s <= t; ++s) {
        z = apply_map(*it, z, e[static_cast<std::size_t>(s + B - 1)]);
      }
      return z;
    };
    for (std::size_t l = 0; l < L; ++l) {
      const double t1 = restart(ell_grid[l], 1);
      for (std::size_t q = 0; q < Jn; ++q) {
        const auto j = j_grid[q];
        const double tj = restart(ell_grid[l], j);
        out[l * Jn + q] = eval(kernel, x[1], x[static_cast<std::size_t>(j)]) - eval(kernel, t1, tj);
      }
    }
  });

  DeltaCurve c;
  c.ell = ell_grid;
  c.j_grid = j_grid;
  c.reps = reps;
  std::vector<double> col(reps);
  for (std::size_t l = 0; l < L; ++l) {
    double best = -1.0;
    double best_se = 0.0;
    std::int64_t best_j = j_grid.front();
    for (std::size_t q = 0; q < Jn; ++q) {
      for (std::size_t r = 0; r < reps; ++r) col[r] = diffs[r * L * Jn + l * Jn + q];
      const auto s = spread(col);
      if (s.sd > best) {
        best = s.sd;
        best_se = s.sd_error;
        best_j = j_grid[q];
      }
    }
    c.delta.push_back(best);
    c.std_error.push_back(best_se);
    c.argmax_j.push_back(best_j);
  }
  return c;
}

// ---------------------------------------------------------------------------
// θ_{i,j}

namespace {

// Per-outer-replicate contribution D̄² − s²/m, where D̄ and s² are the mean
// and variance of the inner differences.
double inner_contribution(std::span<const double> diff) {
  const auto m = stats::moments(diff);
  return m.mean * m.mean - m.variance / static_cast<double>(diff.size());
}

std::vector<double> theta_linear(const LinearProcessSpec& spec, const KernelSpec& kernel,
                                 std::int64_t i, std::int64_t j, std::size_t outer,
                                 std::size_t inner, std::uint64_t seed) {
  const auto M = static_cast<std::int64_t>(max_lag(spec));
  const auto a = coefficients(spec);
  const std::int64_t lo = std::min(i, j) - M;
  const std::int64_t hi = std::max<std::int64_t>({i, j, 0});
  const std::size_t hist_len = lo <= -1 ? static_cast<std::size_t>(-lo) : 0;
  const std::size_t fut_len = static_cast<std::size_t>(hi);
  auto coef = [&](std::int64_t m) { return (m >= 0 && m <= M) ? a[static_cast<std::size_t>(m)] : 0.0; };

  std::vector<double> contrib(outer);
  parallel_for(outer, [&](std::size_t o) {
    Engine outer_eng = make_engine(derive_stream(seed, o, StreamRole::history));
    InnovationSampler outer_draw(spec.innovations);
    const double eps0 = outer_draw(outer_eng);
    std::vector<double> hist(hist_len);  // hist[q] = ε_{−1−q}
    outer_draw.fill(outer_eng, hist);
    auto history_part = [&](std::int64_t t) {
      stats::CompensatedSum s;
      for (std::int64_t m = std::max<std::int64_t>(0, t + 1); m <= M; ++m) {
        const std::int64_t idx = t - m;  // <= −1
        s.add(a[static_cast<std::size_t>(m)] * hist[static_cast<std::size_t>(-1 - idx)]);
      }
      return s.value();
    };
    const double hi_part = history_part(i);
    const double hj_part = history_part(j);

    Engine inner_eng = make_engine(derive_stream(seed, o, StreamRole::inner));
    InnovationSampler inner_draw(spec.innovations);
    std::vector<double> fut(fut_len);  // fut[s − 1] = ε_s
    std::vector<double> diff(inner);
    auto future_part = [&](std::int64_t t) {
      double s = 0.0;
      for (std::int64_t m = 0; m < t; ++m) s += coef(m) * fut[static_cast<std::size_t>(t - m - 1)];
      return s;
    };
    for (std::size_t k = 0; k < inner; ++k) {
      const double eps0_new = inner_draw(inner_eng);
      inner_draw.fill(inner_eng, fut);
      const double fi = future_part(i);
      const double fj = future_part(j);
      const double xi_a = hi_part + coef(i) * eps0 + fi;
      const double xj_a = hj_part + coef(j) * eps0 + fj;
      const double xi_b = hi_part + coef(i) * eps0_new + fi;
      const double xj_b = hj_part + coef(j) * eps0_new + fj;
      diff[k] = eval(kernel, xi_a, xj_a) - eval(kernel, xi_b, xj_b);
    }
    contrib[o] = inner_contribution(diff);
  });
  return contrib;
}

std::vector<double> theta_iterated(const IteratedMapSpec& spec, const KernelSpec& kernel,
                                   std::int64_t i, std::int64_t j, std::size_t outer,
                                   std::size_t inner, std::uint64_t seed) {
  const auto B = static_cast<std::int64_t>(spec.burn_in);
  if (B < 1) throw ArgumentError("estimate_theta: iterated maps need burn_in >= 1");
  const std::int64_t lo = std::min<std::int64_t>({i, j, -1});
  if (lo < -B) throw ArgumentError("estimate_theta: index reaches before the burn-in start");
  const std::int64_t hi = std::max<std::int64_t>({i, j, 0});

  std::vector<double> contrib(outer);
  parallel_for(outer, [&](std::size_t o) {
    Engine outer_eng = make_engine(derive_stream(seed, o, StreamRole::history));
    InnovationSampler outer_draw(spec.innovations);
    const double eps0 = outer_draw(outer_eng);
    // ε_{−1}, ε_{−2}, ..., ε_{1−B}
    std::vector<double> hist(static_cast<std::size_t>(B - 1));
    outer_draw.fill(outer_eng, hist);
    // States X_lo..X_{−1}, starting from X_{−B} = 0.
    std::vector<double> past(static_cast<std::size_t>(-lo));
    double x = 0.0;
    for (std::int64_t s = 1 - B; s <= -1; ++s) {
      x = apply_map(spec, x, hist[static_cast<std::size_t>(-1 - s)]);
      if (s >= lo) past[static_cast<std::size_t>(s - lo)] = x;
    }
    const double x_minus1 = x;

    Engine inner_eng = make_engine(derive_stream(seed, o, StreamRole::inner));
    InnovationSampler inner_draw(spec.innovations);
    std::vector<double> fut(static_cast<std::size_t>(hi));
    std::vector<double> path_a(static_cast<std::size_t>(hi) + 1);
    std::vector<double> path_b(static_cast<std::size_t>(hi) + 1);
    std::vector<double> diff(inner);
    auto value = [&](const std::vector<double>& fwd, std::int64_t t) {
      return t < 0 ? past[static_cast<std::size_t>(t - lo)] : fwd[static_cast<std::size_t>(t)];
    };
    for (std::size_t k = 0; k < inner; ++k) {
      const double eps0_new = inner_draw(inner_eng);
      inner_draw.fill(inner_eng, fut);
      path_a[0] = apply_map(spec, x_minus1, eps0);
      path_b[0] = apply_map(spec, x_minus1, eps0_new);
      for (std::int64_t t = 1; t <= hi; ++t) {
        const double e = fut[static_cast<std::size_t>(t - 1)];
        path_a[static_cast<std::size_t>(t)] = apply_map(spec, path_a[static_cast<std::size_t>(t - 1)], e);
        path_b[static_cast<std::size_t>(t)] = apply_map(spec, path_b[static_cast<std::size_t>(t - 1)], e);
      }
      diff[k] = eval(kernel, value(path_a, i), value(path_a, j)) -
                eval(kernel, value(path_b, i), value(path_b, j));
    }
    contrib[o] = inner_contribution(diff);
  });
  return contrib;
}

}  // namespace

ThetaEstimate estimate_theta(const ProcessSpec& spec, const KernelSpec& kernel, std::int64_t i,
                             std::int64_t j, std::size_t outer_reps, std::size_t inner_reps,
                             std::uint64_t seed) {
  validate(spec);
  validate(kernel);
  if (inner_reps < 2) throw ArgumentError("estimate_theta: inner_reps must be at least 2");
  if (outer_reps < 2) throw ArgumentError("estimate_theta: outer_reps must be at least 2");
  std::vector<double> contrib;
  if (const auto* lin = std::get_if<LinearProcessSpec>(&spec)) {
    contrib = theta_linear(*lin, kernel, i, j, outer_reps, inner_reps, seed);
  } else {
    contrib = theta_iterated(std::get<IteratedMapSpec>(spec), kernel, i, j, outer_reps, inner_reps,
                             seed);
  }
  const auto m = stats::moments(contrib);
  ThetaEstimate t;
  t.i = i;
  t.j = j;
  t.outer_reps = outer_reps;
  t.inner_reps = inner_reps;
  t.theta_sq = m.mean;
  t.theta_sq_std_error = std::sqrt(m.variance / static_cast<double>(outer_reps));
  if (m.mean < 0.0) t.clamped = true;
  t.theta = std::sqrt(std::max(m.mean, 0.0));
  t.std_error = t.theta > 0.0 ? t.theta_sq_std_error / (2.0 * t.theta)
                              : std::sqrt(t.theta_sq_std_error);
  return t;
}

ThetaGrid estimate_theta_grid(const ProcessSpec& spec, const KernelSpec& kernel,
                              const std::vector<std::int64_t>& k_values,
                              const std::vector<std::int64_t>& i_values, std::size_t outer_reps,
                              std::size_t inner_reps, std::uint64_t seed) {
  ThetaGrid g;
  g.k_values = k_values;
  g.i_values = i_values;
  g.cells.resize(k_values.size());
  for (std::size_t a = 0; a < k_values.size(); ++a) {
    for (std::size_t b = 0; b < i_values.size(); ++b) {
      const std::uint64_t cell_seed = derive_stream(seed, a * i_values.size() + b, StreamRole::path);
      g.cells[a].push_back(estimate_theta(spec, kernel, i_values[b], i_values[b] - k_values[a],
                                          outer_reps, inner_reps, cell_seed));
    }
  }
  return g;
}

Condition3Score condition3_score(const WeightSpec& weights, const ThetaGrid& grid) {
  validate(weights);
  Condition3Score s;
  stats::CompensatedSum total;
  double var = 0.0;
  std::vector<double> per_k;
  for (std::size_t a = 0; a < grid.k_values.size(); ++a) {
    const double w = std::fabs(weight(weights, grid.k_values[a]));
    stats::CompensatedSum row;
    for (const auto& cell : grid.cells[a]) {
      row.add(w * cell.theta);
      var += w * w * cell.std_error * cell.std_error;
    }
    per_k.push_back(row.value());
    total.add(row.value());
    s.cumulative_by_k.push_back(total.value());
  }
  s.score = total.value();
  s.std_error = std::sqrt(var);
  double tail = 0.0;
  for (std::size_t a = per_k.size() / 2; a < per_k.size(); ++a) tail += per_k[a];
  s.tail_share = s.score > 0.0 ? tail / s.score : 0.0;
  if (s.score == 0.0) {
    s.note = "score is zero on the probed grid";
  } else if (s.tail_share < 0.05) {
    s.note = "partial sums settle over the probed k range";
  } else {
    s.note = "partial sums have not settled over the probed k range";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Concentration

ConcentrationProbe probe_concentration(const ProcessSpec& spec,
                                       const std::vector<std::int64_t>& j_grid,
                                       const std::vector<double>& tau_grid, std::size_t x_points,
                                       std::size_t reps, std::uint64_t seed) {
  validate(spec);
  if (j_grid.empty() || tau_grid.empty()) throw ArgumentError("probe_concentration: empty grid");
  for (double t : tau_grid) {
    if (!(t > 0.0 && t < 0.5)) throw ArgumentError("probe_concentration: tau must lie in (0, 1/2)");
  }
  for (auto j : j_grid) {
    if (j == 0) throw ArgumentError("probe_concentration: j must be nonzero");
  }
  if (x_points < 1) throw ArgumentError("probe_concentration: x_points must be positive");
  if (reps < 100) throw ArgumentError("probe_concentration: reps must be at least 100");

  const std::size_t Jn = j_grid.size();
  std::vector<std::size_t> gaps(Jn);
  for (std::size_t q = 0; q < Jn; ++q) gaps[q] = static_cast<std::size_t>(std::llabs(j_grid[q]));
  const std::size_t J = *std::max_element(gaps.begin(), gaps.end());
  const std::size_t pilot_reps = std::max<std::size_t>(1000, reps / 4);

  auto sample = [&](std::size_t count, StreamRole role) {
    std::vector<double> d(count * Jn);
    parallel_for(count, [&](std::size_t r) {
      const auto p = generate(spec, J + 1, derive_stream(seed, r, role),
                              GenerateOptions{.retain_innovations = false});
      for (std::size_t q = 0; q < Jn; ++q) d[q * count + r] = p.values[0] - p.values[gaps[q]];
    });
    for (std::size_t q = 0; q < Jn; ++q) {
      std::sort(d.begin() + static_cast<std::ptrdiff_t>(q * count),
                d.begin() + static_cast<std::ptrdiff_t>((q + 1) * count));
    }
    return d;
  };
  const auto pilot = sample(pilot_reps, StreamRole::pilot);
  const auto main = sample(reps, StreamRole::path);

  std::vector<std::vector<double>> centres(Jn);
  for (std::size_t q = 0; q < Jn; ++q) {
    std::span<const double> ps(pilot.data() + q * pilot_reps, pilot_reps);
    for (std::size_t k = 0; k < x_points; ++k) {
      centres[q].push_back(
          stats::quantile_sorted(ps, (static_cast<double>(k) + 0.5) / static_cast<double>(x_points)));
    }
  }

  ConcentrationProbe c;
  c.tau = tau_grid;
  c.j_grid = j_grid;
  c.x_points = x_points;
  c.reps = reps;
  const double n = static_cast<double>(reps);
  for (double tau : tau_grid) {
    double best = -1.0;
    std::int64_t best_j = j_grid.front();
    double best_x = 0.0;
    for (std::size_t q = 0; q < Jn; ++q) {
      const auto first = main.begin() + static_cast<std::ptrdiff_t>(q * reps);
      const auto last = first + static_cast<std::ptrdiff_t>(reps);
      for (double centre : centres[q]) {
        const double x = centre - 0.5 * tau;
        const auto below_hi = std::upper_bound(first, last, x + tau) - first;
        const auto below_lo = std::upper_bound(first, last, x) - first;
        const double p = static_cast<double>(below_hi - below_lo) / n;
        if (p > best) {
          best = p;
          best_j = j_grid[q];
          best_x = x;
        }
      }
    }
    c.sup_hat.push_back(best);
    c.std_error.push_back(std::sqrt(best * (1.0 - best) / n));
    c.argmax_j.push_back(best_j);
    c.argmax_x.push_back(best_x);
  }

  std::vector<double> lx, ly;
  std::set<double> distinct;
  for (std::size_t k = 0; k < tau_grid.size(); ++k) {
    if (c.sup_hat[k] > 0.0) {
      lx.push_back(std::log(std::log(1.0 / tau_grid[k])));
      ly.push_back(std::log(c.sup_hat[k]));
      distinct.insert(tau_grid[k]);
    }
  }
  if (distinct.size() >= 2) {
    const auto fit = stats::line_fit(lx, ly);
    c.kappa_fitted = true;
    c.kappa_hat = -fit.slope / 2.0;
    c.kappa_std_error = fit.slope_stderr / 2.0;
  }
  return c;
}

}  // namespace wustat
