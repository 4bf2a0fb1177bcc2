#include "gbdp/kolmogorov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include "gbdp/errors.hpp"
#include "gbdp/numeric.hpp"
#include "gbdp/rk45.hpp"

namespace gbdp {

namespace {

SolveOptions::Boundary resolve_boundary(const ModelSpec& spec,
                                        const SolveOptions& opts) {
  if (opts.boundary == SolveOptions::Boundary::Auto) {
    return spec.variant() == Variant::Constant ? SolveOptions::Boundary::Free
                                               : SolveOptions::Boundary::Floor;
  }
  if (opts.boundary == SolveOptions::Boundary::Free &&
      spec.variant() != Variant::Constant)
    throw domain_error("free boundary is only defined for the constant variant");
  return opts.boundary;
}

// Cached per-state rates of the truncated 1-D generator on the window
// lo..hi. The floor convention never needs lo < 0; the free constant-rate law
// tracks negative states so mass that dips below zero can climb back, exactly
// as in the compound-Poisson closed form. Flux beyond either edge is dropped
// (absorbing-deficit truncation).
struct Rates1D {
  int k1, k2;
  State lo, hi;
  std::vector<double> birth;  // (n - lo) * k1 + (i - 1)
  std::vector<double> death;
  std::vector<double> out;

  Rates1D(const ModelSpec& spec, State lo_, State hi_,
          SolveOptions::Boundary mode)
      : k1(spec.k1()), k2(spec.k2()), lo(lo_), hi(hi_) {
    const bool free_mode = mode == SolveOptions::Boundary::Free;
    const std::size_t count = static_cast<std::size_t>(hi - lo + 1);
    birth.assign(count * std::max(k1, 1), 0.0);
    death.assign(count * std::max(k2, 1), 0.0);
    out.assign(count, 0.0);
    for (State n = lo; n <= hi; ++n) {
      const std::size_t row = static_cast<std::size_t>(n - lo);
      double total = 0.0;
      for (int i = 1; i <= k1; ++i) {
        const double r = free_mode ? spec.lambda()[i - 1] : spec.birth_rate(n, i);
        birth[row * k1 + (i - 1)] = r;
        total += r;
      }
      for (int j = 1; j <= k2; ++j) {
        const double r = free_mode ? spec.mu()[j - 1] : spec.death_rate(n, j);
        death[row * k2 + (j - 1)] = r;
        total += r;
      }
      out[row] = total;
    }
  }

  std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }

  void rhs(const std::vector<double>& p, std::vector<double>& dp) const {
    for (State n = lo; n <= hi; ++n) {
      const std::size_t row = static_cast<std::size_t>(n - lo);
      double acc = -out[row] * p[row];
      for (int i = 1; i <= k1; ++i) {
        const State src = n - i;
        if (src >= lo)
          acc += birth[static_cast<std::size_t>(src - lo) * k1 + (i - 1)] *
                 p[static_cast<std::size_t>(src - lo)];
      }
      for (int j = 1; j <= k2; ++j) {
        const State src = n + j;
        if (src <= hi)
          acc += death[static_cast<std::size_t>(src - lo) * k2 + (j - 1)] *
                 p[static_cast<std::size_t>(src - lo)];
      }
      dp[row] = acc;
    }
  }
};

std::vector<double> initial_vector(const InitDistribution& init, State lo,
                                   State hi) {
  std::vector<double> p(static_cast<std::size_t>(hi - lo + 1), 0.0);
  double total = 0.0;
  for (const auto& [n, w] : init) {
    if (n < lo || n > hi) throw domain_error("initial state outside truncation");
    if (!(w >= 0.0)) throw domain_error("initial weights must be nonnegative");
    p[static_cast<std::size_t>(n - lo)] += w;
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw domain_error("initial distribution must sum to 1");
  return p;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

TruncatedPmf package_pmf(double t, const std::vector<double>& raw, State lo,
                         State hi, double clamp_tol) {
  TruncatedPmf out;
  out.t = t;
  out.probs.assign(static_cast<std::size_t>(hi) + 1, 0.0);
  double sum = 0.0;
  for (State n = lo; n <= hi; ++n) {
    double v = raw[static_cast<std::size_t>(n - lo)];
    if (v < 0.0) {
      if (v < -clamp_tol)
        throw numeric_error("state probability below clamp tolerance: " +
                            sci(v));
      v = 0.0;
    }
    if (n >= 0) {
      out.probs[static_cast<std::size_t>(n)] = v;
      sum += v;
    }
  }
  out.deficit = std::max(0.0, 1.0 - sum);
  return out;
}

struct Solve1DResult {
  std::vector<TruncatedPmf> pmfs;
  double top_edge = 0.0;     // mass in the 5 highest window states at the end
  double bottom_edge = 0.0;  // mass in the 5 lowest (free mode only)
  double window_deficit = 0.0;  // 1 - mass anywhere in the window
};

Solve1DResult solve_1d_once(const ModelSpec& spec, const InitDistribution& init,
                            std::span<const double> times, State lo, State hi,
                            SolveOptions::Boundary mode,
                            const SolveOptions& opts) {
  const Rates1D gen(spec, lo, hi, mode);
  const double clamp_tol = std::max(1e-12, 100.0 * opts.atol);
  std::vector<double> p = initial_vector(init, lo, hi);
  Solve1DResult res;
  res.pmfs.reserve(times.size());

  auto record_edges = [&](const std::vector<double>& y) {
    double top = 0.0, bottom = 0.0, all = 0.0;
    const std::size_t count = gen.size();
    for (std::size_t k = 0; k < count; ++k) all += std::max(0.0, y[k]);
    for (std::size_t k = 0; k < std::min<std::size_t>(5, count); ++k) {
      top += std::max(0.0, y[count - 1 - k]);
      bottom += std::max(0.0, y[k]);
    }
    res.top_edge = top;
    res.bottom_edge = (lo < 0) ? bottom : 0.0;
    res.window_deficit = std::max(0.0, 1.0 - all);
  };

  if (opts.backend == SolveOptions::Backend::Uniformization) {
    if (spec.max_state() < 0)
      throw domain_error("uniformization backend needs a finite chain");
    double theta = 0.0;
    for (double o : gen.out) theta = std::max(theta, o);
    theta = std::max(theta, 1e-12) * 1.000001;
    std::vector<double> v(p.size()), w(p.size());
    double t_prev = 0.0;
    for (double ti : times) {
      const double dt = ti - t_prev;
      if (dt < 0.0) throw domain_error("output times must be increasing");
      if (dt > 0.0) {
        // p(t + dt) = sum_m Poisson(theta dt, m) P^m p, P = I + Q / theta
        std::vector<double> result(p.size(), 0.0);
        v = p;
        const double rho = theta * dt;
        double weight = std::exp(-rho), cum = 0.0;
        for (long long m = 0;; ++m) {
          if (m > 0) {
            gen.rhs(v, w);
            for (std::size_t idx = 0; idx < v.size(); ++idx)
              v[idx] += w[idx] / theta;
            weight *= rho / static_cast<double>(m);
          }
          for (std::size_t idx = 0; idx < v.size(); ++idx)
            result[idx] += weight * v[idx];
          cum += weight;
          if (cum >= 1.0 - 1e-13 && m > rho) break;
          if (m > 4 * rho + 1000) break;
        }
        p = std::move(result);
      }
      t_prev = ti;
      res.pmfs.push_back(package_pmf(ti, p, lo, hi, clamp_tol));
    }
    record_edges(p);
    return res;
  }

  num::OdeOptions ode{opts.rtol, opts.atol, 0.0};
  num::integrate_rk45(
      [&gen](double, const std::vector<double>& y, std::vector<double>& dy) {
        gen.rhs(y, dy);
      },
      p, 0.0, times,
      [&](double t, const std::vector<double>& y) {
        res.pmfs.push_back(package_pmf(t, y, lo, hi, clamp_tol));
        record_edges(y);
      },
      ode);
  return res;
}

}  // namespace

std::vector<TruncatedPmf> solve_state_probabilities(
    const ModelSpec& spec, const InitDistribution& init,
    std::span<const double> times, const SolveOptions& opts) {
  if (times.empty()) throw domain_error("no output times requested");
  const auto mode = resolve_boundary(spec, opts);

  State max_init = 0;
  for (const auto& [n, w] : init) {
    if (!spec.state_valid(n)) throw domain_error("invalid initial state");
    max_init = std::max(max_init, n);
  }

  State hi;
  State lo = 0;
  if (spec.max_state() >= 0) {
    hi = spec.max_state();  // finite chain, no truncation and no deficit
  } else {
    hi = std::max<State>(opts.initial_states - 1,
                         max_init + 4 * std::max(spec.k1(), 1));
    if (mode == SolveOptions::Boundary::Free)
      lo = -std::max<State>(16, 8 * std::max(spec.k2(), 1));
  }

  for (;;) {
    auto res = solve_1d_once(spec, init, times, lo, hi, mode, opts);
    if (spec.max_state() >= 0 || opts.allow_deficit) return res.pmfs;

    const bool grow_top = res.top_edge > opts.deficit_tolerance;
    const bool grow_bottom = res.bottom_edge > opts.deficit_tolerance;
    const bool leaky = res.window_deficit > opts.deficit_tolerance;
    if (!grow_top && !grow_bottom && !leaky) return res.pmfs;

    if (grow_top || leaky) hi = 2 * hi + 1;
    if (lo < 0 && (grow_bottom || leaky)) lo = 2 * lo;
    if (hi - lo + 1 > opts.max_states)
      throw truncation_error(
          "state truncation limit reached: window [" + std::to_string(lo) +
          ", " + std::to_string(hi) +
          "] top_edge=" + sci(res.top_edge) +
          " bottom_edge=" + sci(res.bottom_edge));
  }
}

std::function<double(double)> p_zero_curve(const ModelSpec& spec, double t_max,
                                           std::size_t n_samples,
                                           const SolveOptions& opts) {
  if (!(t_max > 0.0)) throw domain_error("t_max must be positive");
  if (n_samples < 9) throw domain_error("p_zero_curve needs >= 9 samples");
  std::vector<double> times(n_samples);
  const double h = t_max / static_cast<double>(n_samples - 1);
  for (std::size_t i = 0; i < n_samples; ++i)
    times[i] = h * static_cast<double>(i);
  times.back() = t_max;

  const auto pmfs = solve_state_probabilities(spec, {{1, 1.0}}, times, opts);
  auto p0 = std::make_shared<std::vector<double>>(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) (*p0)[i] = pmfs[i].probs.at(0);

  // derivative estimates by 4th-order central differences
  auto deriv = std::make_shared<std::vector<double>>(n_samples);
  const auto& y = *p0;
  auto& dy = *deriv;
  const std::size_t m = n_samples - 1;
  for (std::size_t i = 2; i + 2 <= m; ++i)
    dy[i] = (-y[i + 2] + 8 * y[i + 1] - 8 * y[i - 1] + y[i - 2]) / (12 * h);
  dy[0] = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) / (12 * h);
  dy[1] = (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]) / (12 * h);
  dy[m] = (25 * y[m] - 48 * y[m - 1] + 36 * y[m - 2] - 16 * y[m - 3] +
           3 * y[m - 4]) / (12 * h);
  dy[m - 1] = (3 * y[m] + 10 * y[m - 1] - 18 * y[m - 2] + 6 * y[m - 3] -
               y[m - 4]) / (12 * h);

  return [p0, deriv, h, t_max](double s) {
    if (s < 0.0 || s > t_max * (1.0 + 1e-12))
      throw domain_error("p_zero_curve evaluated outside [0, t_max]");
    s = std::min(s, t_max);
    const auto& yy = *p0;
    const auto& dd = *deriv;
    std::size_t i = static_cast<std::size_t>(s / h);
    if (i >= yy.size() - 1) i = yy.size() - 2;
    const double u = (s - h * static_cast<double>(i)) / h;
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * yy[i] + (u3 - 2 * u2 + u) * h * dd[i] +
           (-2 * u3 + 3 * u2) * yy[i + 1] + (u3 - u2) * h * dd[i + 1];
  };
}

double JointPmfGrid::at_bd(State b, State d) const {
  const State bi = b - b0;
  if (bi < 0 || bi >= static_cast<State>(b_count) || d < 0 ||
      d >= static_cast<State>(d_count))
    return 0.0;
  return values[static_cast<std::size_t>(bi) * d_count +
                static_cast<std::size_t>(d)];
}

std::vector<double> JointPmfGrid::marginal_n(State n_max) const {
  std::vector<double> out(static_cast<std::size_t>(n_max + 1), 0.0);
  for (std::size_t bi = 0; bi < b_count; ++bi) {
    for (std::size_t d = 0; d < d_count; ++d) {
      const State n = b0 + static_cast<State>(bi) - static_cast<State>(d);
      if (n >= 0 && n <= n_max)
        out[static_cast<std::size_t>(n)] += values[bi * d_count + d];
    }
  }
  return out;
}

std::vector<double> JointPmfGrid::marginal_b() const {
  std::vector<double> out(b_count, 0.0);
  for (std::size_t bi = 0; bi < b_count; ++bi)
    for (std::size_t d = 0; d < d_count; ++d)
      out[bi] += values[bi * d_count + d];
  return out;
}

std::vector<double> JointPmfGrid::marginal_d() const {
  std::vector<double> out(d_count, 0.0);
  for (std::size_t bi = 0; bi < b_count; ++bi)
    for (std::size_t d = 0; d < d_count; ++d)
      out[d] += values[bi * d_count + d];
  return out;
}

JointPmfGrid::Moments JointPmfGrid::moments() const {
  double w = 0, sb = 0, sd = 0, sbb = 0, sdd = 0, sbd = 0;
  for (std::size_t bi = 0; bi < b_count; ++bi) {
    for (std::size_t d = 0; d < d_count; ++d) {
      const double p = values[bi * d_count + d];
      if (p == 0.0) continue;
      const double b = static_cast<double>(b0 + static_cast<State>(bi));
      const double dd = static_cast<double>(d);
      w += p;
      sb += p * b;
      sd += p * dd;
      sbb += p * b * b;
      sdd += p * dd * dd;
      sbd += p * b * dd;
    }
  }
  Moments m{};
  if (w <= 0.0) return m;
  const double eb = sb / w, ed = sd / w;
  m.mean_b = eb;
  m.mean_d = ed;
  m.mean_n = eb - ed;
  m.var_b = sbb / w - eb * eb;
  m.var_d = sdd / w - ed * ed;
  m.cov_db = sbd / w - eb * ed;
  m.var_n = m.var_b + m.var_d - 2.0 * m.cov_db;
  m.cov_bn = m.var_b - m.cov_db;
  m.cov_dn = m.cov_db - m.var_d;
  return m;
}

namespace {

// Shared (B, D) lattice engine.
struct JointGen {
  const ModelSpec& spec;
  SolveOptions::Boundary mode;
  State b0;
  State n_cap;
  bool negative_n;
  std::size_t bc, dc;
  int k1, k2;

  bool cell_valid(State bi, State d) const {
    if (negative_n) return true;
    const State n = b0 + bi - d;
    return n >= 0 && (n_cap < 0 || n <= n_cap);
  }

  double birth(State n, int i) const {
    return mode == SolveOptions::Boundary::Free ? spec.lambda()[i - 1]
                                                : spec.birth_rate(n, i);
  }
  double death(State n, int j) const {
    return mode == SolveOptions::Boundary::Free ? spec.mu()[j - 1]
                                                : spec.death_rate(n, j);
  }

  void rhs(const std::vector<double>& p, std::vector<double>& dp) const {
    for (std::size_t bi = 0; bi < bc; ++bi) {
      for (std::size_t d = 0; d < dc; ++d) {
        const std::size_t idx = bi * dc + d;
        if (!cell_valid(static_cast<State>(bi), static_cast<State>(d))) {
          dp[idx] = 0.0;
          continue;
        }
        const State n = b0 + static_cast<State>(bi) - static_cast<State>(d);
        double total_out = 0.0;
        for (int i = 1; i <= k1; ++i) total_out += birth(n, i);
        for (int j = 1; j <= k2; ++j) total_out += death(n, j);
        double acc = -total_out * p[idx];
        for (int i = 1; i <= k1 && static_cast<State>(bi) - i >= 0; ++i) {
          const State sbi = static_cast<State>(bi) - i;
          if (!cell_valid(sbi, static_cast<State>(d))) continue;
          acc += birth(n - i, i) * p[static_cast<std::size_t>(sbi) * dc + d];
        }
        for (int j = 1; j <= k2 && static_cast<State>(d) - j >= 0; ++j) {
          const State sd = static_cast<State>(d) - j;
          if (!cell_valid(static_cast<State>(bi), sd)) continue;
          acc += death(n + j, j) *
                 p[bi * dc + static_cast<std::size_t>(sd)];
        }
        dp[idx] = acc;
      }
    }
  }
};

std::vector<JointPmfGrid> solve_joint_lattice(const ModelSpec& spec,
                                              std::span<const double> times,
                                              const SolveOptions& opts,
                                              State b0) {
  if (times.empty()) throw domain_error("no output times requested");
  const auto mode = resolve_boundary(spec, opts);
  if (opts.backend == SolveOptions::Backend::Uniformization)
    throw domain_error("joint solves support the Runge-Kutta backend only");

  const int k1 = spec.k1(), k2 = spec.k2();
  std::size_t bc = static_cast<std::size_t>(std::max(8 * std::max(k1, 1), 16)) + 1;
  std::size_t dc = static_cast<std::size_t>(std::max(8 * std::max(k2, 1), 16)) + 1;

  for (;;) {
    JointGen gen{spec,
                 mode,
                 b0,
                 spec.max_state(),
                 mode == SolveOptions::Boundary::Free,
                 bc,
                 dc,
                 k1,
                 k2};
    std::vector<double> p(bc * dc, 0.0);
    p[0] = 1.0;  // all mass at (b0, 0)

    std::vector<JointPmfGrid> out;
    out.reserve(times.size());
    num::OdeOptions ode{opts.rtol, opts.atol, 0.0};
    num::integrate_rk45(
        [&gen](double, const std::vector<double>& y, std::vector<double>& dy) {
          gen.rhs(y, dy);
        },
        p, 0.0, times,
        [&](double t, const std::vector<double>& y) {
          JointPmfGrid g;
          g.t = t;
          g.b0 = b0;
          g.n_cap = spec.max_state();
          g.negative_n = gen.negative_n;
          g.b_count = bc;
          g.d_count = dc;
          g.values.resize(y.size());
          const double clamp_tol = std::max(1e-12, 100.0 * opts.atol);
          double sum = 0.0;
          for (std::size_t i = 0; i < y.size(); ++i) {
            double v = y[i];
            if (v < 0.0) {
              if (v < -clamp_tol)
                throw numeric_error("joint probability below clamp tolerance: " +
                                    sci(v));
              v = 0.0;
            }
            g.values[i] = v;
            sum += v;
          }
          g.deficit = std::max(0.0, 1.0 - sum);
          out.push_back(std::move(g));
        },
        ode);

    // Edge mass at the final time decides whether the window was big enough,
    // one axis at a time.
    const JointPmfGrid& last = out.back();
    double edge_b = 0.0, edge_d = 0.0;
    for (std::size_t bi = bc - std::min<std::size_t>(std::max(k1, 1), bc);
         bi < bc; ++bi)
      for (std::size_t d = 0; d < dc; ++d) edge_b += last.values[bi * dc + d];
    for (std::size_t d = dc - std::min<std::size_t>(std::max(k2, 1), dc);
         d < dc; ++d)
      for (std::size_t bi = 0; bi < bc; ++bi) edge_d += last.values[bi * dc + d];

    const bool grow_b = edge_b > opts.deficit_tolerance;
    const bool grow_d = k2 > 0 && edge_d > opts.deficit_tolerance;
    const bool leaky = last.deficit > opts.deficit_tolerance;
    if (opts.allow_deficit || (!grow_b && !grow_d && !leaky)) return out;

    if (grow_b || leaky) bc = 2 * bc - 1;
    if (k2 > 0 && (grow_d || leaky)) dc = 2 * dc - 1;
    const long long cell_limit =
        std::max<long long>(opts.max_states, 1 << 16) * 64;
    if (static_cast<long long>(bc) * static_cast<long long>(dc) > cell_limit)
      throw truncation_error("joint lattice limit reached: " +
                             std::to_string(bc) + "x" + std::to_string(dc) +
                             " edge_b=" + sci(edge_b) +
                             " edge_d=" + sci(edge_d));
  }
}

}  // namespace

std::vector<JointPmfGrid> solve_joint_birth(const ModelSpec& spec,
                                            std::span<const double> times,
                                            const SolveOptions& opts, State n0) {
  if (spec.variant() != Variant::Linear && spec.variant() != Variant::Constant)
    throw domain_error("joint solves need the linear or constant variant");
  return solve_joint_lattice(spec, times, opts, n0);
}

std::vector<JointPmfGrid> solve_joint_death(const ModelSpec& spec,
                                            std::span<const double> times,
                                            const SolveOptions& opts, State n0) {
  return solve_joint_birth(spec, times, opts, n0);
}

std::vector<JointPmfGrid> solve_joint_full(const ModelSpec& spec,
                                           std::span<const double> times,
                                           const SolveOptions& opts, State n0) {
  return solve_joint_birth(spec, times, opts, n0);
}

std::vector<JointPmfGrid> solve_parking_joint(const ModelSpec& spec,
                                              ParkingAxis,
                                              std::span<const double> times,
                                              const SolveOptions& opts) {
  if (spec.variant() != Variant::Parking)
    throw domain_error("parking joint solve needs the parking variant");
  return solve_joint_lattice(spec, times, opts, /*b0=*/0);
}

}  // namespace gbdp
