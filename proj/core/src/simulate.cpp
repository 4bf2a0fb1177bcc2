#include "gbdp/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "gbdp/errors.hpp"
#include "gbdp/rng.hpp"

namespace gbdp {

namespace {

State apply_event(State n, const EventDescriptor& e) {
  return e.kind == EventKind::Birth ? n + e.size : n - e.size;
}

}  // namespace

State Trajectory::state_after(std::size_t n_events) const {
  State n = initial_state;
  for (std::size_t k = 0; k < n_events && k < events.size(); ++k)
    n = apply_event(n, events[k]);
  return n;
}

State Trajectory::state_at(double t) const {
  State n = initial_state;
  for (std::size_t k = 0; k < events.size() && jump_times[k] <= t; ++k)
    n = apply_event(n, events[k]);
  return n;
}

Trajectory simulate_trajectory(const ModelSpec& spec, State n0, double horizon,
                               std::uint64_t seed) {
  if (!(horizon > 0.0)) throw domain_error("simulate: horizon must be positive");
  if (!spec.state_valid(n0)) throw domain_error("simulate: invalid initial state");

  Trajectory traj;
  traj.initial_state = n0;
  traj.horizon = horizon;
  traj.seed = seed;

  CounterRng rng(seed);
  const int k1 = spec.k1(), k2 = spec.k2();
  std::vector<double> rates(static_cast<std::size_t>(k1 + k2));

  State n = n0;
  double t = 0.0;
  for (;;) {
    double rho = 0.0;
    for (int i = 1; i <= k1; ++i) rho += (rates[i - 1] = spec.birth_rate(n, i));
    for (int j = 1; j <= k2; ++j)
      rho += (rates[k1 + j - 1] = spec.death_rate(n, j));
    if (rho <= 0.0) break;  // absorbing state

    t += rng.exponential(rho);
    if (t > horizon) break;

    const double u = rng.uniform01() * rho;
    double acc = 0.0;
    int chosen = -1, last_positive = -1;
    for (int e = 0; e < k1 + k2; ++e) {
      if (rates[e] <= 0.0) continue;
      last_positive = e;
      acc += rates[e];
      if (u < acc) {
        chosen = e;
        break;
      }
    }
    if (chosen < 0) chosen = last_positive;  // roundoff at the top edge

    EventDescriptor ev = chosen < k1
                             ? EventDescriptor{EventKind::Birth, chosen + 1}
                             : EventDescriptor{EventKind::Death, chosen - k1 + 1};
    n = apply_event(n, ev);
    traj.jump_times.push_back(t);
    traj.events.push_back(ev);
  }
  return traj;
}

PathFunctionals functionals(const Trajectory& traj, const StateWeight& g,
                            std::span<const double> query_times) {
  for (std::size_t q = 0; q < query_times.size(); ++q) {
    if (query_times[q] < 0.0 || query_times[q] > traj.horizon)
      throw domain_error("functionals: query time outside [0, horizon]");
    if (q > 0 && query_times[q] < query_times[q - 1])
      throw domain_error("functionals: query times must be nondecreasing");
  }

  PathFunctionals out;
  out.query_times.assign(query_times.begin(), query_times.end());
  out.population.reserve(query_times.size());
  out.cumulative_births.reserve(query_times.size());
  out.cumulative_deaths.reserve(query_times.size());
  out.path_integral.reserve(query_times.size());

  State n = traj.initial_state;
  double births = static_cast<double>(traj.initial_state);  // B(0) = N(0)
  double deaths = 0.0;
  double integral = 0.0;
  double t_prev = 0.0;
  std::size_t k = 0;  // next jump index

  for (double tq : query_times) {
    while (k < traj.events.size() && traj.jump_times[k] <= tq) {
      integral += g(n) * (traj.jump_times[k] - t_prev);
      t_prev = traj.jump_times[k];
      const EventDescriptor& e = traj.events[k];
      if (e.kind == EventKind::Birth)
        births += e.size;
      else
        deaths += e.size;
      n = apply_event(n, e);
      ++k;
    }
    const double x = integral + g(n) * (tq - t_prev);
    out.population.push_back(static_cast<double>(n));
    out.cumulative_births.push_back(births);
    out.cumulative_deaths.push_back(deaths);
    out.path_integral.push_back(x);
  }
  return out;
}

HittingTime hitting_time(const Trajectory& traj) {
  if (traj.initial_state == 0) return {0.0, false};
  State n = traj.initial_state;
  for (std::size_t k = 0; k < traj.events.size(); ++k) {
    n = apply_event(n, traj.events[k]);
    if (n == 0) return {traj.jump_times[k], false};
  }
  return {traj.horizon, true};
}

HittingFunctional sample_hitting_functional(const ModelSpec& spec, State k,
                                            const StateWeight& g,
                                            std::uint64_t seed,
                                            std::uint64_t max_jumps) {
  if (!spec.state_valid(k)) throw domain_error("invalid initial state");
  for (int i = 1; i <= spec.k1(); ++i) {
    if (spec.birth_rate(0, i) > 0.0)
      throw domain_error("hitting time needs state 0 absorbing (no immigration)");
  }
  if (k == 0) return {0.0, 0.0, false};

  CounterRng rng(seed);
  const int k1 = spec.k1(), k2 = spec.k2();
  std::vector<double> rates(static_cast<std::size_t>(k1 + k2));
  State n = k;
  double t = 0.0, w = 0.0;

  for (std::uint64_t jumps = 0; jumps < max_jumps; ++jumps) {
    double rho = 0.0;
    for (int i = 1; i <= k1; ++i) rho += (rates[i - 1] = spec.birth_rate(n, i));
    for (int j = 1; j <= k2; ++j)
      rho += (rates[k1 + j - 1] = spec.death_rate(n, j));
    if (rho <= 0.0) {
      // absorbed somewhere other than 0 (cannot happen for these variants)
      return {t, w, n != 0};
    }
    const double tau = rng.exponential(rho);
    w += g(n) * tau;
    t += tau;

    const double u = rng.uniform01() * rho;
    double acc = 0.0;
    int chosen = -1, last_positive = -1;
    for (int e = 0; e < k1 + k2; ++e) {
      if (rates[e] <= 0.0) continue;
      last_positive = e;
      acc += rates[e];
      if (u < acc) {
        chosen = e;
        break;
      }
    }
    if (chosen < 0) chosen = last_positive;
    n = chosen < k1 ? n + (chosen + 1) : n - (chosen - k1 + 1);
    if (n == 0) return {t, w, false};
  }
  return {t, w, true};  // jump cap hit
}

namespace {

struct Accumulator {
  // per query time: sums of the 4 functionals and of their products
  std::vector<std::array<long double, 4>> s;
  std::vector<std::array<std::array<long double, 4>, 4>> sp;

  explicit Accumulator(std::size_t q) : s(q), sp(q) {
    for (auto& a : s) a.fill(0.0L);
    for (auto& m : sp)
      for (auto& row : m) row.fill(0.0L);
  }

  void add(std::size_t q, const std::array<double, 4>& v) {
    for (int a = 0; a < 4; ++a) {
      s[q][a] += v[a];
      for (int b = a; b < 4; ++b) sp[q][a][b] += static_cast<long double>(v[a]) * v[b];
    }
  }

  void merge(const Accumulator& other) {
    for (std::size_t q = 0; q < s.size(); ++q) {
      for (int a = 0; a < 4; ++a) {
        s[q][a] += other.s[q][a];
        for (int b = a; b < 4; ++b) sp[q][a][b] += other.sp[q][a][b];
      }
    }
  }
};

}  // namespace

MonteCarloSummary monte_carlo(const ModelSpec& spec, State n0, double horizon,
                              std::size_t M, std::span<const double> times,
                              const StateWeight& path_weight,
                              std::uint64_t base_seed, int threads) {
  if (M < 2) throw domain_error("monte_carlo: need at least 2 replications");
  if (times.empty()) throw domain_error("monte_carlo: no query times");
  const StateWeight g = path_weight ? path_weight : weight_population();

  constexpr std::size_t kChunk = 256;
  const std::size_t n_chunks = (M + kChunk - 1) / kChunk;
  std::vector<Accumulator> partial(n_chunks, Accumulator(times.size()));

  auto run_chunk = [&](std::size_t c) {
    Accumulator& acc = partial[c];
    const std::size_t lo = c * kChunk, hi = std::min(M, lo + kChunk);
    for (std::size_t r = lo; r < hi; ++r) {
      Trajectory traj =
          simulate_trajectory(spec, n0, horizon, derive_stream_seed(base_seed, r));
      PathFunctionals f = functionals(traj, g, times);
      for (std::size_t q = 0; q < times.size(); ++q) {
        acc.add(q, {f.population[q], f.cumulative_births[q],
                    f.cumulative_deaths[q], f.path_integral[q]});
      }
    }
  };

  if (threads <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int nw = std::min<std::size_t>(threads, n_chunks);
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t c = next.fetch_add(1);
          if (c >= n_chunks) return;
          run_chunk(c);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // fixed-order reduction: chunk 0, 1, 2, ...
  Accumulator total(times.size());
  for (const auto& p : partial) total.merge(p);

  MonteCarloSummary out;
  out.replications = M;
  out.at.resize(times.size());
  const long double m = static_cast<long double>(M);
  for (std::size_t q = 0; q < times.size(); ++q) {
    MomentEstimates& e = out.at[q];
    e.t = times[q];
    for (int a = 0; a < 4; ++a)
      e.mean[a] = static_cast<double>(total.s[q][a] / m);
    for (int a = 0; a < 4; ++a) {
      for (int b = a; b < 4; ++b) {
        const long double cov =
            (total.sp[q][a][b] - total.s[q][a] * total.s[q][b] / m) / (m - 1.0L);
        e.covariance[a][b] = e.covariance[b][a] = static_cast<double>(cov);
      }
      e.std_error[a] = std::sqrt(std::max(0.0, e.covariance[a][a]) / M);
    }
  }
  return out;
}

}  // namespace gbdp
