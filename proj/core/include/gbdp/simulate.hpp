#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gbdp/model.hpp"

namespace gbdp {

using StateWeight = std::function<double(State)>;

inline StateWeight weight_population() {
  return [](State n) { return static_cast<double>(n); };
}
inline StateWeight weight_one() {
  return [](State) { return 1.0; };
}

// One realized sample path. Events are replayed from initial_state; the state
// after the last jump holds up to the horizon.
struct Trajectory {
  State initial_state = 0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> jump_times;
  std::vector<EventDescriptor> events;

  State state_after(std::size_t n_events) const;
  State state_at(double t) const;
};

struct PathFunctionals {
  std::vector<double> query_times;
  std::vector<double> population;         // N(t)
  std::vector<double> cumulative_births;  // B(t), B(0) = N(0)
  std::vector<double> cumulative_deaths;  // D(t)
  std::vector<double> path_integral;      // X(t) = int_0^t g(N(s)) ds
};

struct HittingTime {
  double time = 0.0;
  bool censored = false;  // never reached 0 by the horizon
};

struct HittingFunctional {
  double z = 0.0;  // first passage time to 0
  double w = 0.0;  // int_0^z g(N(s)) ds
  bool censored = false;  // jump cap exceeded before absorption
};

// Competing-exponentials simulation: one Exp(total exit rate) sojourn per
// jump, then a categorical draw proportional to the individual event rates
// (births of size 1..k1 first, then deaths of size 1..k2). Bit-for-bit
// reproducible from (spec, n0, horizon, seed).
Trajectory simulate_trajectory(const ModelSpec& spec, State n0, double horizon,
                               std::uint64_t seed);

// B/D by summing event sizes, X by exact piecewise-constant integration.
// query_times must be nondecreasing and within [0, horizon].
PathFunctionals functionals(const Trajectory& traj, const StateWeight& g,
                            std::span<const double> query_times);

// First epoch at which state 0 is entered, or censored at the horizon.
HittingTime hitting_time(const Trajectory& traj);

// Simulates from state k until absorption at 0, returning the hitting time
// and the path integral of g up to it. State 0 must be absorbing (no
// immigration). Runs exceeding max_jumps come back censored.
HittingFunctional sample_hitting_functional(const ModelSpec& spec, State k,
                                            const StateWeight& g,
                                            std::uint64_t seed,
                                            std::uint64_t max_jumps = 10'000'000);

// Sample moments of (N, B, D, X) at one query time.
struct MomentEstimates {
  static constexpr int kN = 0, kB = 1, kD = 2, kX = 3;
  double t = 0.0;
  std::array<double, 4> mean{};
  std::array<double, 4> std_error{};                 // sqrt(var / M)
  std::array<std::array<double, 4>, 4> covariance{};  // sample covariance
};

struct MonteCarloSummary {
  std::size_t replications = 0;
  std::vector<MomentEstimates> at;  // one entry per query time
};

// M independent replications with seeds derive_stream_seed(base_seed, r).
// Aggregation is chunked and merged in fixed chunk order, so results are
// identical for any worker count.
MonteCarloSummary monte_carlo(const ModelSpec& spec, State n0, double horizon,
                              std::size_t M, std::span<const double> times,
                              const StateWeight& path_weight,
                              std::uint64_t base_seed, int threads = 1);

}  // namespace gbdp
