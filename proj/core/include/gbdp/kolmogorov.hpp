#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "gbdp/model.hpp"

namespace gbdp {

struct SolveOptions {
  double rtol = 1e-8;
  double atol = 1e-14;
  // Terminal truncation deficit and top-edge mass must fall below this, or
  // the truncation is grown and the system re-solved.
  double deficit_tolerance = 1e-9;
  long long max_states = 1 << 16;   // states (1-D) or cells (joint)
  long long initial_states = 64;
  // Accept whatever outflow the truncation produces (single solve, no growth
  // error). Used for long-horizon extinction runs where surviving mass
  // escapes upward and never returns.
  bool allow_deficit = false;

  // Floor: generator built verbatim from the model's guarded rates; mass is
  //   conserved on the nonnegative lattice and the law matches the simulator.
  // Free: constant-rate law with uniform loss Lambda at every state; flux
  //   below state 0 accumulates in the deficit. This is the law behind the
  //   compound-Poisson closed forms. Only valid for the Constant variant.
  // Auto: Free for Constant, Floor otherwise.
  enum class Boundary { Auto, Floor, Free };
  Boundary boundary = Boundary::Auto;

  enum class Backend { RungeKutta, Uniformization };
  Backend backend = Backend::RungeKutta;
};

struct TruncatedPmf {
  double t = 0.0;
  std::vector<double> probs;  // states 0..N_max
  double deficit = 0.0;       // 1 - sum(probs)
};

using InitDistribution = std::vector<std::pair<State, double>>;

// Integrates the forward system for any variant on states 0..N_max, growing
// N_max until the terminal deficit and the top-5-state mass are below
// deficit_tolerance.
std::vector<TruncatedPmf> solve_state_probabilities(
    const ModelSpec& spec, const InitDistribution& init,
    std::span<const double> times, const SolveOptions& opts = {});

// Dense p(0, s) on [0, t_max] as a cubic-Hermite interpolant over a uniform
// solve grid (piecewise error ~ h^4). Feeds the immigration-at-zero mean
// quadrature. n_samples must be >= 9.
std::function<double(double)> p_zero_curve(const ModelSpec& spec, double t_max,
                                           std::size_t n_samples = 2049,
                                           const SolveOptions& opts = {});

// Joint transient law stored on the (B, D) lattice with N = B - D derived;
// the (b, n), (d, n) and (d, b, n) views index into the same array. For the
// free constant-rate law, cells with b - d < 0 are kept (they carry the
// below-zero flux); otherwise only b - d in [0, n_cap] is populated.
struct JointPmfGrid {
  double t = 0.0;
  State b0 = 0;      // B(0)
  State n_cap = -1;  // parking K, else -1 (unbounded)
  bool negative_n = false;
  std::size_t b_count = 0, d_count = 0;
  std::vector<double> values;  // (b - b0) * d_count + d
  double deficit = 0.0;

  double at_bd(State b, State d) const;
  double at_bn(State b, State n) const { return at_bd(b, b - n); }
  double at_dn(State d, State n) const { return at_bd(n + d, d); }
  double at_dbn(State d, State b, State n) const {
    return (b - d == n) ? at_bd(b, d) : 0.0;
  }

  std::vector<double> marginal_n(State n_max) const;  // n >= 0 only
  std::vector<double> marginal_b() const;             // index 0 <-> b0
  std::vector<double> marginal_d() const;

  struct Moments {
    double mean_b, mean_d, mean_n;
    double var_b, var_d, var_n;
    double cov_bn, cov_dn, cov_db;
  };
  // First and second moments over every stored cell (for the free lattice
  // this includes the below-zero cells, matching the unrestricted law).
  Moments moments() const;
};

// (B(t), N(t)) joint solve, initial mass at (b, n) = (n0, n0).
std::vector<JointPmfGrid> solve_joint_birth(const ModelSpec& spec,
                                            std::span<const double> times,
                                            const SolveOptions& opts = {},
                                            State n0 = 1);
// (D(t), N(t)) joint solve, initial mass at (d, n) = (0, n0).
std::vector<JointPmfGrid> solve_joint_death(const ModelSpec& spec,
                                            std::span<const double> times,
                                            const SolveOptions& opts = {},
                                            State n0 = 1);
// (D(t), B(t), N(t)) joint solve; support lives on the plane b - d = n.
std::vector<JointPmfGrid> solve_joint_full(const ModelSpec& spec,
                                           std::span<const double> times,
                                           const SolveOptions& opts = {},
                                           State n0 = 1);

enum class ParkingAxis { Arrivals, Departures };

// Parking joint law; arrivals play the role of B. Both axis choices are
// views of the same (A, D) lattice solve.
std::vector<JointPmfGrid> solve_parking_joint(const ModelSpec& spec,
                                              ParkingAxis axis,
                                              std::span<const double> times,
                                              const SolveOptions& opts = {});

}  // namespace gbdp
