#include "gbdp/extinction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gbdp/banded.hpp"
#include "gbdp/errors.hpp"
#include "gbdp/polyroots.hpp"

namespace gbdp {

namespace {

constexpr double kImagTol = 1e-8;   // complex-root filtering threshold
constexpr double kGapTol = 1e-7;    // pairwise distinctness threshold

}  // namespace

ExtinctionAnalysis analyze(const ModelSpec& spec) {
  if (spec.variant() != Variant::Linear)
    throw domain_error("extinction analysis needs the linear variant");
  const int k1 = spec.k1(), k2 = spec.k2();
  if (k1 < 1 || k2 < 1)
    throw domain_error("extinction analysis needs births and deaths");
  if (!(spec.lambda().back() > 0.0))
    throw domain_error("degenerate leading coefficient: lambda_k1 must be positive");

  // psi(u) = sum_i lambda_i (u^{k2+i} - u^{k2}) + sum_j mu_j (u^{k2-j} - u^{k2})
  ExtinctionAnalysis out;
  out.psi_coeffs.assign(static_cast<std::size_t>(k1 + k2 + 1), 0.0);
  double lam_sum = 0.0, mu_sum = 0.0;
  for (int i = 1; i <= k1; ++i) {
    out.psi_coeffs[static_cast<std::size_t>(k2 + i)] += spec.lambda()[i - 1];
    lam_sum += spec.lambda()[i - 1];
  }
  for (int j = 1; j <= k2; ++j) {
    out.psi_coeffs[static_cast<std::size_t>(k2 - j)] += spec.mu()[j - 1];
    mu_sum += spec.mu()[j - 1];
  }
  out.psi_coeffs[static_cast<std::size_t>(k2)] -= lam_sum + mu_sum;

  out.roots = num::poly_roots(out.psi_coeffs);

  double max_coeff = 0.0;
  for (double c : out.psi_coeffs) max_coeff = std::max(max_coeff, std::abs(c));
  for (const auto& r : out.roots) {
    if (std::abs(num::poly_eval(out.psi_coeffs, r)) > 1e-8 * max_coeff)
      throw numeric_error("root refinement failed: |psi(r)| too large");
  }
  if (std::abs(num::poly_eval(out.psi_coeffs, {1.0, 0.0})) > 1e-10 * max_coeff)
    throw numeric_error("psi(1) != 0: inconsistent coefficients");

  // distinctness
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < out.roots.size(); ++a)
    for (std::size_t b = a + 1; b < out.roots.size(); ++b)
      min_gap = std::min(min_gap, std::abs(out.roots[a] - out.roots[b]));
  out.distinct = min_gap > kGapTol;

  if (out.distinct) {
    const double lead = spec.lambda().back();
    out.residues.resize(out.roots.size());
    for (std::size_t i = 0; i < out.roots.size(); ++i) {
      std::complex<double> denom = lead;
      for (std::size_t j = 0; j < out.roots.size(); ++j)
        if (j != i) denom *= (out.roots[i] - out.roots[j]);
      out.residues[i] = std::pow(out.roots[i], k2 - 1) / denom;
    }
  }

  // least strictly positive real root, clamped into (0, 1]
  double eps = std::numeric_limits<double>::infinity();
  for (const auto& r : out.roots) {
    if (std::abs(r.imag()) > kImagTol) continue;
    if (r.real() > 1e-12) eps = std::min(eps, r.real());
  }
  if (!std::isfinite(eps))
    throw numeric_error("no positive real root found for psi");
  out.epsilon = std::min(eps, 1.0);
  return out;
}

std::complex<double> g_function(const ExtinctionAnalysis& analysis,
                                std::complex<double> u) {
  if (analysis.residues.empty())
    throw domain_error("g is undefined without distinct roots");
  double scale = 1.0;
  for (const auto& r : analysis.roots) scale = std::max(scale, std::abs(r));
  std::complex<double> log_g = 0.0;
  for (std::size_t i = 0; i < analysis.roots.size(); ++i) {
    const std::complex<double> d = u - analysis.roots[i];
    if (std::abs(d) < 1e-12 * scale)
      throw singular_error("g evaluated at a root of psi");
    log_g -= analysis.residues[i] * std::log(d);
  }
  return std::exp(log_g);
}

double hitting_time_laplace(const ModelSpec& spec, State k, double theta,
                            const std::function<double(State)>& g_weight,
                            State k_max_limit) {
  if (theta < 0.0) throw domain_error("theta must be nonnegative");
  if (!spec.state_valid(k)) throw domain_error("invalid initial state");
  for (int i = 1; i <= spec.k1(); ++i)
    if (spec.birth_rate(0, i) > 0.0)
      throw domain_error("hitting time needs state 0 absorbing (no immigration)");
  if (k == 0) return 1.0;

  const std::function<double(State)> g =
      g_weight ? g_weight : [](State) { return 1.0; };
  const int k1 = spec.k1(), k2 = spec.k2();
  const State hard_limit = k_max_limit > 0 ? k_max_limit : (State{1} << 20);

  State K = std::max<State>(64, k + 16 * (k1 + k2));
  if (spec.max_state() >= 0) K = spec.max_state();
  K = std::min(K, hard_limit);

  double prev = -1.0;
  for (;;) {
    // rows k' = 1..K: (theta g(k') + rho_k') W_k' - sum_i lambda_(k')_i W_{k'+i}
    //                 - sum_j mu_(k')_j W_{k'-j} = [j = k' term] * 1
    num::BandedMatrix A(static_cast<int>(K), k2, k1);
    std::vector<double> rhs(static_cast<std::size_t>(K), 0.0);
    for (State s = 1; s <= K; ++s) {
      const int row = static_cast<int>(s) - 1;
      const double gs = g(s);
      if (!(gs > 0.0))
        throw domain_error("g weight must be positive at every reachable state");
      if (spec.total_exit_rate(s) == 0.0) {
        A.at(row, row) = 1.0;  // absorbing away from 0: never hits 0
        rhs[row] = 0.0;
        continue;
      }
      double rho = 0.0;
      for (int i = 1; i <= k1; ++i) {
        const double r = spec.birth_rate(s, i);
        rho += r;
        if (s + i <= K && r != 0.0) A.at(row, row + i) = -r;
      }
      for (int j = 1; j <= k2; ++j) {
        const double r = spec.death_rate(s, j);
        rho += r;
        if (r == 0.0) continue;
        if (s - j >= 1)
          A.at(row, row - j) = -r;
        else if (s - j == 0)
          rhs[row] += r;  // W_0 = 1
      }
      A.at(row, row) = theta * gs + rho;
    }
    num::solve_banded(A, rhs);
    const double w = rhs[static_cast<std::size_t>(k) - 1];

    if (spec.max_state() >= 0) return w;  // finite chain, no truncation
    if (prev >= 0.0 && std::abs(w - prev) < 1e-8) return w;
    if (K >= hard_limit) {
      if (prev < 0.0) return w;  // caller pinned the truncation outright
      throw truncation_error("hitting-time system did not converge by K = " +
                             std::to_string(K));
    }
    prev = w;
    K = std::min(hard_limit, 2 * K);
  }
}

double lbdp_transient_extinction(double lambda, double mu, double t) {
  if (!(lambda > 0.0) || !(mu > 0.0) || t < 0.0)
    throw domain_error("lbdp closed form needs lambda > 0, mu > 0, t >= 0");
  const double delta = lambda - mu;
  if (std::abs(delta * t) < 1e-10) {
    // lambda -> mu limit: mu t / (1 + mu t)
    return mu * t / (1.0 + mu * t);
  }
  const double e = std::expm1(-t * delta);  // e^{-t delta} - 1
  return -mu * e / (delta - mu * e);
}

double transient_extinction(const ModelSpec& spec, double t,
                            const SolveOptions& opts) {
  if (spec.variant() != Variant::Linear)
    throw domain_error("transient extinction needs the linear variant");
  if (t < 0.0) throw domain_error("time must be nonnegative");
  if (t == 0.0) return 0.0;
  // A fixed absorbing window is enough for p(0, t): mass that escapes upward
  // returns to 0 with probability at most epsilon^N. Chasing a supercritical
  // explosion with the growing truncation would never terminate.
  SolveOptions window = opts;
  window.initial_states = std::max<long long>(opts.initial_states, 1024);
  window.max_states = std::max(window.max_states, window.initial_states);
  window.allow_deficit = true;
  const double times[] = {t};
  const auto pmfs = solve_state_probabilities(spec, {{1, 1.0}}, times, window);
  const double p0 = pmfs.front().probs.at(0);
  if (spec.k1() == 1 && spec.k2() == 1 && spec.lambda()[0] > 0.0 &&
      spec.mu()[0] > 0.0) {
    const double closed = lbdp_transient_extinction(spec.lambda()[0], spec.mu()[0], t);
    if (std::abs(closed - p0) > 1e-6)
      throw numeric_error("ODE p(0,t) disagrees with the closed form: " +
                          std::to_string(p0) + " vs " + std::to_string(closed));
  }
  return p0;
}

}  // namespace gbdp
