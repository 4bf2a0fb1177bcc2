#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "gbdp/kolmogorov.hpp"
#include "gbdp/model.hpp"

namespace gbdp {

// psi(u) = u^{k2-1} phi(u) with phi the pgf transport coefficient; degree
// k1 + k2, u = 1 always a root. epsilon is the least strictly positive real
// root (ultimate extinction probability of the linear process).
struct ExtinctionAnalysis {
  std::vector<double> psi_coeffs;  // ascending degree 0..k1+k2
  std::vector<std::complex<double>> roots;
  std::vector<std::complex<double>> residues;  // empty when roots collide
  double epsilon = 1.0;
  bool distinct = false;
};

ExtinctionAnalysis analyze(const ModelSpec& linear_spec);

// g(u) = prod_i (u - r_i)^{-c_i}, principal branches. Real u below epsilon
// gives (numerically) real values; complex elsewhere.
std::complex<double> g_function(const ExtinctionAnalysis& analysis,
                                std::complex<double> u);

// E[exp(-theta * int_0^{Z_k} g(N(s)) ds)] via the scaled-parameter backward
// linear system, truncated with an absorbing-to-zero closure and doubled
// until the value changes by < 1e-8 (a certified lower bound). g defaults
// to 1, giving the hitting-time transform E[e^{-theta Z_k}].
double hitting_time_laplace(const ModelSpec& spec, State k, double theta,
                            const std::function<double(State)>& g_weight = {},
                            State k_max_limit = 0);

// p(0, t) from the forward solve; for k1 = k2 = 1 the closed form is also
// evaluated and must agree to 1e-6.
double transient_extinction(const ModelSpec& linear_spec, double t,
                            const SolveOptions& opts = {});

// Closed-form p(0, t) of the single-size linear process.
double lbdp_transient_extinction(double lambda, double mu, double t);

}  // namespace gbdp
