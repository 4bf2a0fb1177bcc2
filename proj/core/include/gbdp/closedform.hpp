#pragma once

#include <complex>
#include <cstdint>

#include "gbdp/model.hpp"

namespace gbdp {

// Lattice law of a nonnegative-integer random variable supported on
// offset..offset+weights.size()-1, with tail_bound the truncated mass.
struct LatticeLaw {
  State offset = 0;
  std::vector<double> weights;
  double tail_bound = 0.0;

  double pmf(State v) const {
    const State i = v - offset;
    if (i < 0 || i >= static_cast<State>(weights.size())) return 0.0;
    return weights[static_cast<std::size_t>(i)];
  }
};

// Law of S+ = sum_i i * Poisson(lambda_i t) (total offspring of the birth
// stream), truncated so the dropped mass is below tol.
LatticeLaw birth_stream_law(const ModelSpec& spec, double t, double tol = 1e-15);
// Law of S- = sum_j j * Poisson(mu_j t).
LatticeLaw death_stream_law(const ModelSpec& spec, double t, double tol = 1e-15);

// Pr{N*(t) = n} for the constant-rate process: 1 + S+ - S- = n, one
// progenitor. Absolute error below tol.
double constant_pmf(const ModelSpec& spec, State n, double t, double tol = 1e-12);

// Pr{D*(t) = d, B*(t) = b, N*(t) = n}: zero off the plane b - d = n, else the
// product of the independent stream laws.
double constant_joint_pmf(const ModelSpec& spec, State d, State b, State n,
                          double t, double tol = 1e-12);

double marginal_births(const ModelSpec& spec, State b, double t,
                       double tol = 1e-12);
double marginal_deaths(const ModelSpec& spec, State d, double t,
                       double tol = 1e-12);

// H*(u, t) = u exp{ (sum_i lambda_i (u^i - 1) + sum_j mu_j (u^-j - 1)) t }.
std::complex<double> pgf_constant(const ModelSpec& spec, std::complex<double> u,
                                  double t);

// U*(u, v, w, t) = v w exp{ (sum_i lambda_i ((vw)^i - 1)
//                          + sum_j mu_j ((u/w)^j - 1)) t }.
double joint_pgf_constant(const ModelSpec& spec, double u, double v, double w,
                          double t);

// Joint transform E[u^{N*(t)} v^{X*(t)}] of the population and its path
// integral, from the characteristics of the transport equation:
//   u v^t exp{ sum_i lambda_i [u^i (v^{it} - 1) / (i ln v) - t]
//            + sum_j mu_j [u^-j (v^{-jt} - 1) / (-j ln v) - t] }.
// Requires 0 < u < 1 and 0 < v < 1; v = 1 is singular (use pgf_constant).
double path_integral_pgf_constant(const ModelSpec& spec, double u, double v,
                                  double t);

}  // namespace gbdp
