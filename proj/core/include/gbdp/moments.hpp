#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>

#include "gbdp/model.hpp"

namespace gbdp {

// Named closed-form moments at one time. Keys follow the quantity names:
// mean_N, var_N, mean_B, var_B, cov_BN, corr_BN, mean_D, var_D, cov_DN,
// corr_DN, cov_DB, corr_DB, mean_X, var_X, cov_NX, corr_NX.
struct MomentReport {
  double t = 0.0;
  std::map<std::string, double> values;

  double at(const std::string& key) const;
};

// Population mean and variance of the linear process (one progenitor).
MomentReport glbdp_moments(const ModelSpec& spec, double t);

// Cumulative-births block: mean_B, var_B, cov_BN, corr_BN.
MomentReport birth_moments(const ModelSpec& spec, double t);

// Cumulative-deaths block: mean_D, var_D, cov_DN, corr_DN.
MomentReport death_moments(const ModelSpec& spec, double t);

// Cov(D(t), B(t)). `value` comes from the identity
// (Var B + Var D - Var N)/2, which is exact and stable for every eta;
// `displayed` evaluates the eta != 0 closed-form expression literally
// (NaN inside the eta ~ 0 band, where only the identity route exists).
struct CovBirthsDeaths {
  double value = 0.0;
  double displayed = 0.0;
  bool displayed_valid = false;
};
CovBirthsDeaths cov_births_deaths(const ModelSpec& spec, double t);

// All first/second moments of (D*, B*, N*) for the constant-rate process.
MomentReport constant_moments(const ModelSpec& spec, double t);
// Variance-covariance matrix of (D*, B*, N*), in that order.
std::array<std::array<double, 3>, 3> constant_sigma(const ModelSpec& spec,
                                                    double t);

// Path integral X(t) of the linear process: mean_X, var_X, cov_NX, corr_NX.
MomentReport path_integral_moments(const ModelSpec& spec, double t);
// Same block for the constant-rate process.
MomentReport path_integral_moments_constant(const ModelSpec& spec, double t);

// Mean population with immigration everywhere (closed form).
double immigration_mean(const ModelSpec& spec, double t);
// Mean population with immigration at zero only; needs the extinction curve
// p(0, s) on [0, t]. Quadrature tolerance is absolute.
double immigration_mean(const ModelSpec& spec, double t,
                        const std::function<double(double)>& p0_curve,
                        double quad_tol = 1e-9);

struct ParkingMeans {
  double mean_n = 0.0;    // vehicles parked
  double mean_a = 0.0;    // arrivals
  double mean_d = 0.0;    // departures
  double occupancy = 0.0; // O(t) = E[X(t)] / t
};
ParkingMeans parking_means(const ModelSpec& spec, double t);

// t -> infinity behavior of E[N] and E[B] by the sign of eta
// (limits may be infinity).
struct LimitReport {
  double mean_n_limit = 0.0;
  double mean_b_limit = 0.0;
};
LimitReport limit_report(const ModelSpec& spec);

}  // namespace gbdp
