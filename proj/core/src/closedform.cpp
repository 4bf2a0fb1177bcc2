#include "gbdp/closedform.hpp"

#include <algorithm>
#include <cmath>

#include "gbdp/errors.hpp"
#include "gbdp/numeric.hpp"

namespace gbdp {

namespace {

void require_constant(const ModelSpec& spec) {
  if (spec.variant() != Variant::Constant)
    throw domain_error("closed forms need the constant-rate variant");
}

// Convolves the compound law of sum_k size_k * Poisson(rate_k * t). Each
// Poisson factor is truncated once its remaining tail is below per_tol.
LatticeLaw compound_poisson(const std::vector<double>& rates, double t,
                            double per_tol) {
  LatticeLaw law;
  law.offset = 0;
  law.weights = {1.0};
  law.tail_bound = 0.0;
  for (std::size_t s = 0; s < rates.size(); ++s) {
    const double mean = rates[s] * t;
    if (mean == 0.0) continue;
    const int step = static_cast<int>(s) + 1;

    std::vector<double> pois;
    double cum = 0.0, w = std::exp(-mean);
    for (long long k = 0;; ++k) {
      if (k > 0) w *= mean / static_cast<double>(k);
      pois.push_back(w);
      cum += w;
      if (1.0 - cum < per_tol && static_cast<double>(k) >= mean) break;
      if (k > 100000)
        throw numeric_error("poisson truncation did not converge");
    }
    law.tail_bound += std::max(0.0, 1.0 - cum);

    std::vector<double> next(law.weights.size() + (pois.size() - 1) * step, 0.0);
    for (std::size_t a = 0; a < law.weights.size(); ++a) {
      if (law.weights[a] == 0.0) continue;
      for (std::size_t k = 0; k < pois.size(); ++k)
        next[a + k * step] += law.weights[a] * pois[k];
    }
    law.weights = std::move(next);
  }
  return law;
}

}  // namespace

LatticeLaw birth_stream_law(const ModelSpec& spec, double t, double tol) {
  require_constant(spec);
  if (t < 0.0) throw domain_error("time must be nonnegative");
  const int parts = std::max(1, spec.k1() + spec.k2());
  return compound_poisson(spec.lambda(), t, tol / parts);
}

LatticeLaw death_stream_law(const ModelSpec& spec, double t, double tol) {
  require_constant(spec);
  if (t < 0.0) throw domain_error("time must be nonnegative");
  const int parts = std::max(1, spec.k1() + spec.k2());
  return compound_poisson(spec.mu(), t, tol / parts);
}

double constant_pmf(const ModelSpec& spec, State n, double t, double tol) {
  require_constant(spec);
  if (t < 0.0) throw domain_error("time must be nonnegative");
  if (n < 0) return 0.0;
  const LatticeLaw up = birth_stream_law(spec, t, tol);
  const LatticeLaw down = death_stream_law(spec, t, tol);
  // Pr{1 + S+ - S- = n} = sum_d Pr{S- = d} Pr{S+ = n - 1 + d}
  double sum = 0.0;
  for (std::size_t d = 0; d < down.weights.size(); ++d) {
    const State b_needed = n - 1 + static_cast<State>(d);
    sum += down.weights[d] * up.pmf(b_needed);
  }
  return sum;
}

double constant_joint_pmf(const ModelSpec& spec, State d, State b, State n,
                          double t, double tol) {
  require_constant(spec);
  if (t < 0.0) throw domain_error("time must be nonnegative");
  if (b < 1 || d < 0 || b - d != n) return 0.0;
  const LatticeLaw up = birth_stream_law(spec, t, tol);
  const LatticeLaw down = death_stream_law(spec, t, tol);
  return down.pmf(d) * up.pmf(b - 1);
}

double marginal_births(const ModelSpec& spec, State b, double t, double tol) {
  require_constant(spec);
  if (t < 0.0) throw domain_error("time must be nonnegative");
  if (b < 1) return 0.0;  // births count the progenitor
  return birth_stream_law(spec, t, tol).pmf(b - 1);
}

double marginal_deaths(const ModelSpec& spec, State d, double t, double tol) {
  require_constant(spec);
  if (t < 0.0) throw domain_error("time must be nonnegative");
  if (d < 0) return 0.0;
  return death_stream_law(spec, t, tol).pmf(d);
}

std::complex<double> pgf_constant(const ModelSpec& spec, std::complex<double> u,
                                  double t) {
  require_constant(spec);
  if (t < 0.0) throw domain_error("time must be nonnegative");
  if (std::abs(u) == 0.0 && spec.k2() >= 1)
    throw singular_error("pgf has a pole at u = 0 when deaths are present");
  std::complex<double> expo = 0.0;
  for (int i = 1; i <= spec.k1(); ++i)
    expo += spec.lambda()[i - 1] * (std::pow(u, i) - 1.0);
  for (int j = 1; j <= spec.k2(); ++j)
    expo += spec.mu()[j - 1] * (std::pow(u, -j) - 1.0);
  return u * std::exp(expo * t);
}

double joint_pgf_constant(const ModelSpec& spec, double u, double v, double w,
                          double t) {
  require_constant(spec);
  if (t < 0.0) throw domain_error("time must be nonnegative");
  if (w == 0.0 && spec.k2() >= 1)
    throw singular_error("joint pgf has a pole at w = 0");
  double expo = 0.0;
  for (int i = 1; i <= spec.k1(); ++i)
    expo += spec.lambda()[i - 1] * (std::pow(v * w, i) - 1.0);
  for (int j = 1; j <= spec.k2(); ++j)
    expo += spec.mu()[j - 1] * (std::pow(u / w, j) - 1.0);
  return v * w * std::exp(expo * t);
}

double path_integral_pgf_constant(const ModelSpec& spec, double u, double v,
                                  double t) {
  require_constant(spec);
  if (t < 0.0) throw domain_error("time must be nonnegative");
  if (!(u > 0.0 && u < 1.0)) throw domain_error("need 0 < u < 1");
  if (!(v > 0.0 && v <= 1.0)) throw domain_error("need 0 < v < 1");
  const double lv = std::log(v);
  if (std::abs(lv) < 1e-12)
    throw singular_error("v = 1 is singular; marginalize with pgf_constant");

  // u v^t exp{ sum_i lambda_i [u^i (v^{it} - 1)/(i ln v) - t] + ... }
  double expo = 0.0;
  for (int i = 1; i <= spec.k1(); ++i) {
    const double li = spec.lambda()[i - 1];
    expo += li * (std::pow(u, i) * std::expm1(i * t * lv) / (i * lv) - t);
  }
  for (int j = 1; j <= spec.k2(); ++j) {
    const double mj = spec.mu()[j - 1];
    expo += mj * (std::pow(u, -j) * std::expm1(-j * t * lv) / (-j * lv) - t);
  }
  return u * std::pow(v, t) * std::exp(expo);
}

}  // namespace gbdp
