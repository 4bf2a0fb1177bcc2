#include "gbdp/moments.hpp"

#include <cmath>
#include <limits>

#include "gbdp/errors.hpp"
#include "gbdp/numeric.hpp"

namespace gbdp {

namespace {

constexpr double kEtaTol = 1e-10;
const double kInf = std::numeric_limits<double>::infinity();
const double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Sums {
  double s1, s2, m1, m2, eta, zeta, xi;
};

Sums rate_sums(const ModelSpec& spec) {
  const DerivedConstants c = derived_constants(spec);
  Sums s{};
  s.eta = c.eta;
  s.zeta = c.zeta;
  s.xi = c.xi;
  s.s1 = 0;
  s.s2 = 0;
  s.m1 = 0;
  s.m2 = 0;
  for (std::size_t i = 0; i < spec.lambda().size(); ++i) {
    const double w = static_cast<double>(i + 1);
    s.s1 += w * spec.lambda()[i];
    s.s2 += w * w * spec.lambda()[i];
  }
  for (std::size_t j = 0; j < spec.mu().size(); ++j) {
    const double w = static_cast<double>(j + 1);
    s.m1 += w * spec.mu()[j];
    s.m2 += w * w * spec.mu()[j];
  }
  return s;
}

void require_linear(const ModelSpec& spec, const char* what) {
  if (spec.variant() != Variant::Linear)
    throw domain_error(std::string(what) + " needs the linear variant");
}

double corr_of(double cov, double va, double vb) {
  if (va <= 0.0 || vb <= 0.0) return kNaN;
  return cov / std::sqrt(va * vb);
}

// Moment primitives on the stable kernels; x = eta * t. These are the
// variation-of-constants solutions of the cgf moment systems, so the eta = 0
// branch is just the kernels at x = 0.
struct LinearMoments {
  double mean_n, var_n, mean_b, var_b, cov_bn, mean_d, var_d, cov_dn;
  double mean_x, var_x, cov_nx;
};

LinearMoments linear_moments(const Sums& s, double t) {
  using num::em1_over;
  using num::em1_over_sq;
  using num::s_exp_kernel;
  using num::var_exp_kernel;
  const double x = s.eta * t;
  const double ext = std::exp(x);
  const double A = em1_over(x);
  const double W = em1_over_sq(x);
  const double B = s_exp_kernel(x);
  const double V = var_exp_kernel(x);

  LinearMoments m{};
  m.mean_n = ext;
  m.var_n = s.zeta * t * ext * A;
  m.mean_b = 1.0 + s.s1 * t * A;
  m.mean_d = s.m1 * t * A;
  m.cov_bn = t * ext * (s.s2 + s.zeta * s.s1 * t * W);
  m.cov_dn = t * ext * (-s.m2 + s.zeta * s.m1 * t * W);
  m.var_b = s.s2 * t * A + 2.0 * s.s1 * s.s2 * t * t * B +
            2.0 * s.s1 * s.s1 * s.zeta * t * t * t * V;
  m.var_d = s.m2 * t * A - 2.0 * s.m1 * s.m2 * t * t * B +
            2.0 * s.m1 * s.m1 * s.zeta * t * t * t * V;
  m.mean_x = t * A;
  m.cov_nx = s.zeta * t * t * ext * W;
  m.var_x = 2.0 * s.zeta * t * t * t * V;
  return m;
}

}  // namespace

double MomentReport::at(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw domain_error("unknown moment key: " + key);
  return it->second;
}

MomentReport glbdp_moments(const ModelSpec& spec, double t) {
  require_linear(spec, "glbdp_moments");
  if (t < 0.0) throw domain_error("time must be nonnegative");
  const LinearMoments m = linear_moments(rate_sums(spec), t);
  MomentReport r;
  r.t = t;
  r.values["mean_N"] = m.mean_n;
  r.values["var_N"] = m.var_n;
  return r;
}

MomentReport birth_moments(const ModelSpec& spec, double t) {
  require_linear(spec, "birth_moments");
  if (t < 0.0) throw domain_error("time must be nonnegative");
  const LinearMoments m = linear_moments(rate_sums(spec), t);
  MomentReport r;
  r.t = t;
  r.values["mean_B"] = m.mean_b;
  r.values["var_B"] = m.var_b;
  r.values["cov_BN"] = m.cov_bn;
  r.values["corr_BN"] = corr_of(m.cov_bn, m.var_b, m.var_n);
  return r;
}

MomentReport death_moments(const ModelSpec& spec, double t) {
  require_linear(spec, "death_moments");
  if (t < 0.0) throw domain_error("time must be nonnegative");
  const LinearMoments m = linear_moments(rate_sums(spec), t);
  MomentReport r;
  r.t = t;
  r.values["mean_D"] = m.mean_d;
  r.values["var_D"] = m.var_d;
  r.values["cov_DN"] = m.cov_dn;
  r.values["corr_DN"] = corr_of(m.cov_dn, m.var_d, m.var_n);
  return r;
}

CovBirthsDeaths cov_births_deaths(const ModelSpec& spec, double t) {
  require_linear(spec, "cov_births_deaths");
  if (t < 0.0) throw domain_error("time must be nonnegative");
  const Sums s = rate_sums(spec);
  const LinearMoments m = linear_moments(s, t);

  CovBirthsDeaths out;
  out.value = 0.5 * (m.var_b + m.var_d - m.var_n);
  if (std::abs(s.eta) <= kEtaTol) {
    out.displayed = kNaN;
    out.displayed_valid = false;
    return out;
  }
  // Literal eta != 0 expression as printed (plain rate sums in the first
  // factor); coincides with the identity route for k1 = k2 = 1.
  double sum_l = 0.0, sum_m = 0.0;
  for (double l : spec.lambda()) sum_l += l;
  for (double mu : spec.mu()) sum_m += mu;
  const double e1 = std::expm1(s.eta * t);
  const double h = s.eta * t * std::exp(s.eta * t) - std::expm1(s.eta * t);
  const double eta3 = s.eta * s.eta * s.eta;
  out.displayed = s.zeta * sum_l * sum_m / eta3 * e1 * e1 -
                  s.xi / eta3 * (s.s1 + s.m1) * h;
  out.displayed_valid = true;
  return out;
}

MomentReport constant_moments(const ModelSpec& spec, double t) {
  if (spec.variant() != Variant::Constant)
    throw domain_error("constant_moments needs the constant variant");
  if (t < 0.0) throw domain_error("time must be nonnegative");
  const Sums s = rate_sums(spec);
  MomentReport r;
  r.t = t;
  r.values["mean_N"] = 1.0 + s.eta * t;
  r.values["var_N"] = s.zeta * t;
  r.values["mean_B"] = 1.0 + s.s1 * t;
  r.values["var_B"] = s.s2 * t;
  r.values["mean_D"] = s.m1 * t;
  r.values["var_D"] = s.m2 * t;
  r.values["cov_DB"] = 0.0;
  r.values["cov_BN"] = s.s2 * t;
  r.values["cov_DN"] = -s.m2 * t;
  r.values["corr_DB"] = (t > 0.0 && s.s2 > 0 && s.m2 > 0) ? 0.0 : kNaN;
  r.values["corr_BN"] = corr_of(s.s2 * t, s.s2 * t, s.zeta * t);
  r.values["corr_DN"] = corr_of(-s.m2 * t, s.m2 * t, s.zeta * t);
  return r;
}

std::array<std::array<double, 3>, 3> constant_sigma(const ModelSpec& spec,
                                                    double t) {
  if (spec.variant() != Variant::Constant)
    throw domain_error("constant_sigma needs the constant variant");
  if (t < 0.0) throw domain_error("time must be nonnegative");
  const Sums s = rate_sums(spec);
  // order (D*, B*, N*)
  return {{{s.m2 * t, 0.0, -s.m2 * t},
           {0.0, s.s2 * t, s.s2 * t},
           {-s.m2 * t, s.s2 * t, s.zeta * t}}};
}

MomentReport path_integral_moments(const ModelSpec& spec, double t) {
  require_linear(spec, "path_integral_moments");
  if (t < 0.0) throw domain_error("time must be nonnegative");
  const LinearMoments m = linear_moments(rate_sums(spec), t);
  MomentReport r;
  r.t = t;
  r.values["mean_X"] = m.mean_x;
  r.values["var_X"] = m.var_x;
  r.values["cov_NX"] = m.cov_nx;
  r.values["corr_NX"] = corr_of(m.cov_nx, m.var_n, m.var_x);
  return r;
}

MomentReport path_integral_moments_constant(const ModelSpec& spec, double t) {
  if (spec.variant() != Variant::Constant)
    throw domain_error("path_integral_moments_constant needs the constant variant");
  if (t < 0.0) throw domain_error("time must be nonnegative");
  const Sums s = rate_sums(spec);
  MomentReport r;
  r.t = t;
  r.values["mean_X"] = t + 0.5 * s.eta * t * t;
  r.values["cov_NX"] = 0.5 * s.zeta * t * t;
  r.values["var_X"] = s.zeta * t * t * t / 3.0;
  r.values["corr_NX"] =
      corr_of(r.values["cov_NX"], s.zeta * t, r.values["var_X"]);
  return r;
}

double immigration_mean(const ModelSpec& spec, double t) {
  if (spec.variant() != Variant::ImmigrationEverywhere)
    throw domain_error("closed-form immigration mean needs immigration at every state");
  if (t < 0.0) throw domain_error("time must be nonnegative");
  const Sums s = rate_sums(spec);
  const double k1 = static_cast<double>(spec.k1());
  const double c = 0.5 * k1 * (k1 + 1.0) * spec.nu();
  const double x = s.eta * t;
  // e^{eta t} + c (e^{eta t} - 1)/eta, eta = 0 branch included via the kernel
  return std::exp(x) + c * t * num::em1_over(x);
}

double immigration_mean(const ModelSpec& spec, double t,
                        const std::function<double(double)>& p0_curve,
                        double quad_tol) {
  if (spec.variant() != Variant::ImmigrationAtZero)
    throw domain_error("quadrature immigration mean needs immigration at zero");
  if (t < 0.0) throw domain_error("time must be nonnegative");
  if (!p0_curve) throw domain_error("immigration mean needs the p(0, s) curve");
  const Sums s = rate_sums(spec);
  const double k1 = static_cast<double>(spec.k1());
  const double c = 0.5 * k1 * (k1 + 1.0) * spec.nu();
  const double integral = num::adaptive_simpson(
      [&](double u) { return std::exp(-s.eta * u) * p0_curve(u); }, 0.0, t,
      quad_tol);
  return std::exp(s.eta * t) * (1.0 + c * integral);
}

ParkingMeans parking_means(const ModelSpec& spec, double t) {
  if (spec.variant() != Variant::Parking)
    throw domain_error("parking_means needs the parking variant");
  if (t < 0.0) throw domain_error("time must be nonnegative");
  const Sums s = rate_sums(spec);
  const double beta = s.s1 + s.m1;
  const double K = static_cast<double>(spec.capacity().K);
  const double x = -beta * t;

  ParkingMeans out;
  out.mean_n = K * s.s1 * t * num::em1_over(x);
  out.mean_a = K * s.s1 * t - K * s.s1 * s.s1 * t * t * num::em1_over_sq(x);
  out.mean_d = K * s.s1 * s.m1 * t * t * num::em1_over_sq(x);
  out.occupancy = (t > 0.0) ? K * s.s1 * t * num::em1_over_sq(x) : 0.0;
  return out;
}

LimitReport limit_report(const ModelSpec& spec) {
  require_linear(spec, "limit_report");
  const Sums s = rate_sums(spec);
  LimitReport r;
  if (s.eta > kEtaTol) {
    r.mean_n_limit = kInf;
    r.mean_b_limit = kInf;
  } else if (s.eta < -kEtaTol) {
    r.mean_n_limit = 0.0;
    r.mean_b_limit = -s.m1 / s.eta;
  } else {
    r.mean_n_limit = 1.0;
    r.mean_b_limit = kInf;
  }
  return r;
}

}  // namespace gbdp
