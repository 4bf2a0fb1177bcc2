#include "gbdp/numeric.hpp"

#include <cmath>
#include <limits>

#include "gbdp/errors.hpp"

namespace gbdp::num {

namespace {
constexpr double kSeriesCut = 0.5;
}

double em1_over(double x) {
  if (x == 0.0) return 1.0;
  if (std::abs(x) > kSeriesCut) return std::expm1(x) / x;
  // sum_{k>=0} x^k / (k+1)!
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= x / (k + 1);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double em1_over_sq(double x) {
  if (std::abs(x) > kSeriesCut) return (std::expm1(x) - x) / (x * x);
  // sum_{k>=0} x^k / (k+2)!
  double term = 0.5, sum = 0.5;
  for (int k = 1; k < 30; ++k) {
    term *= x / (k + 2);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double s_exp_kernel(double x) {
  if (std::abs(x) > kSeriesCut)
    return (x * std::exp(x) - std::expm1(x)) / (x * x);
  // sum_{k>=0} (k+1) x^k / (k+2)!
  double fact = 2.0, sum = 0.5;  // k = 0 term
  double xp = 1.0;
  for (int k = 1; k < 30; ++k) {
    fact *= (k + 2);
    xp *= x;
    const double term = (k + 1) * xp / fact;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double var_exp_kernel(double x) {
  if (std::abs(x) > kSeriesCut) {
    // (em1_over(2x) - em1_over(x) - x * s_exp_kernel(x)) / x^2, poles cancel
    const double num = em1_over(2.0 * x) - em1_over(x) - x * s_exp_kernel(x);
    return num / (x * x);
  }
  // sum_{k>=2} (2^k - 1 - k) x^{k-2} / (k+1)!
  double sum = 0.0, xp = 1.0, fact = 6.0, twok = 4.0;  // k = 2 values
  for (int k = 2; k < 40; ++k) {
    const double term = (twok - 1.0 - k) * xp / fact;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) && k > 4) break;
    xp *= x;
    fact *= (k + 2);
    twok *= 2.0;
  }
  return sum;
}

double poisson_pmf(long long k, double mean) {
  if (k < 0) return 0.0;
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(k) * std::log(mean) - mean -
                  std::lgamma(static_cast<double>(k) + 1.0));
}

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1 (modified Lentz).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw domain_error("gamma_p: invalid arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw domain_error("gamma_q: invalid arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_cdf(double x, double dof) {
  if (!(dof > 0.0)) throw domain_error("chi-square dof must be positive");
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_quantile(double p, double dof) {
  if (!(dof > 0.0)) throw domain_error("chi-square dof must be positive");
  if (!(p >= 0.0 && p < 1.0))
    throw domain_error("chi-square quantile needs p in [0, 1)");
  if (p == 0.0) return 0.0;
  const double a = 0.5 * dof;

  // Wilson-Hilferty starting point, then Newton on P(a, x/2) with a bisection
  // bracket as the safety net.
  double z;
  {
    // Acklam-style rational approximation of the normal quantile is overkill
    // here; a crude logistic start is enough for Newton.
    z = -std::log(4.0 * p * (1.0 - p));
    z = std::copysign(std::sqrt(std::abs(z)), p - 0.5) * 1.2;
  }
  const double wh = dof * std::pow(1.0 - 2.0 / (9.0 * dof) +
                                       z * std::sqrt(2.0 / (9.0 * dof)),
                                   3.0);
  double x = std::max(wh, 1e-290);
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const double f = gamma_p(a, 0.5 * x) - p;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    const double logpdf =
        (a - 1.0) * std::log(0.5 * x) - 0.5 * x - std::lgamma(a);
    const double deriv = 0.5 * std::exp(logpdf);  // d/dx P(a, x/2)
    double step = (deriv > 0.0) ? f / deriv : 0.0;
    double xn = x - step;
    if (!(xn > lo && (xn < hi))) {
      xn = std::isinf(hi) ? 2.0 * x : 0.5 * (lo + hi);
    }
    if (std::abs(xn - x) <= 1e-14 * std::max(1.0, std::abs(x))) {
      x = xn;
      break;
    }
    x = xn;
  }
  return x;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double fa,
                   double b, double fb, double m, double fm, double whole,
                   double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b);
  const double m = 0.5 * (a + b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, fa, b, fb, m, fm, whole, abs_tol, 48);
}

}  // namespace gbdp::num
