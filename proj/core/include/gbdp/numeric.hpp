#pragma once

#include <functional>

namespace gbdp::num {

// Exponential moment kernels used by the closed-form moment formulas. Each is
// analytic at x = 0 and evaluated by series near 0, so the eta -> 0 branch of
// every moment formula is continuous by construction.
//
//   em1_over(x)     = (e^x - 1) / x                 = int_0^1 e^{xs} ds
//   em1_over_sq(x)  = (e^x - 1 - x) / x^2           = int_0^1 (1-s) e^{xs} ds
//   s_exp_kernel(x) = (x e^x - e^x + 1) / x^2       = int_0^1 s e^{xs} ds
//   var_exp_kernel(x) = sum_{k>=2} (2^k-1-k) x^{k-2} / (k+1)!
//                     = int_0^1 s^2 e^{xs} em1_over_sq(xs) ds
double em1_over(double x);
double em1_over_sq(double x);
double s_exp_kernel(double x);
double var_exp_kernel(double x);

double poisson_pmf(long long k, double mean);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

double chi_square_cdf(double x, double dof);
// Inverse chi-square CDF, accurate to ~1e-12 relative.
double chi_square_quantile(double p, double dof);

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol);

}  // namespace gbdp::num
