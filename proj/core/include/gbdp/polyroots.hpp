#pragma once

#include <complex>
#include <span>
#include <vector>

namespace gbdp::num {

std::complex<double> poly_eval(std::span<const double> coeffs_ascending,
                               std::complex<double> u);

// All complex roots of a real polynomial, coefficients in ascending degree
// order, leading coefficient nonzero. Durand-Kerner iteration with a Newton
// polish; suitable for the modest degrees (k1 + k2) that arise here.
std::vector<std::complex<double>> poly_roots(
    std::span<const double> coeffs_ascending, double tol = 1e-14);

}  // namespace gbdp::num
