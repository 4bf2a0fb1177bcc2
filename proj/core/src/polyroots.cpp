#include "gbdp/polyroots.hpp"

#include <algorithm>
#include <cmath>

#include "gbdp/errors.hpp"

namespace gbdp::num {

std::complex<double> poly_eval(std::span<const double> c,
                               std::complex<double> u) {
  std::complex<double> v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * u + c[k];
  return v;
}

namespace {

std::complex<double> poly_eval_c(const std::vector<std::complex<double>>& c,
                                 std::complex<double> u) {
  std::complex<double> v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * u + c[k];
  return v;
}

}  // namespace

std::vector<std::complex<double>> poly_roots(std::span<const double> coeffs,
                                             double tol) {
  // strip trailing zero coefficients (they would make the leading term vanish)
  std::size_t deg_end = coeffs.size();
  while (deg_end > 0 && coeffs[deg_end - 1] == 0.0) --deg_end;
  if (deg_end < 2) throw domain_error("poly_roots: degree must be >= 1");
  const std::size_t deg = deg_end - 1;

  // factor out roots at zero
  std::size_t zero_roots = 0;
  while (zero_roots < deg && coeffs[zero_roots] == 0.0) ++zero_roots;

  const double lead = coeffs[deg_end - 1];
  std::vector<std::complex<double>> monic(deg - zero_roots + 1);
  for (std::size_t k = zero_roots; k < deg_end; ++k)
    monic[k - zero_roots] = coeffs[k] / lead;

  const std::size_t m = monic.size() - 1;  // remaining degree
  std::vector<std::complex<double>> r(m);
  // radius heuristic from the coefficient magnitudes
  double radius = 0.0;
  for (std::size_t k = 0; k < m; ++k)
    radius = std::max(radius, std::pow(std::abs(monic[k]), 1.0 / (m - k)));
  radius = std::max(0.5, 1.2 * radius);
  const std::complex<double> seed(0.4, 0.9);  // not a root of unity
  std::complex<double> p = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    p *= seed;
    r[i] = radius * p;
  }

  for (int iter = 0; iter < 1000; ++iter) {
    double moved = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      std::complex<double> denom = 1.0;
      for (std::size_t j = 0; j < m; ++j)
        if (j != i) denom *= (r[i] - r[j]);
      const std::complex<double> delta = poly_eval_c(monic, r[i]) / denom;
      r[i] -= delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < tol * std::max(1.0, radius)) break;
  }

  // Newton polish against the original (non-deflated) scaled polynomial
  std::vector<std::complex<double>> dmonic(m);
  for (std::size_t k = 1; k <= m; ++k)
    dmonic[k - 1] = monic[k] * static_cast<double>(k);
  for (auto& root : r) {
    for (int it = 0; it < 4; ++it) {
      const std::complex<double> f = poly_eval_c(monic, root);
      const std::complex<double> df = poly_eval_c(dmonic, root);
      if (std::abs(df) == 0.0) break;
      root -= f / df;
    }
    if (std::abs(root.imag()) < 1e-13 * std::max(1.0, std::abs(root.real())))
      root = {root.real(), 0.0};
  }

  std::vector<std::complex<double>> out;
  out.reserve(deg);
  for (std::size_t i = 0; i < zero_roots; ++i) out.emplace_back(0.0, 0.0);
  out.insert(out.end(), r.begin(), r.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

}  // namespace gbdp::num
