#include "gbdp/banded.hpp"

#include <algorithm>
#include <cmath>

#include "gbdp/errors.hpp"

namespace gbdp::num {

void solve_banded(BandedMatrix& A, std::vector<double>& b) {
  const int n = A.n, kl = A.kl, ku = A.ku;
  const int kv = kl + ku;  // working upper bandwidth after pivoting

  auto a = [&](int i, int j) -> double& {
    return A.data[static_cast<std::size_t>(j) * (2 * kl + ku + 1) +
                  (kl + ku + i - j)];
  };

  std::vector<int> piv(n);
  for (int k = 0; k < n; ++k) {
    // pivot search in column k, rows k..min(k+kl, n-1)
    int p = k;
    double best = std::abs(a(k, k));
    for (int i = k + 1; i <= std::min(k + kl, n - 1); ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    piv[k] = p;
    if (best == 0.0) throw numeric_error("banded solve: singular matrix");
    if (p != k) {
      for (int j = k; j <= std::min(k + kv, n - 1); ++j)
        std::swap(a(k, j), a(p, j));
      std::swap(b[k], b[p]);
    }
    for (int i = k + 1; i <= std::min(k + kl, n - 1); ++i) {
      const double m = a(i, k) / a(k, k);
      a(i, k) = m;
      for (int j = k + 1; j <= std::min(k + kv, n - 1); ++j)
        a(i, j) -= m * a(k, j);
      b[i] -= m * b[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j <= std::min(i + kv, n - 1); ++j) s -= a(i, j) * b[j];
    b[i] = s / a(i, i);
  }
}

}  // namespace gbdp::num
