#pragma once

#include <vector>

namespace gbdp::num {

// Band matrix in LAPACK-style storage with room for partial-pivot fill-in.
// Rows are 0..n-1; entry (i, j) is valid for j - ku <= i <= j + kl.
struct BandedMatrix {
  int n;
  int kl;
  int ku;
  std::vector<double> data;  // (2*kl + ku + 1) x n, column-major bands

  BandedMatrix(int n_, int kl_, int ku_)
      : n(n_), kl(kl_), ku(ku_), data(static_cast<std::size_t>(2 * kl_ + ku_ + 1) * n_, 0.0) {}

  double& at(int i, int j) {
    return data[static_cast<std::size_t>(j) * (2 * kl + ku + 1) +
                (kl + ku + i - j)];
  }
};

// Solves A x = b in place (b becomes x) by banded LU with partial pivoting.
// A is destroyed.
void solve_banded(BandedMatrix& A, std::vector<double>& b);

}  // namespace gbdp::num
