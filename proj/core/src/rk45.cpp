#include "gbdp/rk45.hpp"

#include <algorithm>
#include <cmath>

#include "gbdp/errors.hpp"

namespace gbdp::num {

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                 e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640,
                 e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

}  // namespace

void integrate_rk45(const OdeRhs& rhs, std::vector<double>& y, double t0,
                    std::span<const double> times,
                    const std::function<void(double, const std::vector<double>&)>& observe,
                    const OdeOptions& opt) {
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n),
      ynew(n);
  double t = t0;
  rhs(t, y, k1);  // FSAL slot, always valid at (t, y)

  double h_ctrl = 1e-3;
  for (double ti : times) {
    if (ti < t - 1e-30) throw domain_error("output times must be increasing");
    while (t < ti) {
      bool accepted = false;
      for (int attempt = 0; attempt < 400 && !accepted; ++attempt) {
        double h = std::min(h_ctrl, ti - t);
        if (opt.h_max > 0.0) h = std::min(h, opt.h_max);

        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, yt, k2);
        for (std::size_t i = 0; i < n; ++i)
          yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, yt, k3);
        for (std::size_t i = 0; i < n; ++i)
          yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, yt, k4);
        for (std::size_t i = 0; i < n; ++i)
          yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                              a54 * k4[i]);
        rhs(t + c5 * h, yt, k5);
        for (std::size_t i = 0; i < n; ++i)
          yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                              a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, yt, k6);
        for (std::size_t i = 0; i < n; ++i)
          ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
          const double sc =
              opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
          const double r = e / sc;
          err += r * r;
        }
        err = std::sqrt(err / static_cast<double>(n));

        const bool forced = h <= 1e-14 * std::max(1.0, std::abs(t));
        if (err <= 1.0 || forced) {
          t += h;
          y.swap(ynew);
          k1.swap(k7);
          accepted = true;
          if (t >= ti) t = ti;  // kill accumulated roundoff at outputs
        }
        double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h_ctrl = h * std::clamp(factor, 0.2, 5.0);
      }
      if (!accepted)
        throw numeric_error("rk45: cannot reach requested accuracy");
    }
    observe(ti, y);
  }
}

}  // namespace gbdp::num
