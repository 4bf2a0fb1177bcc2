#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gbdp::num {

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  double h_max = 0.0;  // 0 = no cap
};

using OdeRhs =
    std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

// Adaptive Dormand-Prince 5(4). Integrates y' = rhs(t, y) from t0 and calls
// observe(times[i], y) at every requested output time (strictly increasing,
// all >= t0). Steps land exactly on output times.
void integrate_rk45(const OdeRhs& rhs, std::vector<double>& y, double t0,
                    std::span<const double> times,
                    const std::function<void(double, const std::vector<double>&)>& observe,
                    const OdeOptions& opt = {});

}  // namespace gbdp::num
