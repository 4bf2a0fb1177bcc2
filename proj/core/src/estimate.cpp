#include "gbdp/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "gbdp/errors.hpp"
#include "gbdp/numeric.hpp"

namespace gbdp {

namespace {

double weighted_time(std::span<const TransitionRecord> records) {
  double s = 0.0;
  for (const auto& r : records) {
    if (r.state_before < 1)
      throw domain_error("record at state 0: no exponential clock there");
    if (!(r.sojourn > 0.0)) throw domain_error("sojourns must be positive");
    s += static_cast<double>(r.state_before) * r.sojourn;
  }
  return s;
}

}  // namespace

std::vector<TransitionRecord> extract_records(const Trajectory& traj) {
  std::vector<TransitionRecord> out;
  out.reserve(traj.events.size());
  State n = traj.initial_state;
  double t_prev = 0.0;
  for (std::size_t k = 0; k < traj.events.size(); ++k) {
    out.push_back({n, traj.jump_times[k] - t_prev});
    t_prev = traj.jump_times[k];
    n = traj.events[k].kind == EventKind::Birth ? n + traj.events[k].size
                                                : n - traj.events[k].size;
  }
  return out;
}

double mle_lambda(std::span<const TransitionRecord> records) {
  if (records.empty()) throw domain_error("mle needs at least one record");
  return static_cast<double>(records.size()) / weighted_time(records);
}

double sufficient_statistic(std::span<const TransitionRecord> records) {
  if (records.empty()) throw domain_error("statistic needs at least one record");
  return weighted_time(records) / static_cast<double>(records.size());
}

std::pair<double, double> confidence_interval(
    std::span<const TransitionRecord> records, double alpha) {
  if (records.empty()) throw domain_error("interval needs at least one record");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw domain_error("alpha must be in (0, 1)");
  const double wt = weighted_time(records);
  const double dof = 2.0 * static_cast<double>(records.size());
  const double lo = num::chi_square_quantile(0.5 * alpha, dof) / (2.0 * wt);
  const double hi = num::chi_square_quantile(1.0 - 0.5 * alpha, dof) / (2.0 * wt);
  return {lo, hi};
}

double chisq_gof(std::span<const TransitionRecord> records, double lambda0) {
  if (records.empty()) throw domain_error("gof needs at least one record");
  if (!(lambda0 > 0.0)) throw domain_error("lambda0 must be positive");
  const double pivot = 2.0 * lambda0 * weighted_time(records);
  const double dof = 2.0 * static_cast<double>(records.size());
  const double cdf = num::chi_square_cdf(pivot, dof);
  return std::min(1.0, 2.0 * std::min(cdf, 1.0 - cdf));
}

}  // namespace gbdp
