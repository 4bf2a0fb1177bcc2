#pragma once

#include <span>
#include <utility>
#include <vector>

#include "gbdp/simulate.hpp"

namespace gbdp {

// One fully observed holding interval: the state occupied and how long it
// lasted. The interval after the last jump is censored and never recorded.
struct TransitionRecord {
  State state_before;
  double sojourn;
};

// Records of a linear-variant trajectory, one per jump.
std::vector<TransitionRecord> extract_records(const Trajectory& traj);

// MLE of Lambda = sum lambda_i + sum mu_j: (number of events) / sum N tau.
double mle_lambda(std::span<const TransitionRecord> records);

// Mean of N tau; unbiased for 1 / Lambda and sufficient for Lambda.
double sufficient_statistic(std::span<const TransitionRecord> records);

// Exact chi-square interval for Lambda from the pivot
// 2 Lambda sum N tau ~ chi^2 with 2E degrees of freedom.
std::pair<double, double> confidence_interval(
    std::span<const TransitionRecord> records, double alpha);

// Two-sided p-value of the pivot against a hypothesised Lambda.
double chisq_gof(std::span<const TransitionRecord> records, double lambda0);

}  // namespace gbdp
