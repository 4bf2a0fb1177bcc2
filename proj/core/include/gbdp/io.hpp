#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "gbdp/estimate.hpp"
#include "gbdp/kolmogorov.hpp"
#include "gbdp/simulate.hpp"

namespace gbdp::io {

// `time,state,event_kind,event_size`; row 0 is `0.0,n0,init,0`. Doubles are
// printed with 17 significant digits, so equal trajectories give equal bytes.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

// `time,N,B,D,X`
void write_functionals_csv(std::ostream& os, const PathFunctionals& f);

// `t,n,prob` rows plus a trailing `t,_deficit,value` row per output time.
void write_pmf_csv(std::ostream& os, std::span<const TruncatedPmf> pmfs);

// `t,d,b,n,prob`, nonzero cells only.
void write_joint_csv(std::ostream& os, std::span<const JointPmfGrid> grids);

// `state_before,sojourn` (header row optional).
std::vector<TransitionRecord> read_records_csv(std::istream& is);

// Writes content to path via a temp file in the same directory plus rename.
// "-" writes to stdout directly.
void atomic_write(const std::string& path, const std::string& content);

std::string format_double(double v);

}  // namespace gbdp::io
