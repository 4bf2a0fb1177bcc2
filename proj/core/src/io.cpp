#include "gbdp/io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gbdp/errors.hpp"

namespace gbdp::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "time,state,event_kind,event_size\n";
  os << "0.0," << traj.initial_state << ",init,0\n";
  State n = traj.initial_state;
  for (std::size_t k = 0; k < traj.events.size(); ++k) {
    const EventDescriptor& e = traj.events[k];
    n = e.kind == EventKind::Birth ? n + e.size : n - e.size;
    os << format_double(traj.jump_times[k]) << ',' << n << ','
       << (e.kind == EventKind::Birth ? "birth" : "death") << ',' << e.size
       << '\n';
  }
}

void write_functionals_csv(std::ostream& os, const PathFunctionals& f) {
  os << "time,N,B,D,X\n";
  for (std::size_t q = 0; q < f.query_times.size(); ++q) {
    os << format_double(f.query_times[q]) << ',' << format_double(f.population[q])
       << ',' << format_double(f.cumulative_births[q]) << ','
       << format_double(f.cumulative_deaths[q]) << ','
       << format_double(f.path_integral[q]) << '\n';
  }
}

void write_pmf_csv(std::ostream& os, std::span<const TruncatedPmf> pmfs) {
  os << "t,n,prob\n";
  for (const TruncatedPmf& pmf : pmfs) {
    for (std::size_t n = 0; n < pmf.probs.size(); ++n)
      os << format_double(pmf.t) << ',' << n << ','
         << format_double(pmf.probs[n]) << '\n';
    os << format_double(pmf.t) << ",_deficit," << format_double(pmf.deficit)
       << '\n';
  }
}

void write_joint_csv(std::ostream& os, std::span<const JointPmfGrid> grids) {
  os << "t,d,b,n,prob\n";
  for (const JointPmfGrid& g : grids) {
    for (std::size_t bi = 0; bi < g.b_count; ++bi) {
      for (std::size_t d = 0; d < g.d_count; ++d) {
        const double p = g.values[bi * g.d_count + d];
        if (p == 0.0) continue;
        const State b = g.b0 + static_cast<State>(bi);
        const State n = b - static_cast<State>(d);
        os << format_double(g.t) << ',' << d << ',' << b << ',' << n << ','
           << format_double(p) << '\n';
      }
    }
  }
}

std::vector<TransitionRecord> read_records_csv(std::istream& is) {
  std::vector<TransitionRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.find("state_before") != std::string::npos) continue;  // header
    std::istringstream ls(line);
    std::string a, b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b))
      throw domain_error("bad records row: " + line);
    try {
      out.push_back({static_cast<State>(std::stoll(a)), std::stod(b)});
    } catch (const std::exception&) {
      throw domain_error("bad records row: " + line);
    }
  }
  return out;
}

void atomic_write(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw domain_error("cannot open for writing: " + tmp);
    os << content;
    if (!os) throw numeric_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw numeric_error("rename failed: " + path);
  }
}

}  // namespace gbdp::io
