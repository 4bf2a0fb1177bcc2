#include "cli_app.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gbdp/closedform.hpp"
#include "gbdp/errors.hpp"
#include "gbdp/estimate.hpp"
#include "gbdp/extinction.hpp"
#include "gbdp/io.hpp"
#include "gbdp/kolmogorov.hpp"
#include "gbdp/model.hpp"
#include "gbdp/moments.hpp"
#include "gbdp/simulate.hpp"

namespace gbdp_cli {

namespace {

using nlohmann::json;
using namespace gbdp;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw domain_error("unknown key \"" + key + "\" in " + where);
  }
}

std::vector<double> rates_from(const json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_array()) throw domain_error(std::string(key) + " must be an array");
  for (const auto& v : j.at(key)) out.push_back(v.get<double>());
  return out;
}

ModelSpec model_from_json(const json& j) {
  reject_unknown_keys(j, {"variant", "lambda", "mu", "nu", "capacity", "table"},
                      "model");
  const std::string variant = j.at("variant").get<std::string>();
  const auto lambda = rates_from(j, "lambda");
  const auto mu = rates_from(j, "mu");
  const double nu = j.value("nu", 0.0);

  if (variant == "linear") return ModelSpec::linear(lambda, mu);
  if (variant == "constant") return ModelSpec::constant(lambda, mu);
  if (variant == "immigration_zero")
    return ModelSpec::immigration_at_zero(lambda, mu, nu);
  if (variant == "immigration_all")
    return ModelSpec::immigration_everywhere(lambda, mu, nu);
  if (variant == "parking") {
    if (!j.contains("capacity")) throw domain_error("parking needs capacity");
    const json& cap = j.at("capacity");
    reject_unknown_keys(cap, {"K", "K1", "K2"}, "capacity");
    const State K = cap.at("K").get<State>();
    if (cap.contains("K1") &&
        cap.at("K1").get<int>() != static_cast<int>(lambda.size()))
      throw domain_error("capacity.K1 must match the lambda vector length");
    if (cap.contains("K2") &&
        cap.at("K2").get<int>() != static_cast<int>(mu.size()))
      throw domain_error("capacity.K2 must match the mu vector length");
    return ModelSpec::parking(K, lambda, mu);
  }
  if (variant == "table") {
    if (!j.contains("table")) throw domain_error("table variant needs entries");
    std::vector<TableEntry> entries;
    for (const auto& e : j.at("table")) {
      reject_unknown_keys(e, {"n", "kind", "size", "rate"}, "table entry");
      const std::string kind = e.at("kind").get<std::string>();
      if (kind != "birth" && kind != "death")
        throw domain_error("table kind must be birth or death");
      entries.push_back({e.at("n").get<State>(),
                         kind == "birth" ? EventKind::Birth : EventKind::Death,
                         e.at("size").get<int>(), e.at("rate").get<double>()});
    }
    return ModelSpec::general_table(entries);
  }
  throw domain_error("unknown variant \"" + variant + "\"");
}

ModelSpec load_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw domain_error("cannot open model file: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw domain_error("bad model JSON: " + std::string(e.what()));
  }
  return model_from_json(j);
}

State default_n0(const ModelSpec& spec, State requested) {
  if (requested >= 0) return requested;
  return spec.variant() == Variant::Parking ? 0 : 1;
}

StateWeight parse_weight(const std::string& name) {
  if (name == "pop") return weight_population();
  if (name == "one") return weight_one();
  throw domain_error("unknown weight \"" + name + "\" (use pop or one)");
}

int default_threads() {
  if (const char* env = std::getenv("GBDP_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

std::string render(const json& j) { return j.dump(2) + "\n"; }

struct SolveFlags {
  double rtol = 1e-8;
  double atol = 1e-14;
  double deficit_tol = 1e-9;
  long long max_states = 1 << 16;
  std::string boundary = "auto";
  std::string backend = "rk";
  bool allow_deficit = false;

  SolveOptions to_options() const {
    SolveOptions o;
    o.rtol = rtol;
    o.atol = atol;
    o.deficit_tolerance = deficit_tol;
    o.max_states = max_states;
    o.allow_deficit = allow_deficit;
    if (boundary == "auto")
      o.boundary = SolveOptions::Boundary::Auto;
    else if (boundary == "floor")
      o.boundary = SolveOptions::Boundary::Floor;
    else if (boundary == "free")
      o.boundary = SolveOptions::Boundary::Free;
    else
      throw domain_error("boundary must be auto, floor or free");
    if (backend == "rk")
      o.backend = SolveOptions::Backend::RungeKutta;
    else if (backend == "uniformization")
      o.backend = SolveOptions::Backend::Uniformization;
    else
      throw domain_error("backend must be rk or uniformization");
    return o;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--rtol", rtol, "relative ODE tolerance");
    cmd->add_option("--atol", atol, "absolute ODE tolerance");
    cmd->add_option("--deficit-tol", deficit_tol, "truncation deficit tolerance");
    cmd->add_option("--max-states", max_states, "truncation growth limit");
    cmd->add_option("--boundary", boundary, "auto|floor|free");
    cmd->add_option("--backend", backend, "rk|uniformization");
    cmd->add_flag("--allow-deficit", allow_deficit,
                  "accept truncation outflow without growing");
  }
};

json moment_block_json(const ModelSpec& spec, double t,
                       const SolveOptions& opts) {
  json row;
  row["t"] = t;
  switch (spec.variant()) {
    case Variant::Linear: {
      for (const auto& [k, v] : glbdp_moments(spec, t).values) row[k] = v;
      for (const auto& [k, v] : birth_moments(spec, t).values) row[k] = v;
      for (const auto& [k, v] : death_moments(spec, t).values) row[k] = v;
      for (const auto& [k, v] : path_integral_moments(spec, t).values) row[k] = v;
      const auto cov = cov_births_deaths(spec, t);
      row["cov_DB"] = cov.value;
      const double vb = birth_moments(spec, t).at("var_B");
      const double vd = death_moments(spec, t).at("var_D");
      row["corr_DB"] = (vb > 0 && vd > 0)
                           ? cov.value / std::sqrt(vb * vd)
                           : std::numeric_limits<double>::quiet_NaN();
      break;
    }
    case Variant::Constant: {
      for (const auto& [k, v] : constant_moments(spec, t).values) row[k] = v;
      for (const auto& [k, v] : path_integral_moments_constant(spec, t).values)
        row[k] = v;
      break;
    }
    case Variant::ImmigrationEverywhere:
      row["mean_N"] = immigration_mean(spec, t);
      break;
    case Variant::ImmigrationAtZero: {
      const auto curve = p_zero_curve(spec, std::max(t, 1e-9), 1025, opts);
      row["mean_N"] = t == 0.0 ? 1.0 : immigration_mean(spec, t, curve);
      break;
    }
    case Variant::Parking: {
      const auto m = parking_means(spec, t);
      row["mean_N"] = m.mean_n;
      row["mean_A"] = m.mean_a;
      row["mean_D"] = m.mean_d;
      row["occupancy"] = m.occupancy;
      break;
    }
    default:
      throw domain_error("moments are undefined for table models");
  }
  return row;
}

// replaces NaN with null for JSON output
json sanitize(const json& j) {
  json out = j;
  for (auto& [k, v] : out.items()) {
    (void)k;
    if (v.is_number_float() && std::isnan(v.get<double>())) v = nullptr;
  }
  return out;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"generalized birth-death processes: simulation, transient solves,"
               " closed forms, extinction and estimation"};
  app.require_subcommand(1);

  std::string model_path, output = "-", format = "json";
  std::uint64_t seed = 1;
  State n0 = -1;
  std::vector<double> times;
  int threads = default_threads();

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw trajectories or Monte Carlo summaries");
  double horizon = 1.0;
  std::size_t replications = 0;
  std::string emit = "traj", weight_name = "pop";
  sim->add_option("--model", model_path, "model JSON file")->required();
  sim->add_option("--horizon,-t", horizon, "simulation end time")->required();
  sim->add_option("--n0", n0, "initial state (default 1; 0 for parking)");
  sim->add_option("--seed", seed, "stream seed");
  sim->add_option("--emit", emit, "traj|functionals");
  sim->add_option("--times", times, "query times for functionals / summaries");
  sim->add_option("--weight", weight_name, "path-integral weight: pop|one");
  sim->add_option("--replications,-M", replications,
                  "Monte Carlo replication count (emits a JSON summary)");
  sim->add_option("--threads", threads, "worker threads for Monte Carlo");
  sim->add_option("--output,-o", output, "output path (- for stdout)");

  // pmf
  auto* pmf = app.add_subcommand("pmf", "transient state probabilities");
  std::string method = "ode";
  SolveFlags pmf_flags;
  pmf->add_option("--model", model_path)->required();
  pmf->add_option("--t", times, "output times")->required();
  pmf->add_option("--method", method, "ode|closed-form");
  pmf->add_option("--n0", n0, "initial state");
  pmf_flags.attach(pmf);
  pmf->add_option("--output,-o", output);

  // joint
  auto* joint = app.add_subcommand("joint", "joint transient laws on the (b, d) lattice");
  std::string kind = "dbn";
  SolveFlags joint_flags;
  joint->add_option("--model", model_path)->required();
  joint->add_option("--t", times)->required();
  joint->add_option("--kind", kind,
                    "bn|dn|dbn|parking-arrivals|parking-departures");
  joint->add_option("--n0", n0, "initial state");
  joint_flags.attach(joint);
  joint->add_option("--output,-o", output);

  // moments
  auto* mom = app.add_subcommand("moments", "closed-form moments and correlations");
  SolveFlags mom_flags;
  mom->add_option("--model", model_path)->required();
  mom->add_option("--t", times)->required();
  mom->add_option("--format", format, "json|csv");
  mom_flags.attach(mom);
  mom->add_option("--output,-o", output);

  // extinction
  auto* ext = app.add_subcommand("extinction", "psi roots, residues and extinction");
  std::vector<double> ext_times;
  ext->add_option("--model", model_path)->required();
  ext->add_option("--t", ext_times, "also report transient p(0, t)");
  ext->add_option("--output,-o", output);

  // laplace
  auto* lap = app.add_subcommand("laplace", "hitting-time / path-integral transform");
  double theta = 0.0;
  State start_state = 1;
  State k_max = 0;
  std::string lap_weight = "one";
  lap->add_option("--model", model_path)->required();
  lap->add_option("--k", start_state, "initial state")->required();
  lap->add_option("--theta", theta, "transform parameter")->required();
  lap->add_option("--weight", lap_weight, "one|pop (default one: hitting time)");
  lap->add_option("--kmax", k_max, "hard truncation cap (0 = default)");
  lap->add_option("--output,-o", output);

  // estimate
  auto* est = app.add_subcommand("estimate", "rate estimation from holding times");
  std::string input_path;
  double alpha = 0.05;
  est->add_option("--input", input_path, "CSV of state_before,sojourn")->required();
  est->add_option("--alpha", alpha, "two-sided interval level");
  est->add_option("--output,-o", output);

  // parking
  auto* park = app.add_subcommand("parking", "parking-lot means and occupancy");
  park->add_option("--model", model_path)->required();
  park->add_option("--t", times)->required();
  park->add_option("--format", format, "json|csv");
  park->add_option("--output,-o", output);

  // figure
  auto* fig = app.add_subcommand("figure", "curves for external plotting");
  std::string fig_kind;
  double tmax = 5.0;
  int points = 201;
  fig->add_option("--kind", fig_kind,
                  "cum_births|cum_deaths|corrBN|corrDN|corrNX|immigration_mean")
      ->required();
  fig->add_option("--model", model_path)->required();
  fig->add_option("--tmax", tmax, "grid end");
  fig->add_option("--points", points, "grid size");
  fig->add_option("--output,-o", output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(sim)) {
      const auto spec = load_model(model_path);
      const State start = default_n0(spec, n0);
      if (replications > 0) {
        if (times.empty()) times = {horizon};
        const auto mc = monte_carlo(spec, start, horizon, replications, times,
                                    parse_weight(weight_name), seed, threads);
        json out;
        out["replications"] = mc.replications;
        out["seed"] = seed;
        json at = json::array();
        const char* names[4] = {"N", "B", "D", "X"};
        for (const auto& e : mc.at) {
          json row;
          row["t"] = e.t;
          for (int a = 0; a < 4; ++a) {
            row[std::string("mean_") + names[a]] = e.mean[a];
            row[std::string("se_") + names[a]] = e.std_error[a];
            for (int b = a; b < 4; ++b)
              row[std::string("cov_") + names[a] + names[b]] =
                  e.covariance[a][b];
          }
          at.push_back(row);
        }
        out["at"] = at;
        io::atomic_write(output, render(out));
      } else {
        const auto traj = simulate_trajectory(spec, start, horizon, seed);
        std::ostringstream os;
        if (emit == "traj") {
          io::write_trajectory_csv(os, traj);
        } else if (emit == "functionals") {
          if (times.empty()) throw domain_error("--times required for functionals");
          io::write_functionals_csv(
              os, functionals(traj, parse_weight(weight_name), times));
        } else {
          throw domain_error("emit must be traj or functionals");
        }
        io::atomic_write(output, os.str());
      }
    } else if (app.got_subcommand(pmf)) {
      const auto spec = load_model(model_path);
      const State start = default_n0(spec, n0);
      std::ostringstream os;
      if (method == "ode") {
        const auto out =
            solve_state_probabilities(spec, {{start, 1.0}}, times,
                                      pmf_flags.to_options());
        io::write_pmf_csv(os, out);
      } else if (method == "closed-form") {
        if (start != 1)
          throw domain_error("closed-form pmf is defined for one progenitor");
        std::vector<TruncatedPmf> out;
        for (double t : times) {
          TruncatedPmf pm;
          pm.t = t;
          double cum = 0.0;
          for (State n = 0; n <= 100000; ++n) {
            pm.probs.push_back(constant_pmf(spec, n, t));
            cum += pm.probs.back();
            if (n > 10 && 1.0 - cum < 1e-12) break;
          }
          pm.deficit = std::max(0.0, 1.0 - cum);
          out.push_back(std::move(pm));
        }
        io::write_pmf_csv(os, out);
      } else {
        throw domain_error("method must be ode or closed-form");
      }
      io::atomic_write(output, os.str());
    } else if (app.got_subcommand(joint)) {
      const auto spec = load_model(model_path);
      std::vector<JointPmfGrid> grids;
      if (kind == "bn")
        grids = solve_joint_birth(spec, times, joint_flags.to_options(),
                                  default_n0(spec, n0));
      else if (kind == "dn")
        grids = solve_joint_death(spec, times, joint_flags.to_options(),
                                  default_n0(spec, n0));
      else if (kind == "dbn" || kind == "full")
        grids = solve_joint_full(spec, times, joint_flags.to_options(),
                                 default_n0(spec, n0));
      else if (kind == "parking-arrivals")
        grids = solve_parking_joint(spec, ParkingAxis::Arrivals, times,
                                    joint_flags.to_options());
      else if (kind == "parking-departures")
        grids = solve_parking_joint(spec, ParkingAxis::Departures, times,
                                    joint_flags.to_options());
      else
        throw domain_error("unknown joint kind \"" + kind + "\"");
      std::ostringstream os;
      io::write_joint_csv(os, grids);
      io::atomic_write(output, os.str());
    } else if (app.got_subcommand(mom)) {
      const auto spec = load_model(model_path);
      const auto opts = mom_flags.to_options();
      json rows = json::array();
      for (double t : times) rows.push_back(moment_block_json(spec, t, opts));
      if (format == "json") {
        json out;
        out["variant"] = to_string(spec.variant());
        out["at"] = json::array();
        for (const auto& r : rows) out["at"].push_back(sanitize(r));
        io::atomic_write(output, render(out));
      } else if (format == "csv") {
        std::ostringstream os;
        os << "t";
        for (const auto& [k, v] : rows.front().items())
          if (k != "t") os << ',' << k;
        os << '\n';
        for (const auto& r : rows) {
          os << io::format_double(r.at("t").get<double>());
          for (const auto& [k, v] : r.items())
            if (k != "t") os << ',' << io::format_double(v.get<double>());
          os << '\n';
        }
        io::atomic_write(output, os.str());
      } else {
        throw domain_error("format must be json or csv");
      }
    } else if (app.got_subcommand(ext)) {
      const auto spec = load_model(model_path);
      const auto a = analyze(spec);
      json out;
      out["epsilon"] = a.epsilon;
      out["distinct"] = a.distinct;
      out["psi_coeffs"] = a.psi_coeffs;
      json roots = json::array();
      for (const auto& r : a.roots)
        roots.push_back({{"re", r.real()}, {"im", r.imag()}});
      out["roots"] = roots;
      json residues = json::array();
      for (const auto& c : a.residues)
        residues.push_back({{"re", c.real()}, {"im", c.imag()}});
      out["residues"] = residues;
      if (!ext_times.empty()) {
        json p0 = json::array();
        for (double t : ext_times)
          p0.push_back({{"t", t}, {"p0", transient_extinction(spec, t)}});
        out["transient"] = p0;
      }
      io::atomic_write(output, render(out));
    } else if (app.got_subcommand(lap)) {
      const auto spec = load_model(model_path);
      const double w = hitting_time_laplace(spec, start_state, theta,
                                            parse_weight(lap_weight), k_max);
      json out;
      out["k"] = start_state;
      out["theta"] = theta;
      out["weight"] = lap_weight;
      out["value"] = w;
      io::atomic_write(output, render(out));
    } else if (app.got_subcommand(est)) {
      std::vector<TransitionRecord> records;
      if (input_path == "-") {
        records = io::read_records_csv(std::cin);
      } else {
        std::ifstream is(input_path);
        if (!is) throw domain_error("cannot open input: " + input_path);
        records = io::read_records_csv(is);
      }
      const double lhat = mle_lambda(records);
      const double ltilde = sufficient_statistic(records);
      const auto [lo, hi] = confidence_interval(records, alpha);
      json out;
      out["n_events"] = records.size();
      out["lambda_hat"] = lhat;
      out["lambda_tilde"] = ltilde;
      out["alpha"] = alpha;
      out["ci_low"] = lo;
      out["ci_high"] = hi;
      io::atomic_write(output, render(out));
    } else if (app.got_subcommand(park)) {
      const auto spec = load_model(model_path);
      if (format == "csv") {
        std::ostringstream os;
        os << "t,mean_N,mean_A,mean_D,occupancy\n";
        for (double t : times) {
          const auto m = parking_means(spec, t);
          os << io::format_double(t) << ',' << io::format_double(m.mean_n)
             << ',' << io::format_double(m.mean_a) << ','
             << io::format_double(m.mean_d) << ','
             << io::format_double(m.occupancy) << '\n';
        }
        io::atomic_write(output, os.str());
      } else {
        json out = json::array();
        for (double t : times) {
          const auto m = parking_means(spec, t);
          out.push_back({{"t", t},
                         {"mean_N", m.mean_n},
                         {"mean_A", m.mean_a},
                         {"mean_D", m.mean_d},
                         {"occupancy", m.occupancy}});
        }
        io::atomic_write(output, render(out));
      }
    } else if (app.got_subcommand(fig)) {
      const auto spec = load_model(model_path);
      std::ostringstream os;
      os << "t,value\n";
      std::function<double(double)> p0;
      if (fig_kind == "immigration_mean" &&
          spec.variant() == Variant::ImmigrationAtZero)
        p0 = p_zero_curve(spec, tmax, 2049);
      for (int k = 0; k < points; ++k) {
        const double t = tmax * k / (points - 1);
        double v = std::numeric_limits<double>::quiet_NaN();
        if (fig_kind == "cum_births")
          v = birth_moments(spec, t).at("mean_B");
        else if (fig_kind == "cum_deaths")
          v = death_moments(spec, t).at("mean_D");
        else if (fig_kind == "corrBN")
          v = birth_moments(spec, t).at("corr_BN");
        else if (fig_kind == "corrDN")
          v = death_moments(spec, t).at("corr_DN");
        else if (fig_kind == "corrNX")
          v = path_integral_moments(spec, t).at("corr_NX");
        else if (fig_kind == "immigration_mean")
          v = spec.variant() == Variant::ImmigrationAtZero
                  ? (t == 0.0 ? 1.0 : immigration_mean(spec, t, p0))
                  : immigration_mean(spec, t);
        else
          throw domain_error("unknown figure kind \"" + fig_kind + "\"");
        os << io::format_double(t) << ',' << io::format_double(v) << '\n';
      }
      io::atomic_write(output, os.str());
    }
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace gbdp_cli
