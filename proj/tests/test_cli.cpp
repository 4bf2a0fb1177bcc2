#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "gbdp/extinction.hpp"
#include "gbdp/io.hpp"
#include "gbdp/model.hpp"
#include "gbdp/moments.hpp"
#include "gbdp/simulate.hpp"

namespace {

const std::string kTool = GBDP_TOOL_PATH;
const std::string kDir = "/tmp/gbdp_cli_test";

int run_tool(const std::string& args) {
  const std::string cmd = kTool + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  os << content;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// t,n,prob rows -> pmf map (skips the deficit rows)
std::map<long long, double> read_pmf_rows(const std::string& csv) {
  std::map<long long, double> out;
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    const auto c1 = line.find(','), c2 = line.rfind(',');
    const std::string n = line.substr(c1 + 1, c2 - c1 - 1);
    if (n == "_deficit") continue;
    out[std::stoll(n)] = std::stod(line.substr(c2 + 1));
  }
  return out;
}

struct Setup {
  Setup() {
    if (std::system(("mkdir -p " + kDir).c_str()) != 0) std::abort();
    write_file(kDir + "/lbdp21.json",
               R"({"variant": "linear", "lambda": [2.0], "mu": [1.0]})");
    write_file(kDir + "/constant.json",
               R"({"variant": "constant", "lambda": [1.0, 0.5], "mu": [0.5, 0.25]})");
    write_file(kDir + "/parking.json",
               R"({"variant": "parking", "lambda": [0.2], "mu": [0.3],)"
               R"( "capacity": {"K": 10, "K1": 1, "K2": 1}})");
  }
};
const Setup setup_once;

}  // namespace

TEST_CASE("pmf methods agree on a constant-rate model") {
  REQUIRE(run_tool("pmf --model " + kDir + "/constant.json --t 1 --method ode"
                   " --rtol 1e-10 --atol 1e-15 -o " + kDir + "/ode.csv") == 0);
  REQUIRE(run_tool("pmf --model " + kDir +
                   "/constant.json --t 1 --method closed-form -o " + kDir +
                   "/cf.csv") == 0);
  const auto ode = read_pmf_rows(slurp(kDir + "/ode.csv"));
  const auto cf = read_pmf_rows(slurp(kDir + "/cf.csv"));
  double tv = 0.0;
  for (const auto& [n, p] : ode) {
    const auto it = cf.find(n);
    tv += std::abs(p - (it == cf.end() ? 0.0 : it->second));
  }
  CHECK(0.5 * tv <= 1e-8);
}

TEST_CASE("extinction subcommand reports the known root") {
  REQUIRE(run_tool("extinction --model " + kDir + "/lbdp21.json -o " + kDir +
                   "/ext.json") == 0);
  const auto j = nlohmann::json::parse(slurp(kDir + "/ext.json"));
  CHECK(j.at("epsilon").get<double>() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(j.at("distinct").get<bool>());
  CHECK(j.at("roots").size() == 2);
}

TEST_CASE("simulate is byte-stable under a fixed seed") {
  const std::string cmd = "simulate --model " + kDir +
                          "/lbdp21.json -t 1 --seed 42 -o " + kDir;
  REQUIRE(run_tool(cmd + "/a.csv") == 0);
  REQUIRE(run_tool(cmd + "/b.csv") == 0);
  const std::string a = slurp(kDir + "/a.csv");
  CHECK(a == slurp(kDir + "/b.csv"));
  CHECK(a.rfind("time,state,event_kind,event_size\n0.0,1,init,0\n", 0) == 0);
}

TEST_CASE("the cli is a thin adapter over the library") {
  REQUIRE(run_tool("simulate --model " + kDir +
                   "/lbdp21.json -t 1 --seed 7 -o " + kDir + "/cli.csv") == 0);
  const auto spec = gbdp::ModelSpec::linear({2.0}, {1.0});
  const auto traj = gbdp::simulate_trajectory(spec, 1, 1.0, 7);
  std::ostringstream os;
  gbdp::io::write_trajectory_csv(os, traj);
  CHECK(os.str() == slurp(kDir + "/cli.csv"));
}

TEST_CASE("estimate subcommand computes the interval") {
  write_file(kDir + "/events.csv", "state_before,sojourn\n2,0.5\n3,0.25\n1,0.8\n");
  REQUIRE(run_tool("estimate --input " + kDir + "/events.csv --alpha 0.05 -o " +
                   kDir + "/est.json") == 0);
  const auto j = nlohmann::json::parse(slurp(kDir + "/est.json"));
  const double hat = j.at("lambda_hat").get<double>();
  const double tilde = j.at("lambda_tilde").get<double>();
  CHECK(hat * tilde == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(j.at("ci_low").get<double>() < hat);
  CHECK(j.at("ci_high").get<double>() > hat);
  CHECK(j.at("n_events").get<int>() == 3);
}

TEST_CASE("exit codes distinguish usage, domain and numeric failures") {
  CHECK(run_tool("pmf --model " + kDir + "/lbdp21.json --t 1 --bogus-flag") == 1);
  CHECK(run_tool("nonexistent-subcommand") == 1);

  write_file(kDir + "/unknown_key.json",
             R"({"variant": "linear", "lambda": [1.0], "mu": [1.0], "extra": 3})");
  CHECK(run_tool("pmf --model " + kDir + "/unknown_key.json --t 1") == 2);

  write_file(kDir + "/bad_rate.json",
             R"({"variant": "linear", "lambda": [-1.0], "mu": [1.0]})");
  CHECK(run_tool("pmf --model " + kDir + "/bad_rate.json --t 1") == 2);

  // supercritical model at a long horizon with a tiny truncation cap
  CHECK(run_tool("pmf --model " + kDir +
                 "/lbdp21.json --t 3 --max-states 16") == 3);
}

TEST_CASE("moments subcommand emits csv rows") {
  REQUIRE(run_tool("moments --model " + kDir +
                   "/lbdp21.json --t 0.5 1 2 --format csv -o " + kDir +
                   "/mom.csv") == 0);
  const std::string csv = slurp(kDir + "/mom.csv");
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 4);  // header + three times
  CHECK(csv.find("mean_N") != std::string::npos);
}

TEST_CASE("figure emits monotone correlation curves for growth models") {
  REQUIRE(run_tool("figure --kind corrBN --model " + kDir +
                   "/lbdp21.json --tmax 8 --points 17 -o " + kDir +
                   "/fig.csv") == 0);
  std::istringstream is(slurp(kDir + "/fig.csv"));
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,value");
  std::vector<double> values;
  while (std::getline(is, line)) {
    const auto c = line.find(',');
    const std::string v = line.substr(c + 1);
    values.push_back(v == "nan" || v == "-nan" ? -1.0 : std::stod(v));
  }
  REQUIRE(values.size() == 17);
  // the t = 0 row is undefined (variances vanish); past it the curve climbs
  for (std::size_t k = 2; k < values.size(); ++k)
    CHECK(values[k] >= values[k - 1] - 1e-12);
  CHECK(values.back() > 0.99);
  CHECK(values.back() <= 1.0 + 1e-12);
}

TEST_CASE("parking subcommand evaluates the closed forms") {
  REQUIRE(run_tool("parking --model " + kDir +
                   "/parking.json --t 2 --format json -o " + kDir +
                   "/park.json") == 0);
  const auto j = nlohmann::json::parse(slurp(kDir + "/park.json"));
  const auto m =
      gbdp::parking_means(gbdp::ModelSpec::parking(10, {0.2}, {0.3}), 2.0);
  CHECK(j.at(0).at("mean_N").get<double>() == doctest::Approx(m.mean_n));
  CHECK(j.at(0).at("occupancy").get<double>() == doctest::Approx(m.occupancy));
}

TEST_CASE("laplace subcommand matches the library") {
  write_file(kDir + "/sub.json",
             R"({"variant": "linear", "lambda": [0.5], "mu": [1.0]})");
  REQUIRE(run_tool("laplace --model " + kDir +
                   "/sub.json --k 1 --theta 1 -o " + kDir + "/lap.json") == 0);
  const auto j = nlohmann::json::parse(slurp(kDir + "/lap.json"));
  const double lib = gbdp::hitting_time_laplace(
      gbdp::ModelSpec::linear({0.5}, {1.0}), 1, 1.0);
  CHECK(j.at("value").get<double>() == doctest::Approx(lib).epsilon(1e-12));
}

TEST_CASE("monte carlo summaries via the simulate subcommand") {
  REQUIRE(run_tool("simulate --model " + kDir +
                   "/lbdp21.json -t 1 -M 2000 --seed 5 --times 1 -o " + kDir +
                   "/mc.json") == 0);
  const auto j = nlohmann::json::parse(slurp(kDir + "/mc.json"));
  CHECK(j.at("replications").get<int>() == 2000);
  const auto& row = j.at("at").at(0);
  CHECK(row.at("mean_N").get<double>() > 1.5);
  CHECK(row.at("se_N").get<double>() > 0.0);
}
