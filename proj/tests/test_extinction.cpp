#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "gbdp/errors.hpp"
#include "gbdp/extinction.hpp"
#include "gbdp/kolmogorov.hpp"
#include "gbdp/polyroots.hpp"
#include "gbdp/rng.hpp"
#include "gbdp/simulate.hpp"
#include "oracles.hpp"

using namespace gbdp;

TEST_CASE("single-size roots and extinction probability") {
  SUBCASE("supercritical") {
    const auto a = analyze(ModelSpec::linear({2.0}, {1.0}));
    REQUIRE(a.roots.size() == 2);
    CHECK(std::abs(a.roots[0] - std::complex<double>(0.5, 0.0)) < 1e-10);
    CHECK(std::abs(a.roots[1] - std::complex<double>(1.0, 0.0)) < 1e-10);
    CHECK(a.epsilon == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(a.distinct);
  }
  SUBCASE("subcritical") {
    const auto a = analyze(ModelSpec::linear({1.0}, {2.0}));
    CHECK(a.epsilon == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(a.roots[1] - std::complex<double>(2.0, 0.0)) < 1e-10);
  }
  SUBCASE("balanced rates collide at one") {
    const auto a = analyze(ModelSpec::linear({1.0}, {1.0}));
    CHECK_FALSE(a.distinct);
    CHECK(a.residues.empty());
    CHECK(a.epsilon == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("psi coefficients reproduce the transport coefficient") {
  const auto spec = ModelSpec::linear({1.0, 0.5}, {0.5, 0.25});
  const auto a = analyze(spec);
  CounterRng rng(99);
  for (int k = 0; k < 20; ++k) {
    const double u = 0.1 + 1.8 * rng.uniform01();
    // phi(u) = sum_i lambda_i u (u^i - 1) + sum_j mu_j u (u^-j - 1)
    double phi = 0.0;
    for (int i = 1; i <= spec.k1(); ++i)
      phi += spec.lambda()[i - 1] * u * (std::pow(u, i) - 1.0);
    for (int j = 1; j <= spec.k2(); ++j)
      phi += spec.mu()[j - 1] * u * (std::pow(u, -j) - 1.0);
    const double psi = std::pow(u, spec.k2() - 1) * phi;
    const double direct = num::poly_eval(a.psi_coeffs, {u, 0.0}).real();
    CHECK(psi == doctest::Approx(direct).epsilon(1e-10));
  }
  CHECK(std::abs(num::poly_eval(a.psi_coeffs, {1.0, 0.0})) < 1e-10);
}

TEST_CASE("residues reconstruct the partial fractions of psi") {
  // sum_i c_i / (u - r_i) must equal u^{k2-1} / psi(u), and the residues of a
  // proper rational function sum to zero
  const auto spec = ModelSpec::linear({0.9, 0.4}, {0.7, 0.2});
  const auto a = analyze(spec);
  REQUIRE(a.distinct);
  std::complex<double> residue_sum = 0.0;
  for (const auto& c : a.residues) residue_sum += c;
  CHECK(std::abs(residue_sum) < 1e-10);

  CounterRng rng(5);
  for (int k = 0; k < 10; ++k) {
    const std::complex<double> u(0.2 + 2.0 * rng.uniform01(),
                                 0.5 * rng.uniform01() + 0.1);
    std::complex<double> pf = 0.0;
    for (std::size_t i = 0; i < a.roots.size(); ++i)
      pf += a.residues[i] / (u - a.roots[i]);
    const auto direct =
        std::pow(u, spec.k2() - 1) / num::poly_eval(a.psi_coeffs, u);
    CHECK(std::abs(pf - direct) < 1e-9 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("epsilon across the criticality sweep") {
  for (double l1 : {0.4, 0.8, 1.6}) {
    for (double m1 : {0.4, 0.9, 1.7}) {
      const auto spec = ModelSpec::linear({l1, 0.2}, {m1, 0.1});
      const auto c = derived_constants(spec);
      const auto a = analyze(spec);
      CHECK(a.epsilon > 0.0);
      CHECK(a.epsilon <= 1.0);
      if (c.eta < -1e-9) CHECK(a.epsilon == doctest::Approx(1.0).epsilon(1e-8));
      if (c.eta > 1e-9) CHECK(a.epsilon < 1.0 - 1e-6);
    }
  }
}

TEST_CASE("g function of the single-size process") {
  const auto a = analyze(ModelSpec::linear({2.0}, {1.0}));
  SUBCASE("matches the rational closed form") {
    for (double u : {0.1, 0.3, 0.45}) {
      const auto g = g_function(a, u);
      CHECK(g.real() == doctest::Approx((u - 0.5) / (u - 1.0)).epsilon(1e-9));
      CHECK(std::abs(g.imag()) < 1e-10);
    }
  }
  SUBCASE("monotone below the extinction root") {
    double prev = -1.0;
    for (int k = 0; k <= 30; ++k) {
      const double u = 0.9 * a.epsilon * k / 30.0;
      const double g = g_function(a, u).real();
      if (k > 0) CHECK(g < prev);
      prev = g;
    }
  }
  SUBCASE("vanishes at the extinction root") {
    double last = 1e9;
    for (double d : {1e-2, 1e-3, 1e-4, 1e-5}) {
      const double g = std::abs(g_function(a, a.epsilon - d));
      CHECK(g < last);
      last = g;
    }
    CHECK(last < 1e-3);
  }
  SUBCASE("evaluation at a root is singular") {
    CHECK_THROWS_AS((void)g_function(a, 0.5), singular_error);
  }
}

TEST_CASE("g is undefined when roots collide") {
  const auto a = analyze(ModelSpec::linear({1.0}, {1.0}));
  CHECK_THROWS_AS((void)g_function(a, 0.3), domain_error);
}

TEST_CASE("hitting-time transform") {
  SUBCASE("theta = 0 gives the absorption probability") {
    CHECK(hitting_time_laplace(ModelSpec::linear({1.0}, {2.0}), 1, 0.0) ==
          doctest::Approx(1.0).epsilon(1e-8));
    const auto sup = ModelSpec::linear({2.0}, {1.0});
    const auto a = analyze(sup);
    CHECK(hitting_time_laplace(sup, 1, 0.0) ==
          doctest::Approx(a.epsilon).epsilon(1e-6));
  }
  SUBCASE("population weight reduces to the constant-walk closed form") {
    // with g(k) = k the scaled parameters lose their state dependence, so
    // W_k = W_1^k and W_1 solves lam W^2 - (lam + mu + theta) W + mu = 0
    const double lam = 0.5, mu = 1.0, theta = 1.0;
    const auto spec = ModelSpec::linear({lam}, {mu});
    const double s = lam + mu + theta;
    const double closed = (s - std::sqrt(s * s - 4.0 * lam * mu)) / (2.0 * lam);
    CHECK(hitting_time_laplace(spec, 1, theta, weight_population()) ==
          doctest::Approx(closed).epsilon(1e-8));
    CHECK(hitting_time_laplace(spec, 3, theta, weight_population()) ==
          doctest::Approx(closed * closed * closed).epsilon(1e-8));
  }
  SUBCASE("monte carlo agreement for the hitting time") {
    const auto spec = ModelSpec::linear({0.5}, {1.0});
    const double predicted = hitting_time_laplace(spec, 1, 1.0);
    std::vector<double> samples;
    samples.reserve(100000);
    for (int r = 0; r < 100000; ++r) {
      const auto h =
          sample_hitting_functional(spec, 1, weight_one(), derive_stream_seed(7, r));
      REQUIRE_FALSE(h.censored);
      samples.push_back(std::exp(-h.z));
    }
    const auto stat = oracles::mean_se(samples);
    CHECK(std::abs(stat.mean - predicted) <= 3.0 * stat.se);
  }
  SUBCASE("monte carlo agreement for a weighted path integral") {
    const auto spec = ModelSpec::linear({0.5}, {1.0});
    const double predicted =
        hitting_time_laplace(spec, 2, 0.7, weight_population());
    std::vector<double> samples;
    samples.reserve(50000);
    for (int r = 0; r < 50000; ++r) {
      const auto h = sample_hitting_functional(spec, 2, weight_population(),
                                               derive_stream_seed(8, r));
      REQUIRE_FALSE(h.censored);
      samples.push_back(std::exp(-0.7 * h.w));
    }
    const auto stat = oracles::mean_se(samples);
    CHECK(std::abs(stat.mean - predicted) <= 3.0 * stat.se);
  }
  SUBCASE("nonincreasing in theta and in the start state") {
    const auto spec = ModelSpec::linear({0.8, 0.2}, {1.2, 0.3});
    double prev = 1.0 + 1e-12;
    for (double theta : {0.0, 0.3, 1.0, 3.0}) {
      const double w = hitting_time_laplace(spec, 2, theta);
      CHECK(w <= prev + 1e-12);
      prev = w;
    }
    prev = 1.0 + 1e-12;
    for (State k : {1, 2, 3, 5, 8}) {
      const double w = hitting_time_laplace(spec, k, 0.5);
      CHECK(w <= prev + 1e-12);
      prev = w;
    }
  }
  SUBCASE("general-rate tables feed the same backward system") {
    // a table that replicates linear rates up to state 40 must reproduce the
    // linear transform (the mass beyond 40 is irrelevant for theta = 1)
    std::vector<TableEntry> entries;
    for (State n = 1; n <= 40; ++n) {
      entries.push_back({n, EventKind::Birth, 1, 0.5 * static_cast<double>(n)});
      entries.push_back({n, EventKind::Death, 1, 1.0 * static_cast<double>(n)});
    }
    const auto table = ModelSpec::general_table(entries);
    const auto lin = ModelSpec::linear({0.5}, {1.0});
    CHECK(hitting_time_laplace(table, 2, 1.0, {}, 40) ==
          doctest::Approx(hitting_time_laplace(lin, 2, 1.0)).epsilon(1e-6));
  }
  SUBCASE("immigration and bad weights are rejected") {
    const auto imm = ModelSpec::immigration_at_zero({1.0}, {2.0}, 0.4);
    CHECK_THROWS_AS((void)hitting_time_laplace(imm, 1, 0.5), domain_error);
    const auto spec = ModelSpec::linear({0.5}, {1.0});
    CHECK_THROWS_AS(
        (void)hitting_time_laplace(spec, 1, 0.5, [](State) { return 0.0; }),
        domain_error);
  }
}

TEST_CASE("transient extinction") {
  const auto spec = ModelSpec::linear({2.0}, {1.0});
  SUBCASE("zero at time zero") {
    CHECK(transient_extinction(spec, 0.0) == 0.0);
  }
  SUBCASE("closed-form value at t = 1") {
    const double expected = (1.0 - std::exp(-1.0)) / (2.0 - std::exp(-1.0));
    CHECK(transient_extinction(spec, 1.0) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
  SUBCASE("plateau reaches the ultimate extinction probability") {
    const auto a = analyze(spec);
    CHECK(transient_extinction(spec, 50.0) ==
          doctest::Approx(a.epsilon).epsilon(1e-6));
  }
}

TEST_CASE("multi-size supercritical plateau matches the root when the boundary flux is small") {
  // size-2 death rate near zero: the reachable chain and the formal root
  // analysis describe the same law up to O(mu_2)
  const auto spec = ModelSpec::linear({1.0, 0.5}, {0.5, 2e-5});
  const auto a = analyze(spec);
  SolveOptions opts;
  opts.initial_states = 1025;
  opts.max_states = 1025;
  opts.allow_deficit = true;
  const double times[] = {50.0};
  const auto pmf = solve_state_probabilities(spec, {{1, 1.0}}, times, opts);
  CHECK(std::abs(pmf[0].probs[0] - a.epsilon) < 1e-4);
}

TEST_CASE("multi-size death rates shift the reachable-chain plateau") {
  // with a large size-2 death rate the nonnegative chain and the formal
  // root analysis disagree by a boundary term: that gap is real, not noise
  const auto spec = ModelSpec::linear({1.0, 0.5}, {0.5, 0.25});
  const auto a = analyze(spec);
  SolveOptions opts;
  opts.initial_states = 1025;
  opts.max_states = 1025;
  opts.allow_deficit = true;
  const double times[] = {50.0};
  const auto pmf = solve_state_probabilities(spec, {{1, 1.0}}, times, opts);
  CHECK(std::abs(pmf[0].probs[0] - a.epsilon) > 0.1);
}

TEST_CASE("analysis rejects unusable inputs") {
  CHECK_THROWS_AS((void)analyze(ModelSpec::constant({1.0}, {1.0})), domain_error);
  CHECK_THROWS_AS((void)analyze(ModelSpec::linear({1.0, 0.0}, {1.0})),
                  domain_error);  // zero leading birth rate
}
