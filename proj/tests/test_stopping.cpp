#include <catch2/catch_amalgamated.hpp>

#include "corpus.hpp"
#include "oracles.hpp"
#include "ssg/distributions.hpp"
#include "ssg/lattice.hpp"
#include "ssg/rng.hpp"
#include "ssg/stopping.hpp"

using namespace ssg;

TEST_CASE("count lattice ranking") {
  CountLattice lat(3, 6);
  for (int t = 0; t <= 4; ++t) {
    std::vector<int> n = lat.first(t);
    std::int64_t expect = 0;
    do {
      CHECK(lat.rank(n) == expect);
      int sum = 0;
      for (int v : n) sum += v;
      CHECK(sum == t);
      ++expect;
    } while (lat.next(n));
    CHECK(expect == lat.slice_size(t));
  }
  CountLattice bin(2, 12);
  std::vector<int> n{3, 4};
  CHECK(bin.rank(n) == 3);  // binary rank is the count of symbol 0
}

TEST_CASE("horizon bound, binary closed form") {
  // Clasher with gamma=1: K = 2 * (1/2) * (1/2) = 1/2.
  const auto p = corpus::clasher_problem(1.0, 0.05, beta_prior(1.0, 1.0));
  CHECK(horizon_bound(p) == 9);
  const auto pc = corpus::clasher_problem(1.0, 0.5, beta_prior(1.0, 1.0));
  CHECK(horizon_bound(pc) == 0);

  // A dominant own action kills the value of sampling at any cost.
  StoppingProblem dom;
  dom.payoff = {{2.0, 2.0}, {1.0, 1.0}};
  dom.prior = beta_prior(1.0, 1.0);
  dom.cost = 0.001;
  CHECK(horizon_bound(dom) == 0);
}

TEST_CASE("solve: dominant action stops immediately") {
  StoppingProblem dom;
  dom.payoff = {{2.0, 2.0}, {1.0, 1.0}};
  dom.prior = beta_prior(1.0, 1.0);
  dom.cost = 0.01;
  const auto pol = solve(dom);
  CHECK(pol.horizon == 0);
  CHECK(pol.root_stops());
  CHECK(pol.chosen[0][0] == 0);
}

TEST_CASE("solve: clasher root continues at c=0.05") {
  // One-step gain of Beta(1,1) at the indifference mean is 1/6 > 0.05.
  const auto pol = solve(corpus::clasher_problem(1.0, 0.05, beta_prior(1.0, 1.0)));
  CHECK_FALSE(pol.root_stops());
  // And stops at the root once the cost exceeds the one-step gain by enough.
  const auto pol2 = solve(corpus::clasher_problem(1.0, 0.4, beta_prior(1.0, 1.0)));
  CHECK(pol2.horizon == 1);
  CHECK(pol2.root_stops());
}

TEST_CASE("policy invariants: Bellman consistency") {
  for (double c : {0.05, 0.11, 0.3}) {
    const auto p = corpus::clasher_problem(1.0, c, beta_prior(2.0, 1.0));
    const auto pol = solve(p);
    CountLattice lat = pol.lattice();
    for (int t = 0; t <= pol.horizon; ++t) {
      std::vector<int> n = lat.first(t);
      std::int64_t node = 0;
      do {
        CHECK(pol.value[t][node] >= pol.stop_value[t][node] - 1e-12);
        if (t == pol.horizon) CHECK(pol.stops(t, node));
        if (pol.stops(t, node)) {
          CHECK(pol.value[t][node] == Catch::Approx(pol.stop_value[t][node]).margin(1e-12));
        } else {
          const auto mean = pol.node_mean(n);
          double cont = -pol.cost;
          std::vector<int> child = n;
          for (int y = 0; y < 2; ++y) {
            child[y] += 1;
            cont += mean[y] * pol.value[t + 1][lat.rank(child)];
            child[y] -= 1;
          }
          CHECK(pol.value[t][node] == Catch::Approx(cont).margin(1e-10));
        }
        ++node;
      } while (lat.next(n));
    }
  }
}

TEST_CASE("value is midpoint-convex in the posterior mean at fixed depth") {
  const auto pol = solve(corpus::clasher_problem(1.0, 0.05, beta_prior(1.0, 1.0)));
  for (int t = 0; t <= pol.horizon; ++t) {
    const auto& V = pol.value[t];
    for (std::size_t k = 0; k + 2 < V.size(); ++k)
      CHECK(V[k] + V[k + 2] >= 2.0 * V[k + 1] - 1e-9);
  }
}

TEST_CASE("never stop indifferent: stop choices match the last observation") {
  for (double c : {0.05, 0.13}) {
    for (auto prior : {beta_prior(1.0, 1.0), beta_prior(2.0, 0.7)}) {
      const auto p = corpus::clasher_problem(1.0, c, prior);
      const auto pol = solve(p);
      CountLattice lat = pol.lattice();
      for (int t = 1; t <= pol.horizon; ++t) {
        std::vector<int> n = lat.first(t);
        std::int64_t node = 0;
        do {
          if (pol.stops(t, node)) {
            // Reachable from a continuing parent via symbol y?
            for (int y = 0; y < 2; ++y) {
              if (n[y] == 0) continue;
              std::vector<int> parent = n;
              parent[y] -= 1;
              if (!pol.stops(t - 1, lat.rank(parent))) {
                std::uint32_t ties = 0;
                pol.node_stop_value(n, nullptr, &ties);
                CHECK((ties & (ties - 1)) == 0);  // singleton best response
                // best response to a pure last observation y
                const int br = p.payoff[1][y] > p.payoff[0][y] ? 1 : 0;
                CHECK(pol.chosen[t][node] == br);
              }
            }
          }
          ++node;
        } while (lat.next(n));
      }
    }
  }
}

TEST_CASE("lower cost shrinks the stop region and delays stopping") {
  const auto hi = solve(corpus::clasher_problem(1.0, 0.15, beta_prior(1.0, 1.0)));
  const auto lo = solve(corpus::clasher_problem(1.0, 0.05, beta_prior(1.0, 1.0)));
  REQUIRE(lo.horizon >= hi.horizon);
  CountLattice lat = hi.lattice();
  for (int t = 0; t <= hi.horizon; ++t) {
    for (std::int64_t node = 0; node < lat.slice_size(t); ++node)
      if (lo.stops(t, node)) CHECK(hi.stops(t, node));
  }
  // FOSD of stopping times, under the prior and under fixed sigmas.
  const auto tail_hi = stop_time_tail_under_prior(hi);
  const auto tail_lo = stop_time_tail_under_prior(lo);
  for (int t = 0; t <= hi.horizon; ++t) CHECK(tail_lo[t] >= tail_hi[t] - 1e-12);
  for (double s : {0.2, 0.5, 0.8}) {
    const auto dh = joint_action_time(hi, s);
    const auto dl = joint_action_time(lo, s);
    for (int t = 0; t <= hi.horizon; ++t) {
      const double cdf_h = dh.joint_cdf(0, t) + dh.joint_cdf(1, t);
      const double cdf_l = dl.joint_cdf(0, t) + dl.joint_cdf(1, t);
      CHECK(cdf_l <= cdf_h + 1e-12);
    }
  }
}

TEST_CASE("joint action/time: hand-built depth-1 policy") {
  StoppingPolicy pol;
  pol.payoff = {{0.0, 0.0}, {0.0, 0.0}};
  pol.prior = beta_prior(1.0, 1.0);
  pol.cost = 0.1;
  pol.horizon = 1;
  pol.decision = {{0}, {1, 1}};
  // depth-1 nodes in rank order: (n0,n1) = (0,1) then (1,0)
  pol.chosen = {{0}, {1, 0}};
  const auto d = joint_action_time(pol, 0.7);
  CHECK(d.p[1][1] == Catch::Approx(0.7));
  CHECK(d.p[0][1] == Catch::Approx(0.3));
  CHECK(d.total_mass() == Catch::Approx(1.0));
}

TEST_CASE("joint action/time: immediate stop concentrates at the root") {
  StoppingProblem dom;
  dom.payoff = {{2.0, 2.0}, {1.0, 1.0}};
  dom.prior = beta_prior(1.0, 1.0);
  dom.cost = 0.01;
  const auto pol = solve(dom);
  const auto d = joint_action_time(pol, 0.42);
  CHECK(d.p[0][0] == Catch::Approx(1.0));
  CHECK(d.total_mass() == Catch::Approx(1.0));
}

namespace {

StoppingProblem random_binary_problem(SplitMix64& rng, int max_horizon) {
  for (;;) {
    StoppingProblem p;
    p.payoff = {{3.0 * rng.next_double(), 3.0 * rng.next_double()},
                {3.0 * rng.next_double(), 3.0 * rng.next_double()}};
    p.prior = beta_prior(0.4 + 2.0 * rng.next_double(), 0.4 + 2.0 * rng.next_double());
    p.cost = 0.05 + 0.45 * rng.next_double();
    if (horizon_bound(p) <= max_horizon && horizon_bound(p) >= 1) return p;
  }
}

}  // namespace

TEST_CASE("forward pass equals exhaustive sequence enumeration") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 8; ++trial) {
    const auto p = random_binary_problem(rng, 10);
    const auto pol = solve(p);
    const double sigma = rng.next_double();
    const auto fast = joint_action_time(pol, sigma);
    const auto slow = oracles::enumerate_action_time(pol, {1.0 - sigma, sigma});
    double tv = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int t = 0; t <= pol.horizon; ++t) tv += std::fabs(fast.p[a][t] - slow[a][t]);
    CHECK(tv <= 1e-12);
    CHECK(fast.total_mass() == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("prior-predictive tails and the sampling-cost bound") {
  // Immediate stop: zero tail.
  StoppingProblem dom;
  dom.payoff = {{2.0, 2.0}, {1.0, 1.0}};
  dom.prior = beta_prior(1.0, 1.0);
  dom.cost = 0.01;
  CHECK(stop_time_tail_under_prior(solve(dom))[0] == 0.0);

  // Exact tails match enumeration and satisfy P(tau > T) <= 2||u|| / (c T).
  SplitMix64 rng(99);
  for (int trial = 0; trial < 6; ++trial) {
    const auto p = random_binary_problem(rng, 9);
    const auto pol = solve(p);
    const auto tail = stop_time_tail_under_prior(pol);
    const auto slow = oracles::enumerate_tail(pol);
    const double umax = oracles::max_abs_payoff(p);
    for (int t = 0; t <= pol.horizon; ++t) {
      CHECK(tail[t] == Catch::Approx(slow[t]).margin(1e-12));
      if (t >= 1) CHECK(tail[t] <= 2.0 * umax / (p.cost * t) + 1e-12);
    }
    CHECK(tail[pol.horizon] == 0.0);
  }

  const auto clasher = solve(corpus::clasher_problem(1.0, 0.05, beta_prior(1.0, 1.0)));
  CHECK(stop_time_tail_under_prior(clasher)[clasher.horizon] == 0.0);
}

TEST_CASE("myopic policy") {
  // Identical to optimal when an action dominates.
  StoppingProblem dom;
  dom.payoff = {{2.0, 2.0}, {1.0, 1.0}};
  dom.prior = beta_prior(1.0, 1.0);
  dom.cost = 0.01;
  const auto m = myopic_policy(dom);
  CHECK(m.horizon == 0);
  CHECK(m.root_stops());

  // Myopic stop region contains the optimal stop region, node by node.
  SplitMix64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = random_binary_problem(rng, 12);
    const auto opt = solve(p);
    const auto myo = myopic_policy(p);
    CountLattice lat = opt.lattice();
    for (int t = 0; t <= opt.horizon; ++t)
      for (std::int64_t node = 0; node < lat.slice_size(t); ++node)
        if (opt.stops(t, node)) CHECK(myo.stops(t, node));
  }

  // Concentrated prior near a strict best response: the one-step gain at the
  // root is zero, so the myopic rule stops immediately at any cost.
  const auto conc = corpus::clasher_problem(1.0, 0.01, beta_prior(50.0, 1.0));
  const auto mc = myopic_policy(conc);
  CHECK(mc.root_stops());
  CHECK(horizon_bound(conc) == 49);
}

TEST_CASE("stopping beliefs") {
  // Immediate stop: a point mass at the prior mean, depth 0.
  StoppingProblem dom;
  dom.payoff = {{2.0, 2.0}, {1.0, 1.0}};
  dom.prior = beta_prior(1.0, 1.0);
  dom.cost = 0.01;
  const auto atoms = stopping_belief_distribution(solve(dom), 0.3);
  REQUIRE(atoms.size() == 1);
  CHECK(atoms[0].depth == 0);
  CHECK(atoms[0].prob == Catch::Approx(1.0));
  CHECK(atoms[0].mean[1] == Catch::Approx(0.5));

  // Raising sigma FOSD-raises the stopping-mean distribution (clasher).
  const auto pol = solve(corpus::clasher_problem(1.0, 0.05, beta_prior(1.0, 1.0)));
  const auto lo = stopping_belief_distribution(pol, 0.3);
  const auto hi = stopping_belief_distribution(pol, 0.7);
  for (double cut : {0.2, 0.35, 0.5, 0.65, 0.8}) {
    double cdf_lo = 0.0, cdf_hi = 0.0;
    for (const auto& a : lo)
      if (a.mean[1] <= cut) cdf_lo += a.prob;
    for (const auto& a : hi)
      if (a.mean[1] <= cut) cdf_hi += a.prob;
    CHECK(cdf_hi <= cdf_lo + 1e-12);
  }
}

TEST_CASE("general alphabet: horizon bound, doubling check, oracle match") {
  // A 3-action choice against a 3-symbol alphabet.
  StoppingProblem rps;
  rps.payoff = {{0.0, -1.0, 1.0}, {1.0, 0.0, -1.0}, {-1.0, 1.0, 0.0}};
  rps.prior = DirichletPrior({1.0, 1.0, 1.0});
  rps.cost = 0.4;
  const int hb = horizon_bound(rps);
  CHECK(hb == 6);  // ceil(2*2/0.4 - 3 - 1)
  const auto pol = solve(rps);  // doubling self-check runs automatically
  const auto fast = joint_action_time(pol, {0.2, 0.5, 0.3});
  const auto slow = oracles::enumerate_action_time(pol, {0.2, 0.5, 0.3});
  double tv = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int t = 0; t <= pol.horizon; ++t) tv += std::fabs(fast.p[a][t] - slow[a][t]);
  CHECK(tv <= 1e-12);
  CHECK(fast.total_mass() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("derivative pass matches finite differences") {
  const auto pol = solve(corpus::clasher_problem(1.0, 0.05, beta_prior(1.0, 1.0)));
  for (double s : {0.2, 0.5, 0.8}) {
    const auto d = action_distribution_derivative(pol, s);
    const double h = 1e-6;
    const auto up = action_distribution(pol, {1.0 - s - h, s + h});
    const auto dn = action_distribution(pol, {1.0 - s + h, s - h});
    for (int a = 0; a < 2; ++a)
      CHECK(d.dprob[a] == Catch::Approx((up[a] - dn[a]) / (2.0 * h)).margin(1e-6));
  }
}

TEST_CASE("choice polynomial agrees with the forward pass") {
  const auto pol = solve(corpus::clasher_problem(1.0, 0.05, beta_prior(1.0, 1.0)));
  CHECK(pol.horizon == 9);
  const auto coeff = choice_polynomial(pol, 0, pol.horizon);  // clasher's high action is a=0
  CHECK(coeff.size() == static_cast<std::size_t>(pol.horizon + 1));
  for (double s = 0.0; s <= 1.0; s += 0.05) {
    const auto d = joint_action_time(pol, s);
    double direct = 0.0;
    for (int t = 0; t <= pol.horizon; ++t) direct += d.p[0][t];
    CHECK(polynomial_eval(coeff, s) == Catch::Approx(direct).margin(1e-10));
  }
}
