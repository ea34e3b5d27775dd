#include <catch2/catch_amalgamated.hpp>

#include "corpus.hpp"
#include "ssg/boundaries.hpp"
#include "ssg/distributions.hpp"

using namespace ssg;

TEST_CASE("indifference point of the clasher") {
  const auto p = corpus::clasher_problem(1.0, 0.05, beta_prior(1.0, 1.0));
  const auto bs = binary_structure(p);
  REQUIRE(bs.sigma_tilde.has_value());
  CHECK(*bs.sigma_tilde == Catch::Approx(0.5));
  CHECK(bs.gain_const == Catch::Approx(0.5));

  // gamma != 1 shifts the indifference point to 1/(1+gamma).
  const auto p2 = corpus::clasher_problem(3.0, 0.05, beta_prior(1.0, 1.0));
  CHECK(*binary_structure(p2).sigma_tilde == Catch::Approx(0.25));
}

TEST_CASE("boundaries collapse monotonically to the indifference point") {
  const auto p = corpus::clasher_problem(1.0, 0.05, beta_prior(1.0, 1.0));
  const Boundaries b = boundaries(p);
  CHECK(b.horizon == 9);
  CHECK(b.sigma_tilde == Catch::Approx(0.5));
  for (int t = 0; t + 1 <= b.horizon; ++t) {
    CHECK(b.upper[t + 1] <= b.upper[t] + 1e-9);
    CHECK(b.lower[t + 1] >= b.lower[t] - 1e-9);
  }
  for (int t = 0; t <= b.horizon; ++t) {
    CHECK(b.lower[t] <= b.sigma_tilde + 1e-9);
    CHECK(b.upper[t] >= b.sigma_tilde - 1e-9);
  }
  // Collapse at the horizon: thresholds meet the indifference point.
  CHECK(b.upper[b.horizon] == Catch::Approx(0.5).margin(2e-6));
  CHECK(b.lower[b.horizon] == Catch::Approx(0.5).margin(2e-6));
  // Interior thresholds are strictly apart below the horizon.
  CHECK(b.upper[0] > 0.55);
  CHECK(b.lower[0] < 0.45);
}

TEST_CASE("boundaries require an interior indifference point") {
  StoppingProblem dom;
  dom.payoff = {{2.0, 2.0}, {1.0, 1.0}};
  dom.prior = beta_prior(1.0, 1.0);
  dom.cost = 0.05;
  CHECK_THROWS_AS(boundaries(dom), UnsupportedError);
}

TEST_CASE("deposited stopping means lie outside the continuation band") {
  const auto p = corpus::clasher_problem(1.0, 0.05, beta_prior(1.0, 1.0));
  const auto pol = solve(p);
  const auto atoms = stopping_belief_distribution(pol, 0.5);
  REQUIRE(!atoms.empty());
  for (const auto& a : atoms) {
    const double s = p.prior.alpha0 + a.depth;  // parameter sum at the stop
    const auto [lo, hi] = boundaries_at(p, s);
    const bool outside = a.mean[1] <= lo + 2e-6 || a.mean[1] >= hi - 2e-6;
    CHECK(outside);
  }
}
