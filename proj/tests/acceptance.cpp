// Acceptance suite: one line per criterion, [PASS]/[FAIL] plus detail.
// Exit code equals the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "oracles.hpp"
#include "ssg/analogy.hpp"
#include "ssg/analysis.hpp"
#include "ssg/boundaries.hpp"
#include "ssg/io.hpp"
#include "ssg/misspec.hpp"
#include "ssg/rng.hpp"
#include "ssg/sweeps.hpp"

using namespace ssg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

StoppingProblem random_binary_problem(SplitMix64& rng, int max_horizon) {
  for (;;) {
    StoppingProblem p;
    p.payoff = {{3.0 * rng.next_double(), 3.0 * rng.next_double()},
                {3.0 * rng.next_double(), 3.0 * rng.next_double()}};
    p.prior = beta_prior(0.4 + 2.0 * rng.next_double(), 0.4 + 2.0 * rng.next_double());
    p.cost = 0.05 + 0.45 * rng.next_double();
    const int hb = horizon_bound(p);
    if (hb >= 1 && hb <= max_horizon) return p;
  }
}

// The binary policies exercised throughout the suite.
std::vector<StoppingProblem> binary_corpus() {
  std::vector<StoppingProblem> out;
  for (double c : {0.01, 0.05, 0.13}) {
    for (double g : {1.0, 3.0})
      for (auto pr : {beta_prior(1.0, 1.0), beta_prior(2.0, 0.7), beta_prior(0.8, 2.2)})
        out.push_back(corpus::clasher_problem(g, c, pr));
    for (double d : {0.25, 1.0, 4.0})
      out.push_back(corpus::matcher_problem(d, c, beta_prior(1.0, 1.0)));
  }
  SplitMix64 rng(7771);
  for (int k = 0; k < 10; ++k) out.push_back(random_binary_problem(rng, 40));
  return out;
}

// ---- criterion 1 ----------------------------------------------------------

Outcome criterion_oracle_equivalence() {
  const double t0 = now_seconds();
  SplitMix64 rng(20240811);
  double worst_tv = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const StoppingProblem p = random_binary_problem(rng, 12);
    const StoppingPolicy pol = solve(p, no_value_tables());
    const double sigma = rng.next_double();
    const auto fast = joint_action_time(pol, sigma);
    const auto slow = oracles::enumerate_action_time(pol, {1.0 - sigma, sigma});
    double l1 = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int t = 0; t <= pol.horizon; ++t) l1 += std::fabs(fast.p[a][t] - slow[a][t]);
    worst_tv = std::max(worst_tv, 0.5 * l1);
  }
  const double dt = now_seconds() - t0;
  std::ostringstream os;
  os << "worst TV " << worst_tv << ", " << dt << " s";
  return {worst_tv <= 1e-12 && dt < 10.0, os.str()};
}

// ---- criterion 2 ----------------------------------------------------------

Outcome criterion_misspec_example() {
  const auto payoff = corpus::misspec_payoff();
  const auto prior = corpus::misspec_prior();
  const auto low = misspec_detector(payoff, prior, 0.2, {0.0, 0.0, 1.0}, 30);
  const auto high = misspec_detector(payoff, prior, 0.4, {0.0, 0.0, 1.0}, 30);
  const bool gain_ok = std::fabs(low.root_gain - 1.0 / 3.0) <= 1e-12 &&
                       std::fabs(low.root_stop_value - 0.25) <= 1e-12 &&
                       std::fabs(low.root_expected_value - 7.0 / 12.0) <= 1e-12;
  const bool mass_ok = low.never_stop_mass == 1.0 && high.never_stop_mass == 0.0;
  std::ostringstream os;
  os << "computed v=" << fmt17(low.root_stop_value) << " (=1/3), E[v|y]="
     << fmt17(low.root_expected_value) << " (=7/18), gain=" << fmt17(low.root_gain)
     << " (=1/18); never-stop mass " << low.never_stop_mass << " at c=0.2, "
     << high.never_stop_mass << " at c=0.4";
  return {gain_ok && mass_ok, os.str()};
}

// ---- criterion 3 ----------------------------------------------------------

Outcome criterion_tail_bound() {
  int violations = 0;
  int checked = 0;
  auto probe = [&](const StoppingProblem& p) {
    const StoppingPolicy pol = solve(p, no_value_tables());
    const auto tail = stop_time_tail_under_prior(pol);
    const double umax = oracles::max_abs_payoff(p);
    for (int t = 1; t <= pol.horizon; ++t) {
      ++checked;
      if (tail[t] > 2.0 * umax / (p.cost * t) + 1e-12) ++violations;
    }
  };
  for (const auto& p : binary_corpus()) probe(p);
  // Non-binary alphabet coverage.
  for (double c : {0.2, 0.4}) {
    StoppingProblem rps;
    rps.payoff = {{0.0, -1.0, 1.0}, {1.0, 0.0, -1.0}, {-1.0, 1.0, 0.0}};
    rps.prior = DirichletPrior({1.0, 1.0, 1.0});
    rps.cost = c;
    probe(rps);
  }
  std::ostringstream os;
  os << checked << " cells, " << violations << " violations";
  return {violations == 0 && checked > 0, os.str()};
}

// ---- criterion 4 ----------------------------------------------------------

Outcome criterion_horizon_and_boundaries() {
  const auto p = corpus::clasher_problem(1.0, 0.05, beta_prior(1.0, 1.0));
  const int hb = horizon_bound(p);
  bool ok = hb == 9;
  // Solve on a deeper lattice: every node of depth >= 9 must stop.
  SolveOptions opts;
  opts.horizon_override = 18;
  const StoppingPolicy pol = solve(p, opts);
  CountLattice lat = pol.lattice();
  for (int t = 9; t <= pol.horizon; ++t)
    for (std::int64_t node = 0; node < lat.slice_size(t); ++node) ok = ok && pol.stops(t, node);
  const Boundaries b = boundaries(p);
  bool mono = true;
  for (int t = 0; t + 1 <= b.horizon; ++t)
    mono = mono && b.upper[t + 1] <= b.upper[t] + 1e-9 && b.lower[t + 1] >= b.lower[t] - 1e-9;
  const bool meet = std::fabs(b.upper[b.horizon] - 0.5) < 2e-6 &&
                    std::fabs(b.lower[b.horizon] - 0.5) < 2e-6 &&
                    std::fabs(b.sigma_tilde - 0.5) < 1e-12;
  std::ostringstream os;
  os << "horizon " << hb << ", boundaries " << (mono ? "monotone" : "NOT monotone")
     << ", meet at " << b.upper[b.horizon];
  return {ok && mono && meet, os.str()};
}

// ---- criterion 5 ----------------------------------------------------------

Outcome criterion_never_stop_indifferent() {
  int exceptions = 0;
  int checked = 0;
  for (const auto& p : binary_corpus()) {
    const StoppingPolicy pol = solve(p);
    CountLattice lat = pol.lattice();
    for (int t = 1; t <= pol.horizon; ++t) {
      std::vector<int> n = lat.first(t);
      std::int64_t node = 0;
      do {
        if (pol.stops(t, node)) {
          for (int y = 0; y < 2; ++y) {
            if (n[y] == 0) continue;
            std::vector<int> parent = n;
            parent[y] -= 1;
            if (pol.stops(t - 1, lat.rank(parent))) continue;
            ++checked;
            std::uint32_t ties = 0;
            pol.node_stop_value(n, nullptr, &ties);
            const bool singleton = (ties & (ties - 1)) == 0;
            const int br = p.payoff[1][y] > p.payoff[0][y] ? 1 : 0;
            if (!singleton || pol.chosen[t][node] != br) ++exceptions;
          }
        }
        ++node;
      } while (lat.next(n));
    }
  }
  std::ostringstream os;
  os << checked << " boundary stops, " << exceptions << " exceptions";
  return {exceptions == 0 && checked > 0, os.str()};
}

// ---- criterion 6 ----------------------------------------------------------

Outcome criterion_monotone_statics() {
  const double t0 = now_seconds();
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(k / 20.0);
  auto tgrid = [](int h) {
    std::vector<int> t;
    for (int k = 0; k <= h; ++k) t.push_back(k);
    return t;
  };
  double worst = 0.0;
  {  // (i) rising constant bonus
    const auto base = corpus::matcher_problem(1.0, 0.05, beta_prior(1.0, 1.0));
    const auto rep = comparative_statics_payoff(base, 0, {0.0, 0.5, 1.0, 3.0}, grid, tgrid(16));
    worst = std::max(worst, rep.worst_violation);
    const auto basec = corpus::clasher_problem(1.0, 0.05, beta_prior(1.0, 1.0));
    const auto repc = comparative_statics_payoff(basec, 0, {0.0, 0.5, 1.0, 3.0}, grid, tgrid(16));
    worst = std::max(worst, repc.worst_violation);
  }
  {  // (ii) SSD chain of length 3
    const auto base = corpus::clasher_problem(1.0, 0.05, beta_prior(1.0, 1.0));
    const std::vector<DirichletPrior> chain{beta_prior(1.0, 2.0), beta_prior(1.0, 1.0),
                                            beta_prior(2.0, 1.0)};
    const auto rep = comparative_statics_prior(base, chain, grid, tgrid(9));
    worst = std::max(worst, rep.worst_violation);
  }
  {  // (iii) monotone in the true distribution, including the exact derivative
    for (double c : {0.05, 0.02}) {
      const auto base = corpus::clasher_problem(1.0, c, beta_prior(1.0, 1.0));
      const auto rep = comparative_statics_sigma(base, grid, tgrid(horizon_bound(base)));
      worst = std::max(worst, rep.worst_violation);
    }
  }
  const double dt = now_seconds() - t0;
  std::ostringstream os;
  os << "worst violation " << worst << ", " << dt << " s";
  return {worst <= 1e-10 && dt < 60.0, os.str()};
}

// ---- criterion 7 ----------------------------------------------------------

Outcome criterion_nash_convergence() {
  const auto ext = corpus::pennies_ext(4.0, 1.0, 0.2);
  const std::vector<double> grid{0.2, 0.1, 0.05, 0.02, 0.01, 0.005};
  const auto rows = cost_sweep(ext, grid);
  const std::size_t n = rows.size();
  bool tail_mono = rows[n - 1].nash_distance <= rows[n - 2].nash_distance + 1e-9 &&
                   rows[n - 2].nash_distance <= rows[n - 3].nash_distance + 1e-9;
  bool all_conv = true;
  for (const auto& r : rows) all_conv = all_conv && r.status == "converged";
  const bool close = rows.back().nash_distance < 0.05;
  std::ostringstream os;
  os << "distance at c=0.005 is " << rows.back().nash_distance << " (tail "
     << rows[n - 3].nash_distance << " -> " << rows[n - 2].nash_distance << " -> "
     << rows[n - 1].nash_distance << ")";
  return {tail_mono && all_conv && close, os.str()};
}

// ---- criterion 8 ----------------------------------------------------------

Outcome criterion_rationalizability() {
  bool ok = true;
  std::ostringstream os;
  {
    ExtendedGame ext;
    ext.game = corpus::twostep_game();
    ext.priors = {DirichletPrior({1.0, 1.0}), DirichletPrior({1.0, 1.0})};
    ext.costs = {0.1, 0.1};
    const auto rows = rationalizability_sweep(ext, {0.5, 0.2, 0.1, 0.05, 0.02});
    for (std::size_t k = 0; k + 1 < rows.size(); ++k)
      ok = ok && rows[k + 1].certified_k >= rows[k].certified_k;
    ok = ok && rows.back().certified_k == 2;
    os << "2-step reaches k=" << rows.back().certified_k;
  }
  {
    ExtendedGame ext;
    ext.game = corpus::threestep_game();
    ext.priors = {DirichletPrior({1.0, 1.0, 1.0}), DirichletPrior({1.0, 1.0, 1.0})};
    ext.costs = {0.5, 0.5};
    const auto rows = rationalizability_sweep(ext, {0.5, 0.2, 0.1});
    for (std::size_t k = 0; k + 1 < rows.size(); ++k)
      ok = ok && rows[k + 1].certified_k >= rows[k].certified_k;
    ok = ok && rows.back().certified_k == 3;
    os << "; 3-step reaches k=" << rows.back().certified_k;
  }
  return {ok, os.str()};
}

// ---- criterion 9 ----------------------------------------------------------

Outcome criterion_dynamics_and_stability() {
  Solver sv(corpus::pennies_ext(1.0, 1.0, 0.05));
  const auto res = sse_solve(sv);
  SplitMix64 rng(99);
  bool ok = res.status == "converged";
  double worst_resid = 0.0, worst_gap = 0.0;
  for (int run = 0; run < 5; ++run) {
    MixedProfile s0 = uniform_profile(sv.ext().game);
    for (auto& d : s0.dist) {
      const double x = 0.05 + 0.9 * rng.next_double();
      d = {x, 1.0 - x};
    }
    const auto trace = dynamics_run(sv, s0, {.kind = "cesaro"}, 200000, false);
    worst_resid = std::max(worst_resid, trace.residuals.back());
    for (std::size_t i = 0; i < 2; ++i)
      worst_gap = std::max(worst_gap, std::fabs(trace.sigmas.back().dist[i][0] -
                                                res.sigma.dist[i][0]));
  }
  ok = ok && worst_resid < 1e-4 && worst_gap < 1e-3;
  const auto rep = stability_check(sv, res.sigma);
  ok = ok && rep.b0_prime * rep.b1_prime <= 0.0 && rep.eig1.real() < 0.0 &&
       rep.eig2.real() < 0.0;
  std::ostringstream os;
  os << "worst residual " << worst_resid << ", gap to solver " << worst_gap << ", b0'*b1' = "
     << rep.b0_prime * rep.b1_prime;
  return {ok, os.str()};
}

// ---- criterion 10 ---------------------------------------------------------

Outcome criterion_myopic() {
  bool contained = true;
  for (const auto& p : binary_corpus()) {
    const auto opt = solve(p, no_value_tables());
    const auto myo = myopic_policy(p, no_value_tables());
    CountLattice lat = opt.lattice();
    for (int t = 0; t <= opt.horizon; ++t)
      for (std::int64_t node = 0; node < lat.slice_size(t); ++node)
        if (opt.stops(t, node) && !myo.stops(t, node)) contained = false;
  }
  // Divergence instance: the myopic equilibrium stays away from Nash while
  // the optimal one converges.
  ExtendedGame ext = corpus::pennies_ext(1.0, 1.0, 0.1);
  ext.priors[1] = beta_prior(4.0, 2.0);
  const std::vector<double> grid{0.005, 0.002, 0.001};
  const auto opt_rows = cost_sweep(ext, grid, 1e-8, 10000, true, 1, false);
  const auto myo_rows = cost_sweep(ext, grid, 1e-8, 10000, true, 1, true);
  bool diverge = opt_rows.back().nash_distance < 0.05;
  for (const auto& r : myo_rows) diverge = diverge && r.nash_distance > 0.3;
  std::ostringstream os;
  os << "stop-region containment " << (contained ? "holds" : "VIOLATED")
     << "; optimal distance " << opt_rows.back().nash_distance << " vs myopic "
     << myo_rows.back().nash_distance;
  return {contained && diverge, os.str()};
}

// ---- criterion 11 ---------------------------------------------------------

Outcome criterion_determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path supplied"};
  const fs::path dir = fs::temp_directory_path() / "ssg_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  json cfg{{"command", "dynamics"},
           {"extended_game", extended_game_to_json(corpus::pennies_ext(4.0, 1.0, 0.05))},
           {"variant", "finite_population"},
           {"population", 9},
           {"steps", 400},
           {"seed", 777},
           {"sigma0", {{"M", {0.7, 0.3}}, {"C", {0.4, 0.6}}}}};
  std::ofstream(dir / "cfg.json") << cfg.dump(2);
  auto run = [&](const std::string& sub) {
    std::ostringstream cmd;
    cmd << cli << " --config " << (dir / "cfg.json") << " --out " << (dir / sub) << " > "
        << (dir / (sub + ".stdout")) << " 2>/dev/null";
    return std::system(cmd.str().c_str());
  };
  if (run("r1") != 0 || run("r2") != 0) return {false, "CLI run failed"};
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };
  const bool same = slurp(dir / "r1" / "trace.csv") == slurp(dir / "r2" / "trace.csv") &&
                    !slurp(dir / "r1" / "trace.csv").empty();
  fs::remove_all(dir);
  return {same, same ? "byte-identical outputs" : "outputs differ"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  struct Row {
    const char* name;
    Outcome out;
  };
  std::vector<Row> rows;
  rows.push_back({"1 oracle equivalence (20 problems, 1e-12 TV)", criterion_oracle_equivalence()});
  rows.push_back({"2 misspecification example rationals and masses", criterion_misspec_example()});
  rows.push_back({"3 prior-predictive tail bound, zero violations", criterion_tail_bound()});
  rows.push_back({"4 horizon 9 and collapsing boundaries", criterion_horizon_and_boundaries()});
  rows.push_back({"5 unique boundary best responses", criterion_never_stop_indifferent()});
  rows.push_back({"6 monotone statics suites (payoff/prior/sigma)", criterion_monotone_statics()});
  rows.push_back({"7 vanishing-cost convergence to Nash", criterion_nash_convergence()});
  rows.push_back({"8 certified rationalizability sweeps", criterion_rationalizability()});
  rows.push_back({"9 averaged dynamics and stability", criterion_dynamics_and_stability()});
  rows.push_back({"10 myopic containment and divergence", criterion_myopic()});
  rows.push_back({"11 byte-identical reruns", criterion_determinism(cli)});

  int failures = 0;
  for (const auto& r : rows) {
    if (!r.out.pass) ++failures;
    std::printf("[%s] criterion %s — %s\n", r.out.pass ? "PASS" : "FAIL", r.name,
                r.out.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(rows.size()) - failures, rows.size());
  return failures;
}
