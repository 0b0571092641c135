// Runs every primary acceptance criterion once and prints one PASS/FAIL line
// per criterion. Exit status is non-zero when any criterion fails.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bkl/config.hpp"
#include "bkl/dynamics.hpp"
#include "bkl/experiments.hpp"
#include "bkl/game.hpp"
#include "bkl/integrator.hpp"
#include "bkl/solvers.hpp"
#include "support/scenarios.hpp"
#include "support/synthetic_game.hpp"

using namespace bkl;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

int g_failures = 0;

void criterion(const char* name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.str().c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int k = 0; k < e; ++k) r *= b;
  return r;
}

BklGame game_of(const RunConfig& c) { return scenarios::make_game(c); }

// Default scenario at the coarse step with the sweep's attrition rates, so
// no branch ends before the horizon.
RunConfig full_depth_config() {
  RunConfig c = apply_scenario_overrides(RunConfig{}, RunConfig{}.sweep.overrides);
  c.game.step = 1.0;
  return c;
}

// Wraps a BKL game and checks the zero-sum identity on every leaf it scores.
class ZeroSumAudit {
 public:
  using State = GameState;
  explicit ZeroSumAudit(const BklGame& g) : g_(g) {}
  State root() const { return g_.root(); }
  int num_actions() const { return g_.num_actions(); }
  int num_stages() const { return g_.num_stages(); }
  bool is_terminal(const State& s) const { return g_.is_terminal(s); }
  State apply(const State& s, int a, int b) const { return g_.apply(s, a, b); }
  const std::vector<ActionPair>& history(const State& s) const { return s.history; }
  double utility(const State& s) const {
    const Utilities u = terminal_utility(s);
    ++leaves;
    if (u.blue + u.red != 0.0) ++violations;
    return u.blue;
  }
  mutable std::atomic<std::uint64_t> leaves{0};
  mutable std::atomic<std::uint64_t> violations{0};

 private:
  const BklGame& g_;
};
static_assert(SimultaneousGame<ZeroSumAudit>);

double lanchester_error(double h) {
  const auto x = scenarios::lanchester_instance(0.2, 0.2, 100.0, 80.0);
  const BklSystem sys(x.topo, x.params);
  const SystemState end = advance(sys, x.state, 0.0, 0.0, 10.0, h);
  const ForceLevels exact = lanchester_closed_form(100.0, 80.0, 0.1, 0.1, 10.0);
  return std::max(std::abs(end.pop_blue - exact.pop_blue), std::abs(end.pop_red - exact.pop_red));
}

}  // namespace

int main() {
  criterion("exact-solver equivalence", [](Outcome& o) {
    int synthetic_trees = 0, bkl_games = 0;
    for (std::uint64_t seed = 1; seed <= 240; ++seed) {
      synthetic::Options opt;
      opt.n_actions = 2 + static_cast<int>(seed % 4);
      opt.n_stages = 1 + static_cast<int>((seed / 4) % 3);
      opt.seed = seed * 104729;
      opt.levels = seed % 3 == 0 ? 4 : 0;
      opt.stop_probability = seed % 7 == 0 ? 0.2 : 0.0;
      synthetic::Game g(opt);
      const SolveReport f = solve_full_tree(g, g.root());
      const SolveReport n = solve_nash_dominant(g, g.root());
      o.require(f.value == n.value && f.path == n.path, "synthetic seed " + std::to_string(seed));
      ++synthetic_trees;
    }
    for (std::uint64_t seed = 1; seed <= 24; ++seed) {
      const int b = 2 + static_cast<int>(seed % 3);
      const int k = 1 + static_cast<int>((seed / 3) % 3);
      const BklGame g = game_of(scenarios::small_config(b, k, seed));
      const SolveReport f = solve_full_tree(g, g.root());
      const SolveReport n = solve_nash_dominant(g, g.root());
      o.require(f.value == n.value && f.path == n.path, "BKL seed " + std::to_string(seed));
      ++bkl_games;
    }
    o.detail << synthetic_trees << " synthetic trees, " << bkl_games
             << " BKL games, value and path identical";
  });

  criterion("count laws", [](Outcome& o) {
    std::size_t checked = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
      const int b = 2 + static_cast<int>(seed % 4);
      const int k = 1 + static_cast<int>((seed / 4) % 3);
      synthetic::Game g(b, k, seed);
      const auto ub = static_cast<std::uint64_t>(b);
      const SolveReport f = solve_full_tree(g, g.root());
      const SolveReport n = solve_nash_dominant(g, g.root());
      const SolveReport m = solve_myopic(g, g.root());
      o.require(f.leaf_evaluations == ipow(ub, 2 * k), "full count");
      o.require(m.leaf_evaluations == static_cast<std::uint64_t>(k) * ub * ub, "myopic count");
      o.require(n.leaf_evaluations >= ipow(2 * ub - 1, k) && n.leaf_evaluations <= ipow(ub, 2 * k),
                "nash-dominant bounds");
      ++checked;
    }
    const BklGame g = game_of(full_depth_config());
    const SolveReport f = solve_full_tree(g, g.root());
    const SolveReport n = solve_nash_dominant(g, g.root());
    const SolveReport m = solve_myopic(g, g.root());
    o.require(f.leaf_evaluations == 65536, "65,536 leaves on B=4, K=4");
    o.require(m.leaf_evaluations == 64, "myopic 64 on B=4, K=4");
    o.require(n.leaf_evaluations >= 2401 && n.leaf_evaluations <= 65536, "nash-dominant bounds");
    o.detail << checked << " synthetic games; default B=4 K=4: full " << f.leaf_evaluations
             << ", myopic " << m.leaf_evaluations << ", nash-dominant " << n.leaf_evaluations;
  });

  criterion("pruning effectiveness", [](Outcome& o) {
    const BklGame g = game_of(RunConfig{});
    const SolveReport f = solve_full_tree(g, g.root());
    const SolveReport n = solve_nash_dominant(g, g.root());
    const double frac = static_cast<double>(n.leaf_evaluations) / static_cast<double>(f.leaf_evaluations);
    o.require(frac <= 0.60, "leaf fraction above 0.60");
    o.require(f.value == n.value, "values differ");
    o.detail << "nash-dominant " << n.leaf_evaluations << " / full " << f.leaf_evaluations
             << " leaves = " << frac << " (bound 0.60)";
  });

  criterion("integrator correctness", [](Outcome& o) {
    const double e2 = lanchester_error(2.0), e1 = lanchester_error(1.0), e05 = lanchester_error(0.5);
    const double p1 = std::log2(e2 / e1), p2 = std::log2(e1 / e05);
    o.require(p1 >= 4.5 && p2 >= 4.5, "observed order below 4.5");
    double drift = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto x = scenarios::random_instance(13, 13, seed);
      x.params.zeta_b = x.params.zeta_r = x.params.zeta_br = x.params.zeta_rb = 0.0;
      const BklSystem sys(x.topo, x.params);
      const SystemState end = advance(sys, x.state, 0.7, 1.9, 300.0, 0.5);
      for (std::size_t i = 0; i < end.beta.size(); ++i) {
        drift = std::max(drift, std::abs(end.beta[i] - (x.state.beta[i] + x.params.omega[i] * 300.0)));
      }
      for (std::size_t j = 0; j < end.rho.size(); ++j) {
        drift = std::max(drift, std::abs(end.rho[j] - (x.state.rho[j] + x.params.nu[j] * 300.0)));
      }
    }
    o.require(drift <= 1e-10, "linear drift error above 1e-10");
    o.detail << "orders " << p1 << ", " << p2 << " (need >= 4.5); max drift error " << drift
             << " over 300 (need <= 1e-10)";
  });

  criterion("dynamics properties", [](Outcome& o) {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> lag(0.0, 3.14159);
    std::size_t samples = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      auto x = scenarios::random_instance(3 + seed % 11, 3 + (seed * 7) % 11, seed);
      x.params.kappa_br *= 5.0;
      x.params.kappa_rb *= 5.0;
      const Trajectory tr = integrate_segment(x.state, x.topo, x.params, lag(rng), lag(rng), 100.0, 0.5);
      for (std::size_t k = 1; k < tr.samples.size(); ++k) {
        const auto& a = tr.samples[k - 1].state;
        const auto& b = tr.samples[k].state;
        o.require(b.pop_blue <= a.pop_blue && b.pop_red <= a.pop_red, "population increased");
        o.require(b.pop_blue >= 0.0 && b.pop_red >= 0.0, "negative population");
        ++samples;
      }
    }
    std::uint64_t leaves = 0, violations = 0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const BklGame g = game_of(scenarios::small_config(2 + static_cast<int>(seed % 3), 2, seed));
      ZeroSumAudit audit(g);
      solve_full_tree(audit, audit.root());
      solve_nash_dominant(audit, audit.root());
      solve_myopic(audit, audit.root());
      MctsConfig mc;
      mc.seed = seed;
      solve_mcts(audit, audit.root(), mc);
      leaves += audit.leaves;
      violations += audit.violations;
    }
    o.require(violations == 0, "zero-sum identity broken");
    std::uniform_int_distribution<int> len(1, 64);
    std::uniform_real_distribution<double> phase(-50.0, 50.0);
    double lo = 1.0, hi = 0.0;
    for (int t = 0; t < 100000; ++t) {
      Vector v(static_cast<std::size_t>(len(rng)));
      for (double& p : v) p = phase(rng);
      const auto mode = t % 2 ? MeanPhaseMode::kCircular : MeanPhaseMode::kArithmetic;
      const double r = order_parameter(v, mode).magnitude;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    o.require(lo >= 0.0 && hi <= 1.0, "order parameter outside [0, 1]");
    o.detail << "100 trajectories (" << samples << " steps) monotone and non-negative; "
             << leaves << " leaves zero-sum; 100000 order parameters in [" << lo << ", " << hi << "]";
  });

  criterion("approximate-solver quality", [](Outcome& o) {
    RunConfig c;
    c.game.step = 1.0;
    SweepSpec spec = make_sweep_spec(c);
    spec.zeta_b_values = linspace(0.05, 1.0, 5);
    spec.zeta_r_values = linspace(0.05, 1.0, 5);
    spec.solvers = {"nash-dominant", "myopic", "mcts"};
    const SweepResult r = run_sweep(spec);
    o.require(r.failures() == 0, "failed cells");
    double myopic = NAN, mcts = NAN;
    for (const auto& [label, st] : r.error_stats) {
      o.detail << label << " mean abs " << st.mean_abs << " (std " << st.std_abs << "), relative "
               << st.relative_mean.value_or(NAN) << "; ";
      if (label == "myopic") myopic = st.relative_mean.value_or(NAN);
      if (label == "mcts") mcts = st.relative_mean.value_or(NAN);
    }
    const HeatmapGrid exact = r.grid("nash-dominant");
    double lo = INFINITY, hi = -INFINITY;
    for (double v : exact.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    o.require(myopic <= 0.05, "myopic relative error above 5%");
    o.require(mcts <= 0.06, "mcts relative error above 6%");
    o.detail << "exact utility range [" << lo << ", " << hi << "]; bounds 5% and 6%";
  });

  criterion("deviation penalty", [](Outcome& o) {
    const BklGame g = game_of(RunConfig{});
    const DeviationOutcome d = run_deviation(g, g.num_actions() - 1);
    o.require(d.played.size() == 4, "deviation did not reach all 4 decision points");
    o.require(d.red_deviated_utility() <= d.red_equilibrium_utility(), "deviation helped Red");
    o.detail << "Red utility " << d.red_deviated_utility() << " with psi = pi throughout vs "
             << d.red_equilibrium_utility() << " at equilibrium over " << d.played.size()
             << " decisions";
  });

  criterion("scaling bench ordering", [](Outcome& o) {
    BenchSpec spec = make_bench_spec(RunConfig{});
    spec.depths = {4};
    spec.branchings = {6};
    spec.repeats = 6;
    spec.solvers = {"full", "nash-dominant", "myopic"};
    const auto records = run_scaling_bench(spec);
    double full = NAN, nd = NAN, my = NAN;
    for (const auto& r : records) {
      o.require(r.error.empty(), r.solver + " failed: " + r.error);
      if (r.solver == "full") full = r.wall_ms_mean;
      if (r.solver == "nash-dominant") nd = r.wall_ms_mean;
      if (r.solver == "myopic") my = r.wall_ms_mean;
      o.detail << r.solver << " " << r.wall_ms_mean << " ms (" << r.leaf_evaluations << " leaves); ";
    }
    o.require(my < full, "myopic not faster than full");
    o.require(nd < full, "nash-dominant not faster than full");
    o.detail << "mean of " << spec.repeats << " runs at d=4, B=6";
  });

  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
