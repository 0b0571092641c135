#include "bkl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "bkl/error.hpp"

namespace bkl {

std::vector<std::string> unique_solver_labels(const std::vector<std::string>& solvers) {
  std::map<std::string, int> seen;
  std::vector<std::string> out;
  for (const auto& s : solvers) {
    const int n = ++seen[s];
    out.push_back(n == 1 ? s : s + "#" + std::to_string(n));
  }
  return out;
}

RunConfig apply_scenario_overrides(const RunConfig& base, const Json& patch) {
  if (patch.is_null() || (patch.is_object() && patch.empty())) return base;
  if (!patch.is_object()) throw Error(ErrorCode::kConfig, "scenario overrides must be an object");
  Json doc = config_to_json(base);
  Json scoped = patch;
  scoped.erase("sweep");
  scoped.erase("bench");
  doc.merge_patch(scoped);
  return config_from_json(doc);
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  if (count == 1) return {lo};
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(k + 1 == count ? hi : lo + (hi - lo) * static_cast<double>(k) /
                                                static_cast<double>(count - 1));
  }
  return out;
}

void SweepSpec::validate() const {
  if (zeta_b_values.empty() || zeta_r_values.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep grids must be non-empty");
  }
  for (const auto* grid : {&zeta_b_values, &zeta_r_values}) {
    for (double z : *grid) {
      if (!(z > 0.0) || !std::isfinite(z)) {
        throw Error(ErrorCode::kInvalidArgument, "sweep grid values must be positive");
      }
    }
  }
  if (solvers.empty()) throw Error(ErrorCode::kInvalidArgument, "sweep needs a solver");
  for (const auto& s : solvers) parse_solver(s);
  if (jobs < 1) throw Error(ErrorCode::kInvalidArgument, "jobs must be >= 1");
}

SweepSpec make_sweep_spec(const RunConfig& config) {
  SweepSpec spec;
  const auto& s = config.sweep;
  spec.zeta_b_values = s.zeta_b_values.empty() ? linspace(0.05, 1.0, 10) : s.zeta_b_values;
  spec.zeta_r_values = s.zeta_r_values.empty() ? linspace(0.05, 1.0, 10) : s.zeta_r_values;
  spec.solvers = s.solvers;
  spec.base = apply_scenario_overrides(config, s.overrides);
  return spec;
}

ErrorStats compute_error_stats(const HeatmapGrid& exact, const HeatmapGrid& approx) {
  if (exact.rows != approx.rows || exact.cols != approx.cols ||
      exact.values.size() != approx.values.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "heatmap grids differ in shape");
  }
  ErrorStats st;
  std::vector<double> diffs;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double abs_exact = 0.0;
  for (std::size_t k = 0; k < exact.values.size(); ++k) {
    const double e = exact.values[k];
    const double a = approx.values[k];
    if (!std::isfinite(e) || !std::isfinite(a)) continue;
    diffs.push_back(std::abs(a - e));
    lo = std::min(lo, e);
    hi = std::max(hi, e);
    abs_exact += std::abs(e);
  }
  st.cells = diffs.size();
  if (diffs.empty()) return st;
  const double n = static_cast<double>(diffs.size());
  double sum = 0.0;
  for (double d : diffs) sum += d;
  st.mean_abs = sum / n;
  double var = 0.0;
  for (double d : diffs) {
    var += (d - st.mean_abs) * (d - st.mean_abs);
    st.max_abs = std::max(st.max_abs, d);
  }
  st.std_abs = std::sqrt(var / n);
  const double range = hi - lo;
  if (range > 0.0) {
    st.normalized_mean = st.mean_abs / range;
    st.normalized_std = st.std_abs / range;
  }
  if (abs_exact > 0.0) st.relative_mean = st.mean_abs / (abs_exact / n);
  return st;
}

HeatmapGrid SweepResult::grid(const std::string& label) const {
  HeatmapGrid g;
  g.rows = zeta_b_values.size();
  g.cols = zeta_r_values.size();
  g.values.assign(g.rows * g.cols, std::numeric_limits<double>::quiet_NaN());
  bool found = false;
  for (const auto& c : cells) {
    if (c.solver != label) continue;
    found = true;
    if (c.report) g.values[c.zeta_b_index * g.cols + c.zeta_r_index] = c.report->value;
  }
  if (!found) throw Error(ErrorCode::kInvalidArgument, "no solver labelled '" + label + "'");
  return g;
}

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const SweepCell& c) { return !c.report; }));
}

namespace {

// Runs fn(i) for i in [0, count) on `jobs` threads.
template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult result;
  result.zeta_b_values = spec.zeta_b_values;
  result.zeta_r_values = spec.zeta_r_values;
  result.solver_labels = unique_solver_labels(spec.solvers);
  result.initial_utility = spec.base.initial.pop_blue - spec.base.initial.pop_red;
  for (std::size_t k = 0; k < spec.solvers.size(); ++k) {
    if (is_exact(parse_solver(spec.solvers[k]))) {
      result.reference = result.solver_labels[k];
      break;
    }
  }

  const std::size_t nb = spec.zeta_b_values.size();
  const std::size_t nr = spec.zeta_r_values.size();
  const std::size_t ns = spec.solvers.size();
  result.cells.resize(nb * nr * ns);

  parallel_for(nb * nr, spec.jobs, [&](std::size_t idx) {
    const std::size_t ib = idx / nr;
    const std::size_t ir = idx % nr;
    RunConfig cfg = spec.base;
    cfg.params.zeta_b = spec.zeta_b_values[ib];
    cfg.params.zeta_r = spec.zeta_r_values[ir];
    std::optional<BklGame> game;
    std::string setup_error;
    try {
      Scenario sc = build_scenario(cfg);
      game.emplace(std::move(sc.topology), std::move(sc.params), std::move(sc.game),
                   std::move(sc.initial));
    } catch (const std::exception& e) {
      setup_error = e.what();
    }
    const std::string digest = config_digest(cfg);
    for (std::size_t k = 0; k < ns; ++k) {
      SweepCell& cell = result.cells[idx * ns + k];
      cell.zeta_b_index = ib;
      cell.zeta_r_index = ir;
      cell.zeta_b = cfg.params.zeta_b;
      cell.zeta_r = cfg.params.zeta_r;
      cell.solver = result.solver_labels[k];
      if (!game) {
        cell.error = setup_error;
        continue;
      }
      try {
        SolveReport r = solve(parse_solver(spec.solvers[k]), *game, game->root(), cfg.solver.mcts);
        r.config_digest = digest;
        cell.report = std::move(r);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  });

  if (result.reference) {
    const HeatmapGrid exact = result.grid(*result.reference);
    for (const auto& label : result.solver_labels) {
      if (label == *result.reference) continue;
      result.error_stats.emplace_back(label, compute_error_stats(exact, result.grid(label)));
    }
  }
  return result;
}

void BenchSpec::validate() const {
  if (depths.empty() || branchings.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "bench needs depths and branchings");
  }
  if (repeats < 1) throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  if (!(window > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bench window must be positive");
  if (solvers.empty()) throw Error(ErrorCode::kInvalidArgument, "bench needs a solver");
  for (const auto& s : solvers) parse_solver(s);
}

BenchSpec make_bench_spec(const RunConfig& config) {
  BenchSpec spec;
  spec.depths = config.bench.depths;
  spec.branchings = config.bench.branchings;
  spec.repeats = config.bench.repeats;
  spec.solvers = config.bench.solvers;
  spec.window = config.bench.window;
  spec.base = apply_scenario_overrides(config, config.bench.overrides);
  return spec;
}

RunConfig bench_cell_config(const BenchSpec& spec, int depth, int branching) {
  RunConfig cfg = spec.base;
  cfg.game.n_actions = branching;
  cfg.game.decision_times.clear();
  const double t0 = spec.base.game.decision_times.empty() ? 0.0
                                                           : spec.base.game.decision_times.front();
  for (int k = 0; k < depth; ++k) cfg.game.decision_times.push_back(t0 + k * spec.window);
  cfg.game.horizon = t0 + depth * spec.window;
  cfg.game.step = std::min(cfg.game.step, spec.window);
  return cfg;
}

std::vector<BenchRecord> run_scaling_bench(const BenchSpec& spec) {
  spec.validate();
  const auto labels = unique_solver_labels(spec.solvers);
  std::vector<BenchRecord> records;
  for (int d : spec.depths) {
    for (int b : spec.branchings) {
      const RunConfig cfg = bench_cell_config(spec, d, b);
      std::optional<BklGame> game;
      std::string setup_error;
      try {
        Scenario sc = build_scenario(cfg);
        game.emplace(std::move(sc.topology), std::move(sc.params), std::move(sc.game),
                     std::move(sc.initial));
      } catch (const std::exception& e) {
        setup_error = e.what();
      }
      for (std::size_t k = 0; k < spec.solvers.size(); ++k) {
        BenchRecord rec;
        rec.solver = labels[k];
        rec.depth = d;
        rec.branching = b;
        rec.tree_size = full_leaf_count(b, d);
        if (!game) {
          rec.error = setup_error;
          records.push_back(std::move(rec));
          continue;
        }
        try {
          std::vector<double> times;
          for (int rep = 0; rep < spec.repeats; ++rep) {
            const SolveReport r =
                solve(parse_solver(spec.solvers[k]), *game, game->root(), cfg.solver.mcts);
            times.push_back(r.wall_ms());
            rec.leaf_evaluations = r.leaf_evaluations;
            rec.value = r.value;
          }
          double sum = 0.0;
          for (double t : times) sum += t;
          rec.wall_ms_mean = sum / static_cast<double>(times.size());
          double var = 0.0;
          for (double t : times) var += (t - rec.wall_ms_mean) * (t - rec.wall_ms_mean);
          rec.wall_ms_std = std::sqrt(var / static_cast<double>(times.size()));
          rec.repeats = spec.repeats;
        } catch (const std::exception& e) {
          rec.error = e.what();
        }
        records.push_back(std::move(rec));
      }
    }
  }
  std::stable_sort(records.begin(), records.end(), [](const BenchRecord& x, const BenchRecord& y) {
    if (x.tree_size != y.tree_size) return x.tree_size < y.tree_size;
    return x.depth < y.depth;
  });
  return records;
}

DeviationOutcome run_deviation(const BklGame& game, int red_action) {
  if (red_action < 0 || red_action >= game.num_actions()) {
    throw Error(ErrorCode::kInvalidArgument, "red action outside the grid");
  }
  DeviationOutcome out;
  GameState s = game.root();
  bool first = true;
  while (!game.is_terminal(s)) {
    const SolveReport r = solve_nash_dominant(game, s);
    if (first) {
      out.equilibrium_value = r.value;
      first = false;
    }
    const int blue = r.path.front().blue;
    out.played.push_back({blue, red_action});
    s = game.apply(s, blue, red_action);
  }
  if (first) out.equilibrium_value = game.utility(s);
  out.deviated_value = game.utility(s);
  return out;
}

Trajectory replay_trajectory(const BklGame& game, const std::vector<ActionPair>& path) {
  const GameConfig& cfg = game.config();
  GameState s = game.root();
  Trajectory out;
  out.step_size = cfg.step;
  out.samples.push_back({s.system, 0.0, 0.0});
  for (std::size_t k = 0; k < path.size(); ++k) {
    const ActionPair p = path[k];
    if (p.blue < 0 || p.blue >= game.num_actions() || p.red < 0 || p.red >= game.num_actions()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "path entry " + std::to_string(k) + " is outside the action grid");
    }
    if (game.is_terminal(s)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "path continues past a terminal state at entry " + std::to_string(k));
    }
    const double end = s.stage + 1 < cfg.num_stages()
                           ? cfg.decision_times[static_cast<std::size_t>(s.stage + 1)]
                           : cfg.horizon;
    const double duration = end - s.system.time;
    const double phi = game.grid()[static_cast<std::size_t>(p.blue)];
    const double psi = game.grid()[static_cast<std::size_t>(p.red)];
    Trajectory seg = integrate_segment(game.system(), s.system, phi, psi, duration,
                                       std::min(cfg.step, duration), cfg.termination_floors);
    // The segment's first sample repeats our last one; keep the lags of the
    // window that starts there.
    if (k == 0) {
      out.samples.back().phi = phi;
      out.samples.back().psi = psi;
    }
    s.system = seg.samples.back().state;
    s.stage += 1;
    s.history.push_back(p);
    out.append(seg);
  }
  return out;
}

Trajectory simulate_fixed(const Scenario& scenario, double phi, double psi, double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw Error(ErrorCode::kInvalidArgument, "simulation duration must be positive");
  }
  const BklSystem system(scenario.topology, scenario.params);
  const double t0 = scenario.initial.time;
  const double t_end = t0 + duration;
  std::vector<double> cuts;
  for (double t : scenario.game.decision_times) {
    if (t > t0 && t < t_end) cuts.push_back(t);
  }
  cuts.push_back(t_end);
  Trajectory out;
  out.step_size = scenario.game.step;
  out.samples.push_back({scenario.initial, phi, psi});
  SystemState s = scenario.initial;
  for (double cut : cuts) {
    const double seg = cut - s.time;
    Trajectory part =
        integrate_segment(system, s, phi, psi, seg, std::min(scenario.game.step, seg));
    s = part.samples.back().state;
    out.append(part);
  }
  return out;
}

}  // namespace bkl
