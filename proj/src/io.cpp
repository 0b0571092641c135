#include "bkl/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bkl/error.hpp"

namespace bkl {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

Json topology_to_json(const NetworkTopology& topo) {
  return {{"blue_adj", topo.blue_adj.to_rows()},
          {"red_adj", topo.red_adj.to_rows()},
          {"cross_adj", topo.cross_adj.to_rows()}};
}

NetworkTopology topology_from_json(const Json& doc) {
  try {
    NetworkTopology t{Matrix::from_rows(doc.at("blue_adj").get<std::vector<std::vector<double>>>()),
                      Matrix::from_rows(doc.at("red_adj").get<std::vector<std::vector<double>>>()),
                      Matrix::from_rows(doc.at("cross_adj").get<std::vector<std::vector<double>>>())};
    t.validate();
    return t;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed topology: ") + e.what());
  }
}

Json params_to_json(const BklParameters& p) {
  return {{"omega", p.omega},
          {"nu", p.nu},
          {"zeta_b", p.zeta_b},
          {"zeta_r", p.zeta_r},
          {"zeta_br", p.zeta_br},
          {"zeta_rb", p.zeta_rb},
          {"kappa_br", p.kappa_br},
          {"kappa_rb", p.kappa_rb},
          {"epsilon1", p.epsilon1},
          {"epsilon2", p.epsilon2},
          {"gamma_b", p.gamma_b},
          {"gamma_r", p.gamma_r},
          {"mean_phase", p.mean_phase == MeanPhaseMode::kCircular ? "circular" : "arithmetic"}};
}

BklParameters params_from_json(const Json& doc) {
  try {
    BklParameters p;
    p.omega = doc.at("omega").get<Vector>();
    p.nu = doc.at("nu").get<Vector>();
    p.zeta_b = doc.at("zeta_b").get<double>();
    p.zeta_r = doc.at("zeta_r").get<double>();
    p.zeta_br = doc.at("zeta_br").get<double>();
    p.zeta_rb = doc.at("zeta_rb").get<double>();
    p.kappa_br = doc.at("kappa_br").get<double>();
    p.kappa_rb = doc.at("kappa_rb").get<double>();
    p.epsilon1 = doc.value("epsilon1", p.epsilon1);
    p.epsilon2 = doc.value("epsilon2", p.epsilon2);
    p.gamma_b = doc.value("gamma_b", p.gamma_b);
    p.gamma_r = doc.value("gamma_r", p.gamma_r);
    const std::string mode = doc.value("mean_phase", std::string("arithmetic"));
    if (mode != "arithmetic" && mode != "circular") {
      throw Error(ErrorCode::kConfig, "mean_phase must be 'arithmetic' or 'circular'");
    }
    p.mean_phase = mode == "circular" ? MeanPhaseMode::kCircular : MeanPhaseMode::kArithmetic;
    return p;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed parameters: ") + e.what());
  }
}

Json state_to_json(const SystemState& s) {
  return {{"beta", s.beta},
          {"rho", s.rho},
          {"pop_blue", s.pop_blue},
          {"pop_red", s.pop_red},
          {"time", s.time}};
}

std::string trajectory_csv(const Trajectory& trajectory, MeanPhaseMode mode) {
  std::ostringstream out;
  out << "t,pop_blue,pop_red,order_blue,order_red,mean_beta,mean_rho,phi,psi\n";
  for (const auto& sample : trajectory.samples) {
    const SystemState& s = sample.state;
    const OrderParameter ob = order_parameter(s.beta, mode);
    const OrderParameter orr = order_parameter(s.rho, mode);
    out << format_number(s.time) << ',' << format_number(s.pop_blue) << ','
        << format_number(s.pop_red) << ',' << format_number(ob.magnitude) << ','
        << format_number(orr.magnitude) << ',' << format_number(ob.mean_phase) << ','
        << format_number(orr.mean_phase) << ',' << format_number(sample.phi) << ','
        << format_number(sample.psi) << '\n';
  }
  return out.str();
}

std::string path_csv(const BklGame& game, const std::vector<ActionPair>& path) {
  std::ostringstream out;
  out << "stage,phi,psi,pop_blue,pop_red\n";
  GameState s = game.root();
  for (std::size_t k = 0; k < path.size(); ++k) {
    out << k << ',' << format_number(game.grid()[static_cast<std::size_t>(path[k].blue)]) << ','
        << format_number(game.grid()[static_cast<std::size_t>(path[k].red)]) << ','
        << format_number(s.system.pop_blue) << ',' << format_number(s.system.pop_red) << '\n';
    s = game.apply(s, path[k].blue, path[k].red);
  }
  out << path.size() << ",,," << format_number(s.system.pop_blue) << ','
      << format_number(s.system.pop_red) << '\n';
  return out.str();
}

Json report_to_json(const SolveReport& r) {
  Json path = Json::array();
  for (const auto& p : r.path) path.push_back({p.blue, p.red});
  return {{"solver", r.solver_name},
          {"value", r.value},
          {"path", path},
          {"leaf_evaluations", r.leaf_evaluations},
          {"nodes_expanded", r.nodes_expanded},
          {"wall_ms", r.wall_ms()},
          {"config_digest", r.config_digest}};
}

std::string heatmap_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "zeta_b,zeta_r,solver,value\n";
  for (const auto& c : result.cells) {
    if (!c.report) continue;
    out << format_number(c.zeta_b) << ',' << format_number(c.zeta_r) << ',' << c.solver << ','
        << format_number(c.report->value) << '\n';
  }
  return out.str();
}

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// Security cell of the exact heatmap read as a meta-game: Blue picks zeta_b
// (rows), Red picks zeta_r (columns).
Json meta_game(const SweepResult& result) {
  if (!result.reference) return nullptr;
  const HeatmapGrid g = result.grid(*result.reference);
  for (double v : g.values) {
    if (!std::isfinite(v)) return nullptr;
  }
  std::size_t best_row = 0, best_col = 0;
  double best = -INFINITY;
  for (std::size_t r = 0; r < g.rows; ++r) {
    std::size_t arg = 0;
    for (std::size_t c = 1; c < g.cols; ++c) {
      if (g.at(r, c) < g.at(r, arg)) arg = c;
    }
    if (r == 0 || g.at(r, arg) > best) {
      best = g.at(r, arg);
      best_row = r;
      best_col = arg;
    }
  }
  return {{"zeta_b", result.zeta_b_values[best_row]},
          {"zeta_r", result.zeta_r_values[best_col]},
          {"value", best}};
}

}  // namespace

Json error_stats_to_json(const SweepResult& result) {
  Json doc;
  doc["reference_solver"] = result.reference ? Json(*result.reference) : Json(nullptr);
  doc["initial_utility"] = result.initial_utility;
  Json solvers = Json::object();
  for (const auto& [label, st] : result.error_stats) {
    solvers[label] = {{"cells", st.cells},
                      {"mean_abs", st.mean_abs},
                      {"std_abs", st.std_abs},
                      {"max_abs", st.max_abs},
                      {"normalized_mean", optional_number(st.normalized_mean)},
                      {"normalized_std", optional_number(st.normalized_std)},
                      {"relative_mean", optional_number(st.relative_mean)}};
  }
  doc["solvers"] = solvers;
  if (result.reference) {
    const HeatmapGrid g = result.grid(*result.reference);
    double lo = INFINITY, hi = -INFINITY;
    for (double v : g.values) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo <= hi) doc["exact_range"] = {lo, hi};
  }
  doc["meta_game"] = meta_game(result);
  doc["failed_cells"] = result.failures();
  doc["published_reference"] = {
      {"myopic_relative_mean", ReferenceFigures::kMyopicMeanRelError},
      {"myopic_relative_std", ReferenceFigures::kMyopicStdRelError},
      {"mcts_relative_mean", ReferenceFigures::kMctsMeanRelError},
      {"mcts_relative_std", ReferenceFigures::kMctsStdRelError},
      {"mcts_mean_abs", ReferenceFigures::kMctsMeanAbsError},
      {"utility_range", {ReferenceFigures::kUtilityRangeLow, ReferenceFigures::kUtilityRangeHigh}},
      {"note", "different networks and frequencies; for orientation only"}};
  return doc;
}

std::string bench_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  out << "solver,depth,branching,tree_size,leaf_evals,wall_ms_mean,wall_ms_std\n";
  for (const auto& r : records) {
    if (!r.error.empty()) continue;
    out << r.solver << ',' << r.depth << ',' << r.branching << ',' << r.tree_size << ','
        << r.leaf_evaluations << ',' << format_number(r.wall_ms_mean) << ','
        << format_number(r.wall_ms_std) << '\n';
  }
  return out.str();
}

Json bench_summary_to_json(const std::vector<BenchRecord>& records) {
  Json cells = Json::array();
  Json failures = Json::array();
  for (const auto& r : records) {
    if (!r.error.empty()) {
      failures.push_back(
          {{"solver", r.solver}, {"depth", r.depth}, {"branching", r.branching}, {"error", r.error}});
    }
  }
  // Pruning ratio per cell where both exact solvers ran.
  for (const auto& nd : records) {
    if (nd.solver != "nash-dominant" || !nd.error.empty()) continue;
    for (const auto& full : records) {
      if (full.solver == "full" && full.error.empty() && full.depth == nd.depth &&
          full.branching == nd.branching && full.leaf_evaluations > 0) {
        cells.push_back({{"depth", nd.depth},
                         {"branching", nd.branching},
                         {"leaf_fraction", static_cast<double>(nd.leaf_evaluations) /
                                               static_cast<double>(full.leaf_evaluations)},
                         {"wall_ratio", full.wall_ms_mean > 0.0
                                            ? Json(nd.wall_ms_mean / full.wall_ms_mean)
                                            : Json(nullptr)}});
      }
    }
  }
  return {{"pruning", cells},
          {"failures", failures},
          {"published_reference", {{"pruning_leaf_fraction", ReferenceFigures::kPruningLeafFraction}}}};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bkl
