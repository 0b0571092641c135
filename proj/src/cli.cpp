#include "bkl/cli.hpp"

#include <filesystem>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "bkl/config.hpp"
#include "bkl/error.hpp"
#include "bkl/experiments.hpp"
#include "bkl/io.hpp"

namespace bkl {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::string solver;
  std::string out_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  double phi = 0.0;
  double psi = 0.0;
  std::optional<double> duration;
};

// Thrown for problems found before any work starts.
struct ValidationFailure {
  std::string code;
  std::string message;
};

std::string code_name(const Error& e) { return std::string(to_string(e.code())); }

void error_line(std::ostream& err, const std::string& code, const std::string& message,
                int exit_code) {
  err << Json{{"error", {{"code", code}, {"message", message}, {"exit_code", exit_code}}}}.dump()
      << '\n';
}

RunConfig load(const Options& opt) {
  try {
    Json doc = Json::object();
    if (!opt.config_path.empty()) {
      const std::string text = read_file(opt.config_path);
      try {
        doc = extract_config_document(Json::parse(text));
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::kConfig, "'" + opt.config_path + "' is not valid JSON: " + e.what());
      }
    }
    if (opt.seed) doc["seed"] = *opt.seed;
    for (const auto& s : opt.sets) apply_override(doc, s);
    RunConfig cfg = config_from_json(doc);
    if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
    return cfg;
  } catch (const Error& e) {
    throw ValidationFailure{code_name(e), e.what()};
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void check_solvers(const std::vector<std::string>& names) {
  for (const auto& n : names) {
    try {
      parse_solver(n);
    } catch (const Error& e) {
      throw ValidationFailure{code_name(e), e.what()};
    }
  }
}

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create output directory '" + dir + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    write_file((dir_ / name).string(), content);
    files_.push_back({{"name", name},
                      {"bytes", content.size()},
                      {"fnv1a64", hex64(fnv1a64(content))}});
  }

  void manifest(const std::string& command, const RunConfig& cfg, const Scenario& sc,
                const std::string& status, Json extra = Json::object()) {
    const DerivedSeeds seeds = derive_seeds(cfg.seed);
    Json m = {{"command", command},
              {"status", status},
              {"config", config_to_json(cfg)},
              {"config_digest", config_digest(cfg)},
              {"seeds",
               {{"master", cfg.seed},
                {"red_graph", seeds.red_graph},
                {"cross_links", seeds.cross_links},
                {"omega", seeds.omega},
                {"nu", seeds.nu},
                {"beta", seeds.beta},
                {"rho", seeds.rho},
                {"mcts", cfg.solver.mcts.seed}}},
              {"initial_utility", sc.initial.pop_blue - sc.initial.pop_red},
              {"decision_times", sc.game.decision_times},
              {"horizon", sc.game.horizon},
              {"files", files_}};
    for (auto& [k, v] : extra.items()) m[k] = v;
    write_file((dir_ / "manifest.json").string(), m.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  Json files_ = Json::array();
};

void write_common(OutputDir& dir, const RunConfig& cfg, const Scenario& sc) {
  dir.write("config.json", config_to_json(cfg).dump(2) + "\n");
  dir.write("scenario.json", Json{{"topology", topology_to_json(sc.topology)},
                                  {"params", params_to_json(sc.params)},
                                  {"initial", state_to_json(sc.initial)}}
                                 .dump(2) + "\n");
}

Scenario scenario_or_fail(const RunConfig& cfg) {
  try {
    return build_scenario(cfg);
  } catch (const Error& e) {
    throw ValidationFailure{code_name(e), e.what()};
  }
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load(opt);
  const Scenario sc = scenario_or_fail(cfg);
  const double duration = opt.duration.value_or(sc.game.horizon - sc.initial.time);
  if (!(duration > 0.0)) throw ValidationFailure{"invalid_argument", "duration must be positive"};
  const Trajectory traj = simulate_fixed(sc, opt.phi, opt.psi, duration);
  OutputDir dir(cfg.output_dir);
  write_common(dir, cfg, sc);
  dir.write("trajectory.csv", trajectory_csv(traj, sc.params.mean_phase));
  const SystemState& last = traj.samples.back().state;
  const double u = last.pop_blue - last.pop_red;
  dir.manifest("simulate", cfg, sc, "ok",
               {{"simulate", {{"phi", opt.phi}, {"psi", opt.psi}, {"duration", duration}}}});
  out << Json{{"time", last.time},
              {"pop_blue", last.pop_blue},
              {"pop_red", last.pop_red},
              {"utility_blue", u},
              {"utility_red", -u}}
             .dump()
      << '\n';
  return kExitOk;
}

int cmd_solve(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load(opt);
  const std::string name = opt.solver.empty() ? cfg.solver.name : opt.solver;
  check_solvers({name});
  Scenario sc = scenario_or_fail(cfg);
  const Scenario copy = sc;
  const BklGame game(std::move(sc.topology), std::move(sc.params), std::move(sc.game),
                     std::move(sc.initial));
  SolveReport report = solve(parse_solver(name), game, game.root(), cfg.solver.mcts);
  report.config_digest = config_digest(cfg);
  const Trajectory traj = replay_trajectory(game, report.path);
  OutputDir dir(cfg.output_dir);
  write_common(dir, cfg, copy);
  const Json report_json = report_to_json(report);
  dir.write("report." + name + ".json", report_json.dump(2) + "\n");
  dir.write("path." + name + ".csv", path_csv(game, report.path));
  dir.write("trajectory.csv", trajectory_csv(traj, game.params().mean_phase));
  dir.manifest("solve", cfg, copy, "ok", {{"solver", name}});
  out << report_json.dump() << '\n';
  return kExitOk;
}

int cmd_sweep(const Options& opt, std::ostream& out) {
  RunConfig cfg = load(opt);
  if (!opt.solver.empty()) cfg.sweep.solvers = split_list(opt.solver);
  check_solvers(cfg.sweep.solvers);
  SweepSpec spec;
  try {
    spec = make_sweep_spec(cfg);
  } catch (const Error& e) {
    throw ValidationFailure{code_name(e), e.what()};
  }
  spec.jobs = opt.jobs;
  const Scenario sc = scenario_or_fail(spec.base);
  const SweepResult result = run_sweep(spec);
  OutputDir dir(cfg.output_dir);
  write_common(dir, spec.base, sc);
  dir.write("heatmap.csv", heatmap_csv(result));
  const Json stats = error_stats_to_json(result);
  dir.write("error_stats.json", stats.dump(2) + "\n");
  Json cells = Json::array();
  for (const auto& c : result.cells) {
    Json row = {{"zeta_b", c.zeta_b}, {"zeta_r", c.zeta_r}, {"solver", c.solver}};
    if (c.report) {
      Json r = report_to_json(*c.report);
      r.erase("wall_ms");  // keeps the file reproducible
      row["report"] = r;
    } else {
      row["error"] = c.error;
    }
    cells.push_back(row);
  }
  dir.write("sweep_cells.json", cells.dump(2) + "\n");
  const bool partial = result.failures() > 0;
  dir.manifest("sweep", cfg, sc, partial ? "partial" : "ok",
               {{"sweep",
                 {{"zeta_b_values", result.zeta_b_values},
                  {"zeta_r_values", result.zeta_r_values},
                  {"solvers", result.solver_labels},
                  {"failed_cells", result.failures()}}}});
  out << stats.dump() << '\n';
  return partial ? kExitPartial : kExitOk;
}

int cmd_bench(const Options& opt, std::ostream& out) {
  RunConfig cfg = load(opt);
  if (!opt.solver.empty()) cfg.bench.solvers = split_list(opt.solver);
  check_solvers(cfg.bench.solvers);
  BenchSpec spec;
  try {
    spec = make_bench_spec(cfg);
    spec.validate();
  } catch (const Error& e) {
    throw ValidationFailure{code_name(e), e.what()};
  }
  const Scenario sc = scenario_or_fail(spec.base);
  const std::vector<BenchRecord> records = run_scaling_bench(spec);
  OutputDir dir(cfg.output_dir);
  write_common(dir, spec.base, sc);
  dir.write("bench.csv", bench_csv(records));
  const Json summary = bench_summary_to_json(records);
  dir.write("bench_summary.json", summary.dump(2) + "\n");
  const bool partial = !summary["failures"].empty();
  dir.manifest("bench", cfg, sc, partial ? "partial" : "ok",
               {{"bench",
                 {{"depths", spec.depths},
                  {"branchings", spec.branchings},
                  {"repeats", spec.repeats},
                  {"window", spec.window}}}});
  out << summary.dump() << '\n';
  return partial ? kExitPartial : kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boyd-Kuramoto-Lanchester game engine"};
  app.name("bklgame");
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON config or a previous run's manifest.json")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "Output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "Master seed (overrides seed)");
    sub->add_option("--set", opt.sets, "Override a config field, e.g. params.zeta_b=0.3")
        ->take_all();
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Integrate with fixed lags");
  common(simulate);
  simulate->add_option("--phi", opt.phi, "Blue lag in radians")->check(CLI::Range(0.0, std::numbers::pi));
  simulate->add_option("--psi", opt.psi, "Red lag in radians")->check(CLI::Range(0.0, std::numbers::pi));
  CLI::Option* duration = simulate->add_option("--duration", "Simulated time (default: to the horizon)");

  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve the game");
  common(solve_cmd);
  solve_cmd->add_option("--solver", opt.solver, "full, nash-dominant, myopic or mcts");

  CLI::App* sweep = app.add_subcommand("sweep", "Coupling-strength sweep");
  common(sweep);
  sweep->add_option("--solver", opt.solver, "Comma-separated solver list");
  sweep->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);

  CLI::App* bench = app.add_subcommand("bench", "Solver scaling benchmark");
  common(bench);
  bench->add_option("--solver", opt.solver, "Comma-separated solver list");
  bench->add_option("--jobs", opt.jobs, "Accepted for symmetry; the bench runs sequentially");

  std::vector<const char*> argv{"bklgame"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    error_line(err, "usage", e.what(), kExitValidation);
    return kExitValidation;
  }
  for (CLI::App* sub : {simulate, solve_cmd, sweep, bench}) {
    if (sub->count("--seed") > 0) opt.seed = seed;
  }
  if (duration->count() > 0) opt.duration = duration->as<double>();

  try {
    if (simulate->parsed()) return cmd_simulate(opt, out);
    if (solve_cmd->parsed()) return cmd_solve(opt, out);
    if (sweep->parsed()) return cmd_sweep(opt, out);
    return cmd_bench(opt, out);
  } catch (const ValidationFailure& v) {
    error_line(err, v.code, v.message, kExitValidation);
    return kExitValidation;
  } catch (const Error& e) {
    error_line(err, code_name(e), e.what(), kExitRuntime);
    return kExitRuntime;
  } catch (const std::exception& e) {
    error_line(err, "runtime", e.what(), kExitRuntime);
    return kExitRuntime;
  }
}

}  // namespace bkl
