#include "bkl/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "bkl/error.hpp"
#include "bkl/topology.hpp"

namespace bkl {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfig, path + ": " + what);
}

// Strict object reader: every key must be consumed before `finish`.
class Obj {
 public:
  Obj(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const Json* take(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return nullptr;
    return &j_.at(key);
  }

  std::string at(const std::string& key) const { return path_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (const Json* v = take(key)) out = as_number(*v, at(key));
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const Json* v = take(key)) out = as_integer<Int>(*v, at(key));
  }

  void string(const std::string& key, std::string& out) {
    if (const Json* v = take(key)) {
      if (!v->is_string()) fail(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void vector(const std::string& key, std::vector<double>& out) {
    if (const Json* v = take(key)) out = as_vector(*v, at(key));
  }

  void optional_vector(const std::string& key, std::optional<Vector>& out) {
    if (const Json* v = take(key)) {
      out = as_vector(*v, at(key));
    } else {
      out.reset();
    }
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) fail(at(item.key()), "unknown key");
    }
  }

  static double as_number(const Json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }

  template <class Int>
  static Int as_integer(const Json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned()) return static_cast<Int>(v.get<std::uint64_t>());
      if (v.get<std::int64_t>() < 0) fail(path, "must be non-negative");
      return static_cast<Int>(v.get<std::int64_t>());
    } else {
      return static_cast<Int>(v.get<std::int64_t>());
    }
  }

  static Vector as_vector(const Json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    Vector out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Matrix as_matrix(const Json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < v.size(); ++r) {
    rows.push_back(Obj::as_vector(v[r], path + "[" + std::to_string(r) + "]"));
  }
  try {
    return Matrix::from_rows(rows);
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

std::vector<std::string> as_strings(const Json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) fail(path, "expected an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

GeneratorSpec read_generator(const Json& j, const std::string& path) {
  GeneratorSpec g;
  Obj o(j, path);
  o.integer("blue_nodes", g.blue_nodes);
  o.integer("blue_branching", g.blue_branching);
  o.integer("red_nodes", g.red_nodes);
  o.number("red_edge_prob", g.red_edge_prob);
  o.integer("blue_contacts", g.blue_contacts);
  o.integer("red_contacts", g.red_contacts);
  o.finish();
  if (g.blue_nodes < 1) fail(path + ".blue_nodes", "must be >= 1");
  if (g.blue_branching < 1) fail(path + ".blue_branching", "must be >= 1");
  if (g.red_nodes < 2) fail(path + ".red_nodes", "must be >= 2");
  if (!(g.red_edge_prob > 0.0 && g.red_edge_prob <= 1.0)) {
    fail(path + ".red_edge_prob", "must lie in (0, 1]");
  }
  if (g.blue_contacts > g.blue_nodes) fail(path + ".blue_contacts", "exceeds blue_nodes");
  if (g.red_contacts > g.red_nodes) fail(path + ".red_contacts", "exceeds red_nodes");
  return g;
}

TopologySpec read_topology(const Json& j) {
  TopologySpec t;
  Obj o(j, "topology");
  const Json* gen = o.take("generator");
  const Json* b = o.take("blue_adj");
  const Json* r = o.take("red_adj");
  const Json* a = o.take("cross_adj");
  o.finish();
  const bool any_matrix = b || r || a;
  if (gen && any_matrix) fail("topology", "give either 'generator' or explicit matrices, not both");
  if (any_matrix) {
    if (!(b && r && a)) fail("topology", "explicit topology needs blue_adj, red_adj and cross_adj");
    NetworkTopology topo{as_matrix(*b, "topology.blue_adj"), as_matrix(*r, "topology.red_adj"),
                         as_matrix(*a, "topology.cross_adj")};
    try {
      topo.validate();
    } catch (const Error& e) {
      fail("topology", e.what());
    }
    t.generator.reset();
    t.explicit_topology = std::move(topo);
  } else {
    t.generator = gen ? read_generator(*gen, "topology.generator") : GeneratorSpec{};
  }
  return t;
}

ParamsSpec read_params(const Json& j) {
  ParamsSpec p;
  Obj o(j, "params");
  o.number("omega_mean", p.omega_mean);
  o.number("nu_mean", p.nu_mean);
  o.number("freq_std", p.freq_std);
  o.optional_vector("omega", p.omega);
  o.optional_vector("nu", p.nu);
  o.number("zeta_b", p.zeta_b);
  o.number("zeta_r", p.zeta_r);
  o.number("zeta_br", p.zeta_br);
  o.number("zeta_rb", p.zeta_rb);
  o.number("kappa_br", p.kappa_br);
  o.number("kappa_rb", p.kappa_rb);
  o.number("epsilon1", p.epsilon1);
  o.number("epsilon2", p.epsilon2);
  o.number("gamma_b", p.gamma_b);
  o.number("gamma_r", p.gamma_r);
  std::string mode = "arithmetic";
  o.string("mean_phase", mode);
  o.finish();
  if (mode == "arithmetic") {
    p.mean_phase = MeanPhaseMode::kArithmetic;
  } else if (mode == "circular") {
    p.mean_phase = MeanPhaseMode::kCircular;
  } else {
    fail("params.mean_phase", "expected 'arithmetic' or 'circular'");
  }
  if (p.freq_std < 0.0) fail("params.freq_std", "must be non-negative");
  for (auto [name, v] : {std::pair{"zeta_b", p.zeta_b}, {"zeta_r", p.zeta_r},
                         {"zeta_br", p.zeta_br}, {"zeta_rb", p.zeta_rb},
                         {"kappa_br", p.kappa_br}, {"kappa_rb", p.kappa_rb},
                         {"gamma_b", p.gamma_b}, {"gamma_r", p.gamma_r}}) {
    if (v < 0.0) fail(std::string("params.") + name, "must be non-negative");
  }
  return p;
}

InitialSpec read_initial(const Json& j) {
  InitialSpec s;
  Obj o(j, "initial");
  o.number("pop_blue", s.pop_blue);
  o.number("pop_red", s.pop_red);
  o.optional_vector("beta", s.beta);
  o.optional_vector("rho", s.rho);
  o.finish();
  if (s.pop_blue < 0.0) fail("initial.pop_blue", "must be non-negative");
  if (s.pop_red < 0.0) fail("initial.pop_red", "must be non-negative");
  return s;
}

GameSpec read_game(const Json& j) {
  GameSpec g;
  Obj o(j, "game");
  o.integer("n_actions", g.n_actions);
  o.vector("decision_times", g.decision_times);
  o.number("horizon", g.horizon);
  o.number("step", g.step);
  o.finish();
  GameConfig check;
  check.n_actions = g.n_actions;
  check.decision_times = g.decision_times;
  check.horizon = g.horizon;
  check.step = g.step;
  try {
    check.validate();
  } catch (const Error& e) {
    fail("game", e.what());
  }
  if (g.decision_times.empty()) fail("game.decision_times", "needs at least one decision time");
  return g;
}

MctsConfig read_mcts(const Json& j, const std::string& path) {
  MctsConfig m;
  Obj o(j, path);
  o.integer("iterations", m.iterations);
  o.number("budget_fraction", m.budget_fraction);
  o.number("exploration_c", m.exploration_c);
  o.integer("seed", m.seed);
  o.finish();
  if (!(m.budget_fraction > 0.0)) fail(path + ".budget_fraction", "must be positive");
  if (m.exploration_c < 0.0) fail(path + ".exploration_c", "must be non-negative");
  return m;
}

void check_solver_name(const std::string& name, const std::string& path) {
  try {
    parse_solver(name);
  } catch (const Error&) {
    fail(path, "unknown solver '" + name + "' (expected full, nash-dominant, myopic, mcts)");
  }
}

SolverSpec read_solver(const Json& j) {
  SolverSpec s;
  Obj o(j, "solver");
  o.string("name", s.name);
  if (const Json* m = o.take("mcts")) s.mcts = read_mcts(*m, "solver.mcts");
  o.finish();
  check_solver_name(s.name, "solver.name");
  return s;
}

SweepSection read_sweep(const Json& j) {
  SweepSection s;
  Obj o(j, "sweep");
  o.vector("zeta_b_values", s.zeta_b_values);
  o.vector("zeta_r_values", s.zeta_r_values);
  if (const Json* v = o.take("solvers")) s.solvers = as_strings(*v, "sweep.solvers");
  if (j.contains("overrides")) {
    o.take("overrides");
    s.overrides = j.at("overrides");
    if (!s.overrides.is_object() && !s.overrides.is_null()) {
      fail("sweep.overrides", "expected an object");
    }
    if (s.overrides.is_null()) s.overrides = Json::object();
  }
  o.finish();
  for (const auto* grid : {&s.zeta_b_values, &s.zeta_r_values}) {
    for (double z : *grid) {
      if (!(z > 0.0)) fail("sweep", "zeta grid values must be positive");
    }
  }
  if (s.solvers.empty()) fail("sweep.solvers", "needs at least one solver");
  for (std::size_t i = 0; i < s.solvers.size(); ++i) {
    check_solver_name(s.solvers[i], "sweep.solvers[" + std::to_string(i) + "]");
  }
  return s;
}

BenchSection read_bench(const Json& j) {
  BenchSection b;
  Obj o(j, "bench");
  if (const Json* v = o.take("depths")) {
    if (!v->is_array()) fail("bench.depths", "expected an array of integers");
    b.depths.clear();
    for (const auto& x : *v) b.depths.push_back(Obj::as_integer<int>(x, "bench.depths"));
  }
  if (const Json* v = o.take("branchings")) {
    if (!v->is_array()) fail("bench.branchings", "expected an array of integers");
    b.branchings.clear();
    for (const auto& x : *v) b.branchings.push_back(Obj::as_integer<int>(x, "bench.branchings"));
  }
  o.integer("repeats", b.repeats);
  if (const Json* v = o.take("solvers")) b.solvers = as_strings(*v, "bench.solvers");
  o.number("window", b.window);
  if (j.contains("overrides")) {
    o.take("overrides");
    b.overrides = j.at("overrides");
    if (!b.overrides.is_object() && !b.overrides.is_null()) {
      fail("bench.overrides", "expected an object");
    }
    if (b.overrides.is_null()) b.overrides = Json::object();
  }
  o.finish();
  if (b.depths.empty() || b.branchings.empty()) fail("bench", "depths and branchings are required");
  for (int d : b.depths) {
    if (d < 1) fail("bench.depths", "depths must be >= 1");
  }
  for (int n : b.branchings) {
    if (n < 2) fail("bench.branchings", "branchings must be >= 2");
  }
  if (b.repeats < 1) fail("bench.repeats", "must be >= 1");
  if (!(b.window > 0.0)) fail("bench.window", "must be positive");
  if (b.solvers.empty()) fail("bench.solvers", "needs at least one solver");
  for (std::size_t i = 0; i < b.solvers.size(); ++i) {
    check_solver_name(b.solvers[i], "bench.solvers[" + std::to_string(i) + "]");
  }
  return b;
}

Json matrix_json(const Matrix& m) { return Json(m.to_rows()); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Json* descend(Json& doc, const std::string& key, const std::string& full) {
  if (!doc.is_object()) fail(full, "cannot descend into a non-object");
  return &doc[key];
}

}  // namespace

Json BenchSection::default_overrides() {
  return Json{{"topology",
               {{"generator",
                 {{"blue_nodes", 4},
                  {"blue_branching", 3},
                  {"red_nodes", 4},
                  {"red_edge_prob", 0.6},
                  {"blue_contacts", 3},
                  {"red_contacts", 2}}}}},
              {"game", {{"step", 1.0}}}};
}

DerivedSeeds derive_seeds(std::uint64_t master) {
  auto stream = [master](std::uint64_t tag) {
    return splitmix64(master ^ splitmix64(tag));
  };
  return {stream(1), stream(2), stream(3), stream(4), stream(5), stream(6)};
}

RunConfig config_from_json(const Json& doc) {
  RunConfig c;
  Obj o(doc, "config");
  o.integer("seed", c.seed);
  if (const Json* v = o.take("topology")) c.topology = read_topology(*v);
  if (const Json* v = o.take("params")) c.params = read_params(*v);
  if (const Json* v = o.take("initial")) c.initial = read_initial(*v);
  if (const Json* v = o.take("game")) c.game = read_game(*v);
  if (const Json* v = o.take("solver")) c.solver = read_solver(*v);
  o.string("output_dir", c.output_dir);
  if (const Json* v = o.take("sweep")) c.sweep = read_sweep(*v);
  if (const Json* v = o.take("bench")) c.bench = read_bench(*v);
  o.finish();
  build_scenario(c);  // surfaces dimension and graph errors at load time
  return c;
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["seed"] = c.seed;
  if (c.topology.explicit_topology) {
    const NetworkTopology& t = *c.topology.explicit_topology;
    j["topology"] = {{"blue_adj", matrix_json(t.blue_adj)},
                     {"red_adj", matrix_json(t.red_adj)},
                     {"cross_adj", matrix_json(t.cross_adj)}};
  } else {
    const GeneratorSpec g = c.topology.generator.value_or(GeneratorSpec{});
    j["topology"] = {{"generator",
                      {{"blue_nodes", g.blue_nodes},
                       {"blue_branching", g.blue_branching},
                       {"red_nodes", g.red_nodes},
                       {"red_edge_prob", g.red_edge_prob},
                       {"blue_contacts", g.blue_contacts},
                       {"red_contacts", g.red_contacts}}}};
  }
  const ParamsSpec& p = c.params;
  Json params = {{"omega_mean", p.omega_mean}, {"nu_mean", p.nu_mean},
                 {"freq_std", p.freq_std},     {"zeta_b", p.zeta_b},
                 {"zeta_r", p.zeta_r},         {"zeta_br", p.zeta_br},
                 {"zeta_rb", p.zeta_rb},       {"kappa_br", p.kappa_br},
                 {"kappa_rb", p.kappa_rb},     {"epsilon1", p.epsilon1},
                 {"epsilon2", p.epsilon2},     {"gamma_b", p.gamma_b},
                 {"gamma_r", p.gamma_r},
                 {"mean_phase", p.mean_phase == MeanPhaseMode::kCircular ? "circular"
                                                                         : "arithmetic"}};
  if (p.omega) params["omega"] = *p.omega;
  if (p.nu) params["nu"] = *p.nu;
  j["params"] = params;
  Json initial = {{"pop_blue", c.initial.pop_blue}, {"pop_red", c.initial.pop_red}};
  if (c.initial.beta) initial["beta"] = *c.initial.beta;
  if (c.initial.rho) initial["rho"] = *c.initial.rho;
  j["initial"] = initial;
  j["game"] = {{"n_actions", c.game.n_actions},
               {"decision_times", c.game.decision_times},
               {"horizon", c.game.horizon},
               {"step", c.game.step}};
  j["solver"] = {{"name", c.solver.name},
                 {"mcts",
                  {{"iterations", c.solver.mcts.iterations},
                   {"budget_fraction", c.solver.mcts.budget_fraction},
                   {"exploration_c", c.solver.mcts.exploration_c},
                   {"seed", c.solver.mcts.seed}}}};
  j["output_dir"] = c.output_dir;
  j["sweep"] = {{"zeta_b_values", c.sweep.zeta_b_values},
                {"zeta_r_values", c.sweep.zeta_r_values},
                {"solvers", c.sweep.solvers},
                {"overrides", c.sweep.overrides}};
  j["bench"] = {{"depths", c.bench.depths},
                {"branchings", c.bench.branchings},
                {"repeats", c.bench.repeats},
                {"solvers", c.bench.solvers},
                {"window", c.bench.window},
                {"overrides", c.bench.overrides}};
  return j;
}

Json extract_config_document(const Json& doc) {
  if (doc.is_object() && doc.contains("config") && doc.contains("files") &&
      doc.at("config").is_object()) {
    return doc.at("config");
  }
  return doc;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kConfig, "'" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(extract_config_document(doc));
}

void apply_override(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error(ErrorCode::kConfig, "override '" + std::string(assignment) +
                                        "' is not of the form key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const Json::exception&) {
    value = raw;
  }
  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw Error(ErrorCode::kConfig, "override key '" + key + "' is malformed");
    if (node->is_null()) *node = Json::object();
    node = descend(*node, part, key);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

Scenario build_scenario(const RunConfig& c) {
  const DerivedSeeds seeds = derive_seeds(c.seed);
  Scenario s;
  if (c.topology.explicit_topology) {
    s.topology = *c.topology.explicit_topology;
  } else {
    const GeneratorSpec g = c.topology.generator.value_or(GeneratorSpec{});
    s.topology.blue_adj = generate_hierarchy(g.blue_nodes, g.blue_branching);
    s.topology.red_adj = generate_random_graph(g.red_nodes, g.red_edge_prob, seeds.red_graph);
    s.topology.cross_adj = build_cross_links(s.topology.blue_adj, g.red_nodes, g.blue_contacts,
                                             g.red_contacts, seeds.cross_links);
  }
  s.topology.validate();
  const std::size_t n = s.topology.n_blue();
  const std::size_t m = s.topology.n_red();

  const ParamsSpec& p = c.params;
  s.params.omega = p.omega ? *p.omega : draw_frequencies(n, p.omega_mean, p.freq_std, seeds.omega);
  s.params.nu = p.nu ? *p.nu : draw_frequencies(m, p.nu_mean, p.freq_std, seeds.nu);
  s.params.zeta_b = p.zeta_b;
  s.params.zeta_r = p.zeta_r;
  s.params.zeta_br = p.zeta_br;
  s.params.zeta_rb = p.zeta_rb;
  s.params.kappa_br = p.kappa_br;
  s.params.kappa_rb = p.kappa_rb;
  s.params.epsilon1 = p.epsilon1;
  s.params.epsilon2 = p.epsilon2;
  s.params.gamma_b = p.gamma_b;
  s.params.gamma_r = p.gamma_r;
  s.params.mean_phase = p.mean_phase;
  s.params.validate(s.topology);

  s.game.n_actions = c.game.n_actions;
  s.game.decision_times = c.game.decision_times;
  s.game.horizon = c.game.horizon;
  s.game.step = c.game.step;
  s.game.termination_floors = {p.gamma_b, p.gamma_r};
  s.game.validate();

  s.initial.beta = c.initial.beta ? *c.initial.beta : draw_phases(n, seeds.beta);
  s.initial.rho = c.initial.rho ? *c.initial.rho : draw_phases(m, seeds.rho);
  if (s.initial.beta.size() != n || s.initial.rho.size() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "initial phase vectors do not match topology");
  }
  s.initial.pop_blue = c.initial.pop_blue;
  s.initial.pop_red = c.initial.pop_red;
  s.initial.time = s.game.decision_times.front();
  return s;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string config_digest(const RunConfig& config) {
  return hex64(fnv1a64(config_to_json(config).dump()));
}

}  // namespace bkl
