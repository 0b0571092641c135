#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "bkl/cli.hpp"
#include "bkl/config.hpp"
#include "bkl/io.hpp"
#include "support/oracles.hpp"
#include "support/scenarios.hpp"

using namespace bkl;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

// Small network, two stages of ten time units.
std::string write_small_config(const TempDir& dir, int b, int k) {
  const std::string p = dir / "config.json";
  write_file(p, config_to_json(scenarios::small_config(b, k, 11)).dump(2));
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate without attrition keeps the utility") {
  TempDir d("bkl_cli_sim");
  const Run r = cli({"simulate", "--config", write_small_config(d, 3, 2), "--out", d / "o",
                     "--phi", "1.0", "--psi", "0.5", "--set", "params.kappa_br=0",
                     "params.kappa_rb=0"});
  REQUIRE(r.code == kExitOk);
  const Json j = Json::parse(r.out);
  CHECK(j.at("utility_blue") == 53.0);
  CHECK(j.at("time") == 20.0);
  const std::string csv = read_file(d / "o/trajectory.csv");
  CHECK(csv.rfind("t,pop_blue,pop_red,", 0) == 0);
  CHECK(fs::exists(d / "o/manifest.json"));
  CHECK(fs::exists(d / "o/scenario.json"));
}

TEST_CASE("solve a one-stage binary game against brute force") {
  TempDir d("bkl_cli_toy");
  const RunConfig cfg = scenarios::small_config(2, 1, 11);
  const BklGame g = scenarios::make_game(cfg);
  UtilityMatrix m(2);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) m(a, b) = g.utility(g.apply(g.root(), a, b));
  }
  const oracle::Cell best = oracle::maxmin(m);
  const std::string config = write_small_config(d, 2, 1);
  const Run r = cli({"solve", "--config", config, "--out", d / "o", "--solver", "full"});
  REQUIRE(r.code == kExitOk);
  const Json rep = Json::parse(r.out);
  CHECK(rep.at("value") == best.value);
  CHECK(rep.at("leaf_evaluations") == 4);
  CHECK(rep.at("path").at(0).at(0) == best.row);
  CHECK(rep.at("path").at(0).at(1) == best.col);
  CHECK(fs::exists(d / "o/report.full.json"));
  CHECK(fs::exists(d / "o/path.full.csv"));
}

TEST_CASE("exact solvers agree and mcts is reproducible") {
  TempDir d("bkl_cli_solvers");
  const std::string config = write_small_config(d, 3, 2);
  const Run full = cli({"solve", "--config", config, "--out", d / "a", "--solver", "full"});
  const Run nd = cli({"solve", "--config", config, "--out", d / "b", "--solver", "nash-dominant"});
  REQUIRE(full.code == kExitOk);
  REQUIRE(nd.code == kExitOk);
  CHECK(Json::parse(full.out).at("value") == Json::parse(nd.out).at("value"));
  CHECK(Json::parse(full.out).at("path") == Json::parse(nd.out).at("path"));
  const Run m1 = cli({"solve", "--config", config, "--out", d / "c", "--solver", "mcts"});
  const Run m2 = cli({"solve", "--config", config, "--out", d / "e", "--solver", "mcts"});
  REQUIRE(m1.code == kExitOk);
  CHECK(Json::parse(m1.out).at("path") == Json::parse(m2.out).at("path"));
  CHECK(read_file(d / "c/path.mcts.csv") == read_file(d / "e/path.mcts.csv"));
}

TEST_CASE("one-cell sweep") {
  TempDir d("bkl_cli_sweep");
  const Run r = cli({"sweep", "--config", write_small_config(d, 2, 2), "--out", d / "o",
                     "--solver", "nash-dominant,myopic", "--set", "sweep.zeta_b_values=[0.4]",
                     "sweep.zeta_r_values=[0.6]"});
  REQUIRE(r.code == kExitOk);
  const std::string csv = read_file(d / "o/heatmap.csv");
  CHECK(csv.rfind("zeta_b,zeta_r,solver,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  const Json stats = Json::parse(read_file(d / "o/error_stats.json"));
  CHECK(stats.at("reference_solver") == "nash-dominant");
  CHECK(fs::exists(d / "o/sweep_cells.json"));
}

TEST_CASE("partial sweep exits 3") {
  TempDir d("bkl_cli_partial");
  const Run r = cli({"sweep", "--config", write_small_config(d, 2, 2), "--out", d / "o",
                     "--solver", "nash-dominant,mcts", "--set", "sweep.zeta_b_values=[0.4]",
                     "sweep.zeta_r_values=[0.6]", "solver.mcts.iterations=1"});
  CHECK(r.code == kExitPartial);
  const Json m = Json::parse(read_file(d / "o/manifest.json"));
  CHECK(m.at("status") == "partial");
}

TEST_CASE("bench leaf counts") {
  TempDir d("bkl_cli_bench");
  const Run r = cli({"bench", "--out", d / "o", "--solver", "full,myopic", "--set",
                     "bench.depths=[2]", "bench.branchings=[3]", "bench.repeats=1"});
  REQUIRE(r.code == kExitOk);
  const std::string csv = read_file(d / "o/bench.csv");
  CHECK(csv.find("\nfull,2,3,81,81,") != std::string::npos);
  CHECK(csv.find("\nmyopic,2,3,81,18,") != std::string::npos);
}

TEST_CASE("validation failures exit 1 with a JSON error line") {
  TempDir d("bkl_cli_errors");
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"solve", "--solver", "alphabeta"},
           {"solve", "--set", "params.zeta=1"},
           {"solve", "--config", d / "missing.json"},
           {"simulate", "--phi", "4"},
           {"explode"},
           {}}) {
    const Run r = cli(args);
    CHECK(r.code == kExitValidation);
    const Json e = Json::parse(r.err);
    CHECK(e.at("error").at("exit_code") == 1);
    CHECK(e.at("error").contains("code"));
    CHECK(e.at("error").contains("message"));
  }
  write_file(d / "bad.json", "{ not json");
  CHECK(cli({"solve", "--config", d / "bad.json"}).code == kExitValidation);
}

TEST_CASE("runtime failures exit 2") {
  TempDir d("bkl_cli_runtime");
  write_file(d / "blocker", "");
  const Run r = cli({"simulate", "--config", write_small_config(d, 2, 1), "--out",
                     d / "blocker/sub"});
  CHECK(r.code == kExitRuntime);
  CHECK(Json::parse(r.err).at("error").at("code") == "io");
}

TEST_CASE("a manifest reproduces its run") {
  TempDir d("bkl_cli_manifest");
  const std::string config = write_small_config(d, 3, 2);
  REQUIRE(cli({"solve", "--config", config, "--out", d / "first", "--solver", "myopic", "--seed",
               "77"})
              .code == kExitOk);
  const Json m = Json::parse(read_file(d / "first/manifest.json"));
  CHECK(m.at("seeds").at("master") == 77);
  CHECK(m.at("command") == "solve");
  REQUIRE(cli({"solve", "--config", d / "first/manifest.json", "--out", d / "second", "--solver",
               "myopic"})
              .code == kExitOk);
  for (const char* f : {"path.myopic.csv", "trajectory.csv", "scenario.json"}) {
    CAPTURE(f);
    CHECK(read_file(d / (std::string("first/") + f)) == read_file(d / (std::string("second/") + f)));
  }
  const Json files = m.at("files");
  bool listed = false;
  for (const auto& f : files) listed = listed || f.at("name") == "trajectory.csv";
  CHECK(listed);
}

TEST_CASE("help") {
  const Run r = cli({"--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("solve") != std::string::npos);
}

}  // TEST_SUITE
