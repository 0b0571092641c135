#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bkl/dynamics.hpp"
#include "bkl/error.hpp"
#include "support/oracles.hpp"
#include "support/scenarios.hpp"

using namespace bkl;
using std::numbers::pi;

namespace {

// Two-node graphs on each side, no cross links.
scenarios::Instance pair_instance() {
  scenarios::Instance x;
  x.topo.blue_adj = Matrix::from_rows({{0, 1}, {1, 0}});
  x.topo.red_adj = Matrix::from_rows({{0, 1}, {1, 0}});
  x.topo.cross_adj = Matrix(2, 2);
  x.params.omega = {0.5, 0.52};
  x.params.nu = {0.55, 0.56};
  x.state.beta = {0.3, 0.3};
  x.state.rho = {1.0, 1.0};
  x.state.pop_blue = 100;
  x.state.pop_red = 47;
  return x;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected bkl::Error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("zero coupling leaves natural frequencies") {
  auto x = scenarios::random_instance(5, 4, 11);
  x.params.zeta_b = x.params.zeta_r = x.params.zeta_br = x.params.zeta_rb = 0.0;
  const PhaseRates r = phase_derivative(x.state, x.topo, x.params, 0.7, 2.1);
  CHECK(r.dbeta == x.params.omega);
  CHECK(r.drho == x.params.nu);
}

TEST_CASE("synchronised pair without cross links drifts at omega") {
  auto x = pair_instance();
  const PhaseRates r = phase_derivative(x.state, x.topo, x.params, 1.0, 0.5);
  CHECK(r.dbeta == x.params.omega);
  CHECK(r.drho == x.params.nu);
}

TEST_CASE("phase rates match a direct transcription") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto x = scenarios::random_instance(5, 5, seed);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lag(0.0, pi);
    const double phi = lag(rng), psi = lag(rng);
    const PhaseRates r = phase_derivative(x.state, x.topo, x.params, phi, psi);
    const auto ob = oracle::blue_rates(x.state, x.topo, x.params, phi);
    const auto orr = oracle::red_rates(x.state, x.topo, x.params, psi);
    for (std::size_t i = 0; i < ob.size(); ++i) CHECK(std::abs(r.dbeta[i] - ob[i]) <= 1e-12);
    for (std::size_t j = 0; j < orr.size(); ++j) CHECK(std::abs(r.drho[j] - orr[j]) <= 1e-12);
  }
}

TEST_CASE("population rates match a direct transcription") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto x = scenarios::random_instance(4, 6, seed);
    const StateRates r = bkl_derivative(x.state, x.topo, x.params, 0.4, 1.3);
    const auto [db, dr] = oracle::population_rates(x.state, x.params);
    CHECK(std::abs(r.dpop_blue - db) <= 1e-12);
    CHECK(std::abs(r.dpop_red - dr) <= 1e-12);
    CHECK(r.dpop_blue <= 0.0);
    CHECK(r.dpop_red <= 0.0);
  }
}

TEST_CASE("derivatives are pure") {
  const auto x = scenarios::random_instance(7, 6, 3);
  const StateRates a = bkl_derivative(x.state, x.topo, x.params, 0.2, 2.9);
  const StateRates b = bkl_derivative(x.state, x.topo, x.params, 0.2, 2.9);
  CHECK(a.dbeta == b.dbeta);
  CHECK(a.drho == b.drho);
  CHECK(a.dpop_blue == b.dpop_blue);
  CHECK(a.dpop_red == b.dpop_red);
}

TEST_CASE("order parameter examples") {
  SUBCASE("equal phases") {
    const std::vector<double> ph(6, 1.234);
    const OrderParameter o = order_parameter(ph);
    CHECK(o.magnitude == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(o.mean_phase == doctest::Approx(1.234).epsilon(1e-15));
  }
  SUBCASE("antipodal pair") {
    const OrderParameter o = order_parameter(std::vector<double>{0.0, pi});
    CHECK(o.magnitude == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(o.magnitude) < 1e-15);
    CHECK(o.mean_phase == doctest::Approx(pi / 2));
  }
  SUBCASE("three quarter-turns") {
    const OrderParameter o = order_parameter(std::vector<double>{0.0, pi / 2, pi});
    CHECK(o.magnitude == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(o.mean_phase == doctest::Approx(pi / 2));
  }
  SUBCASE("empty vector") {
    CHECK(code_of([] { order_parameter(std::vector<double>{}); }) == ErrorCode::kInvalidArgument);
  }
  SUBCASE("circular mean ignores winding") {
    const std::vector<double> ph{0.1, 0.1 + 2 * pi};
    CHECK(order_parameter(ph, MeanPhaseMode::kArithmetic).mean_phase ==
          doctest::Approx(0.1 + pi));
    CHECK(order_parameter(ph, MeanPhaseMode::kCircular).mean_phase == doctest::Approx(0.1));
  }
}

TEST_CASE("order parameter magnitude stays in [0, 1]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::uniform_int_distribution<int> len(1, 20);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> ph(static_cast<std::size_t>(len(rng)));
    for (double& p : ph) p = u(rng);
    const double m = order_parameter(ph).magnitude;
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
    CHECK(m == doctest::Approx(oracle::sync(ph)).epsilon(1e-12));
  }
}

TEST_CASE("attrition example: synchronised red a quarter turn ahead") {
  auto x = pair_instance();
  x.state.beta = {0.2, 0.2};
  x.state.rho = {0.2 + pi / 2, 0.2 + pi / 2};
  x.params.kappa_rb = 0.005;
  const StateRates r = bkl_derivative(x.state, x.topo, x.params, 0.0, 0.0);
  CHECK(r.dpop_blue == doctest::Approx(-0.235).epsilon(1e-12));
}

TEST_CASE("no attrition without kappa or without an opponent") {
  auto x = scenarios::random_instance(5, 5, 9);
  SUBCASE("kappa zero") {
    x.params.kappa_br = x.params.kappa_rb = 0.0;
    const StateRates r = bkl_derivative(x.state, x.topo, x.params, 1.0, 1.0);
    CHECK(r.dpop_blue == 0.0);
    CHECK(r.dpop_red == 0.0);
  }
  SUBCASE("red exhausted") {
    x.state.pop_red = 0.0;
    const StateRates r = bkl_derivative(x.state, x.topo, x.params, 1.0, 1.0);
    CHECK(r.dpop_blue == 0.0);
    CHECK(r.dpop_red == 0.0);
  }
}

TEST_CASE("structural errors") {
  auto x = pair_instance();
  SUBCASE("frequency vector length") {
    x.params.omega = {0.5};
    CHECK(code_of([&] { phase_derivative(x.state, x.topo, x.params, 0, 0); }) ==
          ErrorCode::kDimensionMismatch);
  }
  SUBCASE("phase vector length") {
    x.state.rho = {1.0};
    CHECK(code_of([&] { phase_derivative(x.state, x.topo, x.params, 0, 0); }) ==
          ErrorCode::kDimensionMismatch);
  }
  SUBCASE("isolated node") {
    x.topo.blue_adj = Matrix::from_rows({{0, 0}, {0, 0}});
    CHECK(code_of([&] { phase_derivative(x.state, x.topo, x.params, 0, 0); }) ==
          ErrorCode::kInvariantViolation);
  }
  SUBCASE("asymmetric graph") {
    x.topo.red_adj = Matrix::from_rows({{0, 1}, {2, 0}});
    CHECK(code_of([&] { phase_derivative(x.state, x.topo, x.params, 0, 0); }) ==
          ErrorCode::kInvariantViolation);
  }
  SUBCASE("negative coupling") {
    x.params.zeta_b = -0.1;
    CHECK_THROWS_AS(phase_derivative(x.state, x.topo, x.params, 0, 0), Error);
  }
  SUBCASE("ragged rows") {
    CHECK_THROWS_AS(Matrix::from_rows({{0, 1}, {1}}), Error);
  }
}

TEST_CASE("lanchester closed form") {
  SUBCASE("no attrition") {
    const ForceLevels f = lanchester_closed_form(100, 47, 0, 0, 10);
    CHECK(f.pop_blue == 100);
    CHECK(f.pop_red == 47);
  }
  SUBCASE("symmetric forces stay equal") {
    for (double t : {0.0, 1.0, 10.0, 50.0, 99.0}) {
      const ForceLevels f = lanchester_closed_form(100, 100, 0.01, 0.01, t);
      CHECK(f.pop_blue == f.pop_red);
    }
  }
  SUBCASE("agrees with fine RK4") {
    const ForceLevels f = lanchester_closed_form(100, 47, 0.005, 0.005, 100);
    const auto [b, r] = oracle::rk4_lanchester(100, 47, 0.005, 0.005, 100, 20000);
    CHECK(std::abs(f.pop_blue - b) < 1e-8);
    CHECK(std::abs(f.pop_red - r) < 1e-8);
  }
  SUBCASE("extinction freezes both levels") {
    const ForceLevels early = lanchester_closed_form(100, 47, 0.05, 0.05, 30);
    const ForceLevels late = lanchester_closed_form(100, 47, 0.05, 0.05, 300);
    CHECK(late.pop_red == 0.0);
    CHECK(late.pop_blue > 0.0);
    // Square law: survivors = sqrt(100^2 - 47^2) when the rates match.
    CHECK(late.pop_blue == doctest::Approx(std::sqrt(100.0 * 100.0 - 47.0 * 47.0)).epsilon(1e-9));
    CHECK(early.pop_red >= 0.0);
  }
  SUBCASE("negative arguments") {
    CHECK_THROWS_AS(lanchester_closed_form(100, 47, -1, 0, 1), Error);
  }
}

}  // TEST_SUITE
