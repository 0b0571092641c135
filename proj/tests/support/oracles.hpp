#pragma once

// Independent reference implementations used as test oracles. These are
// written straight from the model equations with dense loops and std::complex,
// sharing no code with the library kernels.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

#include "bkl/dynamics.hpp"
#include "bkl/game.hpp"

namespace oracle {

inline std::vector<double> blue_rates(const bkl::SystemState& s, const bkl::NetworkTopology& t,
                                      const bkl::BklParameters& p, double phi) {
  const std::size_t n = s.beta.size(), m = s.rho.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double internal = 0.0, weight = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      internal += t.blue_adj(i, j) * std::sin(s.beta[i] - s.beta[j]);
      weight += t.blue_adj(i, j);
    }
    double cross = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      cross += t.cross_adj(i, j) * std::sin(s.beta[i] - s.rho[j] - phi);
    }
    out[i] = p.omega[i] - p.zeta_b * internal / weight - p.zeta_br * cross;
  }
  return out;
}

inline std::vector<double> red_rates(const bkl::SystemState& s, const bkl::NetworkTopology& t,
                                     const bkl::BklParameters& p, double psi) {
  const std::size_t n = s.beta.size(), m = s.rho.size();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double internal = 0.0, weight = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      internal += t.red_adj(i, j) * std::sin(s.rho[i] - s.rho[j]);
      weight += t.red_adj(i, j);
    }
    double cross = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      cross += t.cross_adj(j, i) * std::sin(s.rho[i] - s.beta[j] - psi);
    }
    out[i] = p.nu[i] - p.zeta_r * internal / weight - p.zeta_rb * cross;
  }
  return out;
}

inline double sync(const std::vector<double>& phases) {
  std::complex<double> z = 0.0;
  for (double th : phases) z += std::polar(1.0, th);
  return std::abs(z) / static_cast<double>(phases.size());
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// (dP_B, dP_R) with the arithmetic mean phases.
inline std::pair<double, double> population_rates(const bkl::SystemState& s,
                                                  const bkl::BklParameters& p) {
  const double gap_b = mean(s.rho) - mean(s.beta);
  const double gap_r = mean(s.beta) - mean(s.rho);
  const double db = -p.kappa_rb * sync(s.rho) * (std::sin(gap_b) + 1.0) / 2.0 * s.pop_red;
  const double dr = -p.kappa_br * sync(s.beta) * (std::sin(gap_r) + 1.0) / 2.0 * s.pop_blue;
  return {db, dr};
}

/// Classical RK4 on dP_B = -a_rb P_R, dP_R = -a_br P_B.
inline std::pair<double, double> rk4_lanchester(double pb, double pr, double a_br, double a_rb,
                                                double t, std::size_t steps) {
  const double h = t / static_cast<double>(steps);
  auto f = [&](double b, double r) { return std::pair{-a_rb * r, -a_br * b}; };
  for (std::size_t k = 0; k < steps; ++k) {
    auto [k1b, k1r] = f(pb, pr);
    auto [k2b, k2r] = f(pb + h / 2 * k1b, pr + h / 2 * k1r);
    auto [k3b, k3r] = f(pb + h / 2 * k2b, pr + h / 2 * k2r);
    auto [k4b, k4r] = f(pb + h * k3b, pr + h * k3r);
    pb += h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b);
    pr += h / 6 * (k1r + 2 * k2r + 2 * k3r + k4r);
  }
  return {pb, pr};
}

struct Cell {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// max over rows of min over columns, scanning all entries; first index wins ties.
inline Cell maxmin(const bkl::UtilityMatrix& m) {
  const int n = static_cast<int>(m.size());
  Cell best{0, 0, -std::numeric_limits<double>::infinity()};
  for (int a = 0; a < n; ++a) {
    Cell low{a, 0, std::numeric_limits<double>::infinity()};
    for (int b = 0; b < n; ++b) {
      if (m(a, b) < low.value) low = {a, b, m(a, b)};
    }
    if (low.value > best.value) best = low;
  }
  return best;
}

inline double minmax(const bkl::UtilityMatrix& m) {
  const std::size_t n = m.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < n; ++b) {
    double high = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) high = std::max(high, m(a, b));
    best = std::min(best, high);
  }
  return best;
}

struct Solved {
  double value = 0.0;
  std::vector<bkl::ActionPair> path;
};

/// Backward induction by plain recursion.
template <class G>
Solved backward_induction(const G& game, const typename G::State& s) {
  if (game.is_terminal(s)) return {game.utility(s), {}};
  const auto n = static_cast<std::size_t>(game.num_actions());
  bkl::UtilityMatrix values(n);
  std::vector<std::vector<bkl::ActionPair>> tails(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      Solved child = backward_induction(game, game.apply(s, static_cast<int>(a), static_cast<int>(b)));
      values(a, b) = child.value;
      tails[a * n + b] = child.path;
    }
  }
  const Cell c = maxmin(values);
  Solved out{c.value, {{c.row, c.col}}};
  const auto& tail = tails[static_cast<std::size_t>(c.row) * n + static_cast<std::size_t>(c.col)];
  out.path.insert(out.path.end(), tail.begin(), tail.end());
  return out;
}

inline bkl::UtilityMatrix random_matrix(std::size_t n, std::mt19937_64& rng, int levels = 0) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_int_distribution<int> q(0, std::max(levels, 1));
  bkl::UtilityMatrix m(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) m(a, b) = levels > 0 ? q(rng) : u(rng);
  }
  return m;
}

}  // namespace oracle
