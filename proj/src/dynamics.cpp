#include "bkl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bkl/error.hpp"
#include "bkl/trig_batch.hpp"

namespace bkl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kInvariantViolation: return "invariant_violation";
    case ErrorCode::kNonFiniteState: return "non_finite_state";
    case ErrorCode::kConnectivity: return "connectivity";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "ragged matrix: row " + std::to_string(r) + " has " +
                      std::to_string(rows[r].size()) + " entries, expected " +
                      std::to_string(cols));
    }
    std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + r * cols);
  }
  return m;
}

double Matrix::row_sum(std::size_t r) const {
  double sum = 0.0;
  for (double w : row(r)) sum += w;
  return sum;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r].assign(row(r).begin(), row(r).end());
  return out;
}

namespace {

void check_internal_graph(const Matrix& m, const char* name) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(name) + " must be a non-empty square matrix");
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (m(i, i) != 0.0) {
      throw Error(ErrorCode::kInvariantViolation,
                  std::string(name) + " has a non-zero diagonal at " + std::to_string(i));
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!(m(i, j) >= 0.0) || !std::isfinite(m(i, j))) {
        throw Error(ErrorCode::kInvariantViolation,
                    std::string(name) + " has a negative or non-finite weight");
      }
      if (m(i, j) != m(j, i)) {
        throw Error(ErrorCode::kInvariantViolation, std::string(name) + " is not symmetric");
      }
    }
    if (!(m.row_sum(i) > 0.0)) {
      throw Error(ErrorCode::kInvariantViolation,
                  std::string(name) + " row " + std::to_string(i) +
                      " has zero sum (isolated node)");
    }
  }
}

}  // namespace

void NetworkTopology::validate() const {
  check_internal_graph(blue_adj, "blue_adj");
  check_internal_graph(red_adj, "red_adj");
  if (cross_adj.rows() != n_blue() || cross_adj.cols() != n_red()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cross_adj must be " + std::to_string(n_blue()) + "x" +
                    std::to_string(n_red()));
  }
  for (std::size_t i = 0; i < cross_adj.rows(); ++i) {
    for (double w : cross_adj.row(i)) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw Error(ErrorCode::kInvariantViolation,
                    "cross_adj has a negative or non-finite weight");
      }
    }
  }
}

void BklParameters::validate(const NetworkTopology& topo) const {
  if (omega.size() != topo.n_blue() || nu.size() != topo.n_red()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "frequency vectors (" + std::to_string(omega.size()) + ", " +
                    std::to_string(nu.size()) + ") do not match topology (" +
                    std::to_string(topo.n_blue()) + ", " + std::to_string(topo.n_red()) +
                    ")");
  }
  for (double c : {zeta_b, zeta_r, zeta_br, zeta_rb, kappa_br, kappa_rb}) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "coupling and attrition constants must be finite and non-negative");
    }
  }
  for (double f : omega) {
    if (!std::isfinite(f)) throw Error(ErrorCode::kInvalidArgument, "non-finite omega");
  }
  for (double f : nu) {
    if (!std::isfinite(f)) throw Error(ErrorCode::kInvalidArgument, "non-finite nu");
  }
}

OrderParameter order_parameter(std::span<const double> phases, MeanPhaseMode mode) {
  if (phases.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "order parameter of an empty phase vector");
  }
  double re = 0.0;
  double im = 0.0;
  double sum = 0.0;
  for (double theta : phases) {
    re += std::cos(theta);
    im += std::sin(theta);
    sum += theta;
  }
  const double k = static_cast<double>(phases.size());
  OrderParameter out;
  out.magnitude = std::min(1.0, std::hypot(re, im) / k);
  out.mean_phase = mode == MeanPhaseMode::kArithmetic ? sum / k : std::atan2(im, re);
  return out;
}

BklSystem::Sparse BklSystem::compress(const Matrix& m, bool transpose) {
  const std::size_t rows = transpose ? m.cols() : m.rows();
  const std::size_t cols = transpose ? m.rows() : m.cols();
  Sparse s;
  s.offsets.reserve(rows + 1);
  s.offsets.push_back(0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double w = transpose ? m(c, r) : m(r, c);
      if (w != 0.0) s.links.push_back({c, w});
    }
    s.offsets.push_back(s.links.size());
  }
  return s;
}

BklSystem::BklSystem(const NetworkTopology& topo, const BklParameters& params)
    : n_blue_(topo.n_blue()), n_red_(topo.n_red()), params_(params) {
  topo.validate();
  params.validate(topo);
  blue_ = compress(topo.blue_adj, false);
  red_ = compress(topo.red_adj, false);
  blue_to_red_ = compress(topo.cross_adj, false);
  red_to_blue_ = compress(topo.cross_adj, true);
  blue_inv_row_sum_.resize(n_blue_);
  red_inv_row_sum_.resize(n_red_);
  for (std::size_t i = 0; i < n_blue_; ++i) blue_inv_row_sum_[i] = 1.0 / topo.blue_adj.row_sum(i);
  for (std::size_t i = 0; i < n_red_; ++i) red_inv_row_sum_[i] = 1.0 / topo.red_adj.row_sum(i);
}

Vector BklSystem::pack(const SystemState& state) const {
  if (state.beta.size() != n_blue_ || state.rho.size() != n_red_) {
    throw Error(ErrorCode::kDimensionMismatch, "state phase vectors do not match topology");
  }
  Vector y;
  y.reserve(dimension());
  y.insert(y.end(), state.beta.begin(), state.beta.end());
  y.insert(y.end(), state.rho.begin(), state.rho.end());
  y.push_back(state.pop_blue);
  y.push_back(state.pop_red);
  return y;
}

SystemState BklSystem::unpack(std::span<const double> y, double time) const {
  SystemState s;
  s.beta.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_blue_));
  s.rho.assign(y.begin() + static_cast<std::ptrdiff_t>(n_blue_),
               y.begin() + static_cast<std::ptrdiff_t>(n_blue_ + n_red_));
  s.pop_blue = y[n_blue_ + n_red_];
  s.pop_red = y[n_blue_ + n_red_ + 1];
  s.time = time;
  return s;
}

// sin(x_i - x_j) = sin x_i cos x_j - cos x_i sin x_j, so every coupling sum
// reduces to weighted sums of the per-oscillator sines and cosines.
void BklSystem::derivative(std::span<const double> y, double phi, double psi,
                           std::span<double> dy) const {
  derivative(y, Lags(phi, psi), dy);
}

void BklSystem::derivative(std::span<const double> y, const Lags& lags,
                           std::span<double> dy) const {
  const std::size_t n = n_blue_;
  const std::size_t m = n_red_;
  thread_local Vector sin_buf;
  thread_local Vector cos_buf;
  sin_buf.resize(n + m);
  cos_buf.resize(n + m);
  double* sn = sin_buf.data();
  double* cs = cos_buf.data();

  double sum_b = 0.0, re_b = 0.0, im_b = 0.0;
  double sum_r = 0.0, re_r = 0.0, im_r = 0.0;
  sincos_batch(y.data(), sn, cs, n + m);
  for (std::size_t k = 0; k < n; ++k) {
    sum_b += y[k];
    re_b += cs[k];
    im_b += sn[k];
  }
  for (std::size_t k = n; k < n + m; ++k) {
    sum_r += y[k];
    re_r += cs[k];
    im_r += sn[k];
  }

  const double sin_phi = lags.sin_phi, cos_phi = lags.cos_phi;
  const double sin_psi = lags.sin_psi, cos_psi = lags.cos_psi;
  const double* sr = sn + n;
  const double* cr = cs + n;

  for (std::size_t i = 0; i < n; ++i) {
    double s_sum = 0.0, c_sum = 0.0;
    for (std::size_t e = blue_.offsets[i]; e < blue_.offsets[i + 1]; ++e) {
      const auto& l = blue_.links[e];
      s_sum += l.weight * sn[l.to];
      c_sum += l.weight * cs[l.to];
    }
    const double internal = (sn[i] * c_sum - cs[i] * s_sum) * blue_inv_row_sum_[i];

    double cross = 0.0;
    const std::size_t begin = blue_to_red_.offsets[i], end = blue_to_red_.offsets[i + 1];
    if (begin != end) {
      double xs = 0.0, xc = 0.0;
      for (std::size_t e = begin; e < end; ++e) {
        const auto& l = blue_to_red_.links[e];
        xs += l.weight * sr[l.to];
        xc += l.weight * cr[l.to];
      }
      const double s_lag = sn[i] * cos_phi - cs[i] * sin_phi;  // sin(beta_i - phi)
      const double c_lag = cs[i] * cos_phi + sn[i] * sin_phi;  // cos(beta_i - phi)
      cross = s_lag * xc - c_lag * xs;
    }
    dy[i] = params_.omega[i] - params_.zeta_b * internal - params_.zeta_br * cross;
  }

  for (std::size_t i = 0; i < m; ++i) {
    double s_sum = 0.0, c_sum = 0.0;
    for (std::size_t e = red_.offsets[i]; e < red_.offsets[i + 1]; ++e) {
      const auto& l = red_.links[e];
      s_sum += l.weight * sr[l.to];
      c_sum += l.weight * cr[l.to];
    }
    const double internal = (sr[i] * c_sum - cr[i] * s_sum) * red_inv_row_sum_[i];

    double cross = 0.0;
    const std::size_t begin = red_to_blue_.offsets[i], end = red_to_blue_.offsets[i + 1];
    if (begin != end) {
      double xs = 0.0, xc = 0.0;
      for (std::size_t e = begin; e < end; ++e) {
        const auto& l = red_to_blue_.links[e];
        xs += l.weight * sn[l.to];
        xc += l.weight * cs[l.to];
      }
      const double s_lag = sr[i] * cos_psi - cr[i] * sin_psi;
      const double c_lag = cr[i] * cos_psi + sr[i] * sin_psi;
      cross = s_lag * xc - c_lag * xs;
    }
    dy[n + i] = params_.nu[i] - params_.zeta_r * internal - params_.zeta_rb * cross;
  }

  const double nb = static_cast<double>(n);
  const double nr = static_cast<double>(m);
  const double order_b = std::min(1.0, std::sqrt(re_b * re_b + im_b * im_b) / nb);
  const double order_r = std::min(1.0, std::sqrt(re_r * re_r + im_r * im_r) / nr);
  double mean_b, mean_r;
  if (params_.mean_phase == MeanPhaseMode::kArithmetic) {
    mean_b = sum_b / nb;
    mean_r = sum_r / nr;
  } else {
    mean_b = std::atan2(im_b, re_b);
    mean_r = std::atan2(im_r, re_r);
  }
  const double pop_b = std::max(0.0, y[n + m]);
  const double pop_r = std::max(0.0, y[n + m + 1]);
  const double lead_r = (std::sin(mean_r - mean_b) + 1.0) * 0.5;
  const double lead_b = (std::sin(mean_b - mean_r) + 1.0) * 0.5;
  dy[n + m] = pop_b > 0.0 ? -params_.kappa_rb * order_r * lead_r * pop_r : 0.0;
  dy[n + m + 1] = pop_r > 0.0 ? -params_.kappa_br * order_b * lead_b * pop_b : 0.0;
}

PhaseRates phase_derivative(const SystemState& state, const NetworkTopology& topo,
                            const BklParameters& params, double phi, double psi) {
  StateRates full = bkl_derivative(state, topo, params, phi, psi);
  return {std::move(full.dbeta), std::move(full.drho)};
}

StateRates bkl_derivative(const SystemState& state, const NetworkTopology& topo,
                          const BklParameters& params, double phi, double psi) {
  const BklSystem system(topo, params);
  const Vector y = system.pack(state);
  Vector dy(y.size());
  system.derivative(y, phi, psi, dy);
  const std::size_t n = system.n_blue();
  const std::size_t m = system.n_red();
  StateRates out;
  out.dbeta.assign(dy.begin(), dy.begin() + static_cast<std::ptrdiff_t>(n));
  out.drho.assign(dy.begin() + static_cast<std::ptrdiff_t>(n),
                  dy.begin() + static_cast<std::ptrdiff_t>(n + m));
  out.dpop_blue = dy[n + m];
  out.dpop_red = dy[n + m + 1];
  return out;
}

namespace {

// sinh(k t) / k, continuous through k = 0.
double sinhc(double k, double t) {
  const double x = k * t;
  if (std::abs(x) < 1e-8) return t * (1.0 + x * x / 6.0);
  return std::sinh(x) / k;
}

}  // namespace

ForceLevels lanchester_closed_form(double p_b0, double p_r0, double alpha_br,
                                   double alpha_rb, double t) {
  if (alpha_br < 0.0 || alpha_rb < 0.0 || t < 0.0 || p_b0 < 0.0 || p_r0 < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "lanchester_closed_form requires non-negative arguments");
  }
  const double k = std::sqrt(alpha_br * alpha_rb);
  auto at = [&](double s) {
    const double ch = std::cosh(k * s);
    const double sh = sinhc(k, s);
    return ForceLevels{p_b0 * ch - alpha_rb * p_r0 * sh, p_r0 * ch - alpha_br * p_b0 * sh};
  };

  ForceLevels end = at(t);
  if (end.pop_blue >= 0.0 && end.pop_red >= 0.0) return end;

  // One side is exhausted before t; both levels are monotone on [0, t], so
  // bisect for the first crossing and freeze there.
  double lo = 0.0, hi = t;
  for (int iter = 0; iter < 200 && hi - lo > 0.0; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const ForceLevels f = at(mid);
    if (f.pop_blue < 0.0 || f.pop_red < 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  ForceLevels frozen = at(hi);
  frozen.pop_blue = std::max(0.0, frozen.pop_blue);
  frozen.pop_red = std::max(0.0, frozen.pop_red);
  // The surviving side stops at its level when the opponent hits zero.
  const ForceLevels before = at(lo);
  if (frozen.pop_blue == 0.0) frozen.pop_red = before.pop_red;
  if (frozen.pop_red == 0.0) frozen.pop_blue = before.pop_blue;
  return frozen;
}

}  // namespace bkl
