#pragma once

// Boyd-Kuramoto-Lanchester state, right-hand sides and the precomputed
// kernel used by the integrator on hot paths.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace bkl {

using Vector = std::vector<double>;

/// Dense row-major matrix of non-negative link weights.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  /// Throws kDimensionMismatch on ragged input.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  double row_sum(std::size_t r) const;
  std::vector<std::vector<double>> to_rows() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Blue graph (N×N), Red graph (M×M) and the Blue→Red contact matrix (N×M).
/// Red→Blue interaction uses the transpose of `cross_adj`.
struct NetworkTopology {
  Matrix blue_adj;
  Matrix red_adj;
  Matrix cross_adj;

  std::size_t n_blue() const noexcept { return blue_adj.rows(); }
  std::size_t n_red() const noexcept { return red_adj.rows(); }

  /// Checks shapes, symmetry, zero diagonals, non-negativity and that no node
  /// of either internal graph is isolated.
  void validate() const;

  bool operator==(const NetworkTopology&) const = default;
};

enum class MeanPhaseMode { kArithmetic, kCircular };

struct BklParameters {
  Vector omega;  // Blue natural frequencies
  Vector nu;     // Red natural frequencies
  double zeta_b = 0.5;
  double zeta_r = 0.5;
  double zeta_br = 0.4;
  double zeta_rb = 0.4;
  double kappa_br = 0.005;  // Blue attrition of Red
  double kappa_rb = 0.005;  // Red attrition of Blue
  // Carried for completeness; the dynamics never read epsilon1/epsilon2.
  double epsilon1 = 1e-15;
  double epsilon2 = 1e-20;
  // Population floors below which a player counts as depleted.
  double gamma_b = 1e-3;
  double gamma_r = 1e-5;
  MeanPhaseMode mean_phase = MeanPhaseMode::kArithmetic;

  void validate(const NetworkTopology& topo) const;

  bool operator==(const BklParameters&) const = default;
};

struct SystemState {
  Vector beta;  // unwrapped Blue phases
  Vector rho;   // unwrapped Red phases
  double pop_blue = 0.0;
  double pop_red = 0.0;
  double time = 0.0;

  bool operator==(const SystemState&) const = default;
};

struct PhaseRates {
  Vector dbeta;
  Vector drho;
};

struct StateRates {
  Vector dbeta;
  Vector drho;
  double dpop_blue = 0.0;
  double dpop_red = 0.0;
};

struct OrderParameter {
  double magnitude = 0.0;
  double mean_phase = 0.0;
};

/// |Σ e^{iθ}|/K together with the mean phase. With kArithmetic the mean phase
/// is Σθ/K on the unwrapped values; kCircular uses arg Σ e^{iθ}.
OrderParameter order_parameter(std::span<const double> phases,
                               MeanPhaseMode mode = MeanPhaseMode::kArithmetic);

PhaseRates phase_derivative(const SystemState& state, const NetworkTopology& topo,
                            const BklParameters& params, double phi, double psi);

StateRates bkl_derivative(const SystemState& state, const NetworkTopology& topo,
                          const BklParameters& params, double phi, double psi);

struct ForceLevels {
  double pop_blue = 0.0;
  double pop_red = 0.0;
};

/// Analytic solution of dP_R/dt = -alpha_br P_B, dP_B/dt = -alpha_rb P_R.
/// Once either side reaches zero both levels freeze at that instant.
ForceLevels lanchester_closed_form(double p_b0, double p_r0, double alpha_br,
                                   double alpha_rb, double t);

/// Topology and parameters flattened into edge lists so the right-hand side
/// costs one sincos per oscillator plus one multiply-add per link.
///
/// Flat state layout: [beta_0..beta_{N-1}, rho_0..rho_{M-1}, P_B, P_R].
class BklSystem {
 public:
  BklSystem(const NetworkTopology& topo, const BklParameters& params);

  std::size_t n_blue() const noexcept { return n_blue_; }
  std::size_t n_red() const noexcept { return n_red_; }
  std::size_t dimension() const noexcept { return n_blue_ + n_red_ + 2; }
  const BklParameters& params() const noexcept { return params_; }

  /// sin/cos of the two lags, fixed over an integration segment.
  struct Lags {
    Lags(double phi, double psi)
        : sin_phi(std::sin(phi)), cos_phi(std::cos(phi)),
          sin_psi(std::sin(psi)), cos_psi(std::cos(psi)) {}
    double sin_phi, cos_phi, sin_psi, cos_psi;
  };

  void derivative(std::span<const double> y, double phi, double psi,
                  std::span<double> dy) const;
  void derivative(std::span<const double> y, const Lags& lags, std::span<double> dy) const;

  Vector pack(const SystemState& state) const;
  SystemState unpack(std::span<const double> y, double time) const;

 private:
  struct Link {
    std::size_t to;
    double weight;
  };
  // CSR adjacency: row r occupies [offsets[r], offsets[r+1]).
  struct Sparse {
    std::vector<std::size_t> offsets;
    std::vector<Link> links;
  };

  static Sparse compress(const Matrix& m, bool transpose);

  std::size_t n_blue_;
  std::size_t n_red_;
  BklParameters params_;
  Sparse blue_;
  Sparse red_;
  Sparse blue_to_red_;
  Sparse red_to_blue_;
  Vector blue_inv_row_sum_;
  Vector red_inv_row_sum_;
};

}  // namespace bkl
