#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semibwk/confidence.hpp"
#include "semibwk/core.hpp"
#include "semibwk/matroid.hpp"

namespace semibwk {

/// maximize objective . x  s.t.  rows * x <= rhs,  0 <= x <= upper.
template <typename Scalar>
struct LinearProgram {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector objective;
  Matrix rows;
  Vector rhs;
  Vector upper;  // +inf allowed

  LinearProgram() = default;
  /// Empty constraint set with the unit box.
  explicit LinearProgram(int n)
      : objective(Vector::Zero(n)), rows(0, n), rhs(0), upper(Vector::Ones(n)) {}

  int variables() const { return static_cast<int>(objective.size()); }
  int constraints() const { return static_cast<int>(rows.rows()); }

  void add_row(const Eigen::Ref<const Vector>& coefficients, Scalar bound) {
    if (coefficients.size() != objective.size()) throw ContractViolation("LP row size mismatch");
    rows.conservativeResize(rows.rows() + 1, objective.size());
    rows.row(rows.rows() - 1) = coefficients.transpose();
    rhs.conservativeResize(rhs.size() + 1);
    rhs(rhs.size() - 1) = bound;
  }

  void validate() const {
    const auto n = objective.size();
    if (rows.cols() != n || rows.rows() != rhs.size() || upper.size() != n)
      throw ContractViolation("LP dimension mismatch");
    if (!objective.allFinite() || !rows.allFinite() || !rhs.allFinite())
      throw ContractViolation("LP data must be finite");
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::isnan(static_cast<double>(upper(j))) || upper(j) < Scalar(0))
        throw ContractViolation("LP upper bounds must be >= 0");
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

template <typename Scalar>
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Scalar value = Scalar(0);
  int iterations = 0;
  Scalar max_violation = Scalar(0);

  bool optimal() const { return status == LpStatus::Optimal; }
};

namespace detail {

/// Dense-tableau bounded-variable primal simplex with Bland's rule.
/// Columns are [structural | slack | artificial]; every variable has lower
/// bound 0. Phase 1 drives artificials (rows with negative rhs) to zero.
template <typename Scalar>
class BoundedSimplex {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit BoundedSimplex(const LinearProgram<Scalar>& lp) : lp_(lp) {
    n_ = lp.variables();
    m_ = lp.constraints();
    std::vector<int> negative_rows;
    for (int i = 0; i < m_; ++i)
      if (lp.rhs(i) < Scalar(0)) negative_rows.push_back(i);
    k_ = static_cast<int>(negative_rows.size());
    total_ = n_ + m_ + k_;

    original_ = Matrix::Zero(m_, total_);
    original_.leftCols(n_) = lp.rows;
    original_.middleCols(n_, m_).setIdentity();
    for (int r = 0; r < k_; ++r) original_(negative_rows[r], n_ + m_ + r) = Scalar(-1);

    upper_ = Vector::Constant(total_, kInf);
    upper_.head(n_) = lp.upper;

    tableau_ = original_;
    value_ = Vector::Zero(total_);
    at_upper_.assign(static_cast<std::size_t>(total_), false);
    basis_.resize(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
    for (int r = 0; r < k_; ++r) {
      const int row = negative_rows[r];
      tableau_.row(row) *= Scalar(-1);
      basis_[static_cast<std::size_t>(row)] = n_ + m_ + r;
    }
    row_of_.assign(static_cast<std::size_t>(total_), -1);
    for (int i = 0; i < m_; ++i) {
      value_(basis_[static_cast<std::size_t>(i)]) = std::abs(lp.rhs(i));
      row_of_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] = i;
    }
  }

  LpSolution<Scalar> run(Scalar tol) {
    LpSolution<Scalar> out;
    if (k_ > 0) {
      Vector phase1 = Vector::Zero(total_);
      phase1.tail(k_).setConstant(Scalar(-1));
      if (iterate(phase1, out.iterations) != LpStatus::Optimal)
        throw std::runtime_error("simplex: phase 1 cannot be unbounded");
      const Scalar residual = value_.tail(k_).sum();
      if (residual > tol * std::max<Scalar>(Scalar(1), lp_.rhs.cwiseAbs().maxCoeff())) {
        out.status = LpStatus::Infeasible;
        return out;
      }
      for (int r = 0; r < k_; ++r) {
        upper_(n_ + m_ + r) = Scalar(0);
        value_(n_ + m_ + r) = Scalar(0);
      }
    }
    Vector phase2 = Vector::Zero(total_);
    phase2.head(n_) = lp_.objective;
    out.status = iterate(phase2, out.iterations);
    if (out.status != LpStatus::Optimal) return out;

    refine();
    out.x = value_.head(n_);
    for (int j = 0; j < n_; ++j) out.x(j) = std::clamp(out.x(j), Scalar(0), lp_.upper(j));
    out.value = lp_.objective.dot(out.x);
    out.max_violation = lp_.constraints() > 0
                            ? std::max(Scalar(0), (lp_.rows * out.x - lp_.rhs).maxCoeff())
                            : Scalar(0);
    return out;
  }

 private:
  static constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();
  static Scalar opt_tol() { return std::numeric_limits<Scalar>::epsilon() * Scalar(1e5); }
  static Scalar pivot_tol() { return std::numeric_limits<Scalar>::epsilon() * Scalar(1e6); }

  bool is_basic(int j) const { return row_of_[static_cast<std::size_t>(j)] >= 0; }

  LpStatus iterate(const Vector& cost, int& iterations) {
    const int cap = 200 * (total_ + m_) + 1000;
    for (;;) {
      if (++iterations > cap) throw std::runtime_error("simplex: iteration cap exceeded");
      Vector basic_cost(m_);
      for (int i = 0; i < m_; ++i) basic_cost(i) = cost(basis_[static_cast<std::size_t>(i)]);
      const Vector reduced = cost - tableau_.transpose() * basic_cost;

      // Bland: lowest-index improving nonbasic column.
      int entering = -1;
      Scalar direction = Scalar(0);
      for (int j = 0; j < total_; ++j) {
        if (is_basic(j) || upper_(j) <= Scalar(0)) continue;
        if (!at_upper_[static_cast<std::size_t>(j)] && reduced(j) > opt_tol()) {
          entering = j;
          direction = Scalar(1);
          break;
        }
        if (at_upper_[static_cast<std::size_t>(j)] && reduced(j) < -opt_tol()) {
          entering = j;
          direction = Scalar(-1);
          break;
        }
      }
      if (entering < 0) return LpStatus::Optimal;

      // Ratio test; ties go to the lowest-index basic variable.
      Scalar step = upper_(entering);
      int leaving_row = -1;
      bool leaving_to_upper = false;
      for (int i = 0; i < m_; ++i) {
        const Scalar rate = -tableau_(i, entering) * direction;  // d x_B(i) / d step
        const int var = basis_[static_cast<std::size_t>(i)];
        Scalar limit = kInf;
        bool to_upper = false;
        if (rate < -pivot_tol()) {
          limit = std::max(Scalar(0), value_(var)) / -rate;
        } else if (rate > pivot_tol() && upper_(var) < kInf) {
          limit = std::max(Scalar(0), upper_(var) - value_(var)) / rate;
          to_upper = true;
        } else {
          continue;
        }
        if (limit < step ||
            (limit == step && leaving_row >= 0 && var < basis_[static_cast<std::size_t>(leaving_row)])) {
          step = limit;
          leaving_row = i;
          leaving_to_upper = to_upper;
        }
      }
      if (step == kInf) return LpStatus::Unbounded;

      for (int i = 0; i < m_; ++i)
        value_(basis_[static_cast<std::size_t>(i)]) -= tableau_(i, entering) * direction * step;
      value_(entering) += direction * step;

      if (leaving_row < 0) {
        // Bound flip of the entering variable.
        at_upper_[static_cast<std::size_t>(entering)] = direction > Scalar(0);
        value_(entering) = direction > Scalar(0) ? upper_(entering) : Scalar(0);
        continue;
      }

      const int leaving = basis_[static_cast<std::size_t>(leaving_row)];
      value_(leaving) = leaving_to_upper ? upper_(leaving) : Scalar(0);
      at_upper_[static_cast<std::size_t>(leaving)] = leaving_to_upper;
      at_upper_[static_cast<std::size_t>(entering)] = false;
      basis_[static_cast<std::size_t>(leaving_row)] = entering;
      row_of_[static_cast<std::size_t>(leaving)] = -1;
      row_of_[static_cast<std::size_t>(entering)] = leaving_row;
      pivot(leaving_row, entering);
    }
  }

  void pivot(int row, int col) {
    tableau_.row(row) /= tableau_(row, col);
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      const Scalar f = tableau_(i, col);
      if (f != Scalar(0)) tableau_.row(i) -= f * tableau_.row(row);
    }
  }

  /// Recomputes basic values from the original columns: B x_B = b - N x_N.
  void refine() {
    if (m_ == 0) return;
    Matrix basis_matrix(m_, m_);
    for (int i = 0; i < m_; ++i) basis_matrix.col(i) = original_.col(basis_[static_cast<std::size_t>(i)]);
    Vector nonbasic = value_;
    for (int i = 0; i < m_; ++i) nonbasic(basis_[static_cast<std::size_t>(i)]) = Scalar(0);
    const Vector rhs = lp_.rhs - original_ * nonbasic;
    const Vector xb = basis_matrix.fullPivLu().solve(rhs);
    if (!xb.allFinite()) return;
    for (int i = 0; i < m_; ++i) value_(basis_[static_cast<std::size_t>(i)]) = xb(i);
  }

  const LinearProgram<Scalar>& lp_;
  int n_ = 0, m_ = 0, k_ = 0, total_ = 0;
  Matrix original_;
  Matrix tableau_;
  Vector upper_;
  Vector value_;
  std::vector<bool> at_upper_;
  std::vector<int> basis_;
  std::vector<int> row_of_;
};

}  // namespace detail

/// Solves the LP to optimality. The returned point satisfies every row
/// within `tol`; a larger residual is reported as std::runtime_error.
template <typename Scalar>
LpSolution<Scalar> solve_lp(const LinearProgram<Scalar>& lp, Scalar tol = Scalar(1e-9)) {
  if (!(tol > Scalar(0))) throw ContractViolation("solve_lp: tol must be positive");
  lp.validate();
  detail::BoundedSimplex<Scalar> simplex(lp);
  LpSolution<Scalar> sol = simplex.run(tol);
  if (sol.optimal() && sol.max_violation > tol)
    throw std::runtime_error("simplex: residual check failed (" +
                             std::to_string(static_cast<double>(sol.max_violation)) + ")");
  return sol;
}

/// maximize reward . x  s.t.  consumption(:, j) . x <= budget_rate for all j,
/// x in the matroid polytope.
LinearProgram<double> build_atom_lp(const Eigen::Ref<const Eigen::VectorXd>& reward,
                                    const Eigen::Ref<const Eigen::MatrixXd>& consumption,
                                    const MatroidConstraint& m, double budget_rate);

/// The per-round optimistic LP: UCB rewards, LCB consumption, budget
/// rescaled to (1 - eps) * B / T. Throws ConfigError when eps is outside [0, 1).
LinearProgram<double> build_lp_alg(const ConfidenceBounds& bounds, const MatroidConstraint& m,
                                   double budget, int horizon, double eps);

}  // namespace semibwk
