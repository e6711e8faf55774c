#pragma once

/// Dense dual active-set solver (Goldfarb-Idnani) for strictly convex
/// quadratic programs
///
///   min  1/2 x^T G x + g^T x
///   s.t. A_eq x + b_eq  = 0
///        A_in x + b_in >= 0
///
/// G must be symmetric positive definite. The solver starts from the
/// unconstrained minimum and adds violated constraints one at a time,
/// maintaining a QR-like factorization of the active set via Givens
/// rotations. Direct method: no tuning parameters, deterministic, exact up
/// to conditioning.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ffi/types.hpp"

namespace ffi {

struct QpSolution {
  enum class Status {
    kOptimal,
    kInfeasible,    // no point satisfies the constraints
    kDegenerate,    // linearly dependent active set encountered
    kMaxIterations
  };

  Status status = Status::kMaxIterations;
  VecX x;
  VecX dual_eq;  // multipliers for A_eq rows
  VecX dual_in;  // multipliers for A_in rows (>= 0, 0 if inactive)
  int iterations = 0;
  double objective = 0.0;

  bool optimal() const { return status == Status::kOptimal; }
};

namespace detail {

inline double givens_hypot(double a, double b) {
  const double a1 = std::abs(a);
  const double b1 = std::abs(b);
  if (a1 > b1) {
    const double t = b1 / a1;
    return a1 * std::sqrt(1.0 + t * t);
  }
  if (b1 > a1) {
    const double t = a1 / b1;
    return b1 * std::sqrt(1.0 + t * t);
  }
  return a1 * std::sqrt(2.0);
}

}  // namespace detail

class QpSolver {
 public:
  QpSolution solve(const MatX& G, const VecX& g, const MatX& a_eq, const VecX& b_eq,
                   const MatX& a_in, const VecX& b_in) {
    const int n = static_cast<int>(G.rows());
    const int meq = static_cast<int>(a_eq.rows());
    const int mineq = static_cast<int>(a_in.rows());
    if (G.cols() != n || g.size() != n || a_eq.cols() != (meq ? n : a_eq.cols()) ||
        b_eq.size() != meq || (mineq && a_in.cols() != n) || b_in.size() != mineq) {
      throw std::invalid_argument("QpSolver: inconsistent dimensions");
    }

    QpSolution sol;
    Eigen::LLT<MatX> llt(G);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("QpSolver: G must be positive definite");
    }

    // Unconstrained minimum and inverse-factor J = L^-T (J J^T = G^-1).
    x_ = llt.solve(-g);
    j_ = MatX::Identity(n, n);
    llt.matrixU().solveInPlace(j_);

    r_mat_ = MatX::Zero(n, n);
    d_ = VecX::Zero(n);
    z_ = VecX::Zero(n);
    r_vec_ = VecX::Zero(n);
    active_.clear();
    u_ = VecX::Zero(n + 1);
    num_active_ = 0;
    r_norm_ = 1.0;

    const int max_iter = 20 * (n + meq + mineq) + 100;
    int iter = 0;

    // Equality rows first; they take signed steps and are never dropped.
    for (int i = 0; i < meq; ++i) {
      const VecX normal = a_eq.row(i).transpose();
      compute_step_directions(normal);
      double t2 = 0.0;
      const double z_dot_n = z_.dot(normal);
      const double slack = normal.dot(x_) + b_eq[i];
      if (std::abs(z_dot_n) > kZeroTol) {
        t2 = -slack / z_dot_n;
      } else if (std::abs(slack) > kFeasTol * (1.0 + std::abs(b_eq[i]))) {
        sol.status = QpSolution::Status::kInfeasible;
        sol.iterations = iter;
        return sol;
      }
      x_ += t2 * z_;
      u_.head(num_active_) -= t2 * r_vec_.head(num_active_);
      u_[num_active_] = t2;
      if (!add_constraint()) {
        sol.status = QpSolution::Status::kDegenerate;
        sol.iterations = iter;
        return sol;
      }
      active_.push_back(i);  // equality rows are ids [0, meq)
    }

    // Main dual active-set loop over inequalities (ids meq + row).
    while (iter++ < max_iter) {
      int worst = -1;
      double worst_slack = -kFeasTol;
      for (int i = 0; i < mineq; ++i) {
        if (is_active(meq + i)) continue;
        const double slack =
            (a_in.row(i).dot(x_) + b_in[i]) / (1.0 + std::abs(b_in[i]));
        if (slack < worst_slack) {
          worst_slack = slack;
          worst = i;
        }
      }
      if (worst < 0) {
        return finish(sol, meq, mineq, G, g, iter);
      }

      const VecX normal = a_in.row(worst).transpose();
      double u_plus = 0.0;  // dual of the incoming constraint

      while (iter++ < max_iter) {
        compute_step_directions(normal);

        // Partial step length t1: first active inequality whose dual hits 0.
        double t1 = std::numeric_limits<double>::infinity();
        int drop_idx = -1;
        for (int k = 0; k < num_active_; ++k) {
          if (active_[k] < meq) continue;
          if (r_vec_[k] > kZeroTol) {
            const double t = u_[k] / r_vec_[k];
            if (t < t1) {
              t1 = t;
              drop_idx = k;
            }
          }
        }

        // Full step length t2: slack of the incoming constraint reaches 0.
        const double z_dot_n = z_.dot(normal);
        const double slack = normal.dot(x_) + b_in[worst];
        double t2 = std::numeric_limits<double>::infinity();
        if (z_dot_n > kZeroTol) t2 = -slack / z_dot_n;

        const double t = std::min(t1, t2);
        if (!std::isfinite(t)) {
          sol.status = QpSolution::Status::kInfeasible;
          sol.iterations = iter;
          return sol;
        }

        if (!std::isfinite(t2)) {
          // Dual-only step: drop the blocking constraint and retry.
          u_.head(num_active_) -= t * r_vec_.head(num_active_);
          u_plus += t;
          drop_constraint(drop_idx);
          continue;
        }

        x_ += t * z_;
        u_.head(num_active_) -= t * r_vec_.head(num_active_);
        u_plus += t;

        if (t == t2) {
          u_[num_active_] = u_plus;
          if (!add_constraint()) {
            sol.status = QpSolution::Status::kDegenerate;
            sol.iterations = iter;
            return sol;
          }
          active_.push_back(meq + worst);
          break;  // constraint satisfied; back to violation scan
        }
        drop_constraint(drop_idx);
      }
    }

    sol.status = QpSolution::Status::kMaxIterations;
    sol.x = x_;
    sol.iterations = iter;
    return sol;
  }

 private:
  static constexpr double kZeroTol = 1e-12;
  static constexpr double kFeasTol = 1e-10;

  bool is_active(int id) const {
    for (int a : active_) {
      if (a == id) return true;
    }
    return false;
  }

  /// d = J^T n, z = J_2 d_2 (primal direction), r = R^-1 d_1 (dual direction).
  void compute_step_directions(const VecX& normal) {
    const int n = static_cast<int>(j_.rows());
    d_.noalias() = j_.transpose() * normal;
    z_.setZero();
    if (num_active_ < n) {
      z_.noalias() = j_.rightCols(n - num_active_) * d_.tail(n - num_active_);
    }
    for (int i = num_active_ - 1; i >= 0; --i) {
      double sum = d_[i];
      for (int k = i + 1; k < num_active_; ++k) sum -= r_mat_(i, k) * r_vec_[k];
      r_vec_[i] = sum / r_mat_(i, i);
    }
  }

  /// Append the constraint whose d is currently loaded; Givens rotations zero
  /// d below the new pivot. False when the active set would lose rank.
  bool add_constraint() {
    const int n = static_cast<int>(j_.rows());
    for (int j = n - 1; j >= num_active_ + 1; --j) {
      double cc = d_[j - 1];
      double ss = d_[j];
      const double h = detail::givens_hypot(cc, ss);
      if (h < std::numeric_limits<double>::epsilon()) continue;
      d_[j] = 0.0;
      ss /= h;
      cc /= h;
      if (cc < 0.0) {
        cc = -cc;
        ss = -ss;
        d_[j - 1] = -h;
      } else {
        d_[j - 1] = h;
      }
      const double xny = ss / (1.0 + cc);
      for (int k = 0; k < n; ++k) {
        const double t1 = j_(k, j - 1);
        const double t2 = j_(k, j);
        j_(k, j - 1) = t1 * cc + t2 * ss;
        j_(k, j) = xny * (t1 + j_(k, j - 1)) - t2;
      }
    }
    ++num_active_;
    r_mat_.col(num_active_ - 1).head(num_active_) = d_.head(num_active_);
    if (std::abs(d_[num_active_ - 1]) <=
        std::numeric_limits<double>::epsilon() * r_norm_) {
      return false;
    }
    r_norm_ = std::max(r_norm_, std::abs(d_[num_active_ - 1]));
    return true;
  }

  /// Remove active constraint k and restore the triangular structure.
  void drop_constraint(int k) {
    const int n = static_cast<int>(j_.rows());
    active_.erase(active_.begin() + k);
    for (int i = k; i + 1 < num_active_; ++i) u_[i] = u_[i + 1];
    u_[num_active_ - 1] = 0.0;
    for (int j = k; j + 1 < num_active_; ++j) {
      r_mat_.col(j).head(num_active_) = r_mat_.col(j + 1).head(num_active_);
    }
    r_mat_.col(num_active_ - 1).setZero();
    --num_active_;

    for (int j = k; j < num_active_; ++j) {
      double cc = r_mat_(j, j);
      double ss = r_mat_(j + 1, j);
      const double h = detail::givens_hypot(cc, ss);
      if (h < std::numeric_limits<double>::epsilon()) continue;
      cc /= h;
      ss /= h;
      r_mat_(j, j) = h;
      r_mat_(j + 1, j) = 0.0;
      if (cc < 0.0) {
        r_mat_(j, j) = -h;
        cc = -cc;
        ss = -ss;
      }
      const double xny = ss / (1.0 + cc);
      for (int col = j + 1; col < num_active_; ++col) {
        const double t1 = r_mat_(j, col);
        const double t2 = r_mat_(j + 1, col);
        r_mat_(j, col) = t1 * cc + t2 * ss;
        r_mat_(j + 1, col) = xny * (t1 + r_mat_(j, col)) - t2;
      }
      for (int row = 0; row < n; ++row) {
        const double t1 = j_(row, j);
        const double t2 = j_(row, j + 1);
        j_(row, j) = t1 * cc + t2 * ss;
        j_(row, j + 1) = xny * (t1 + j_(row, j)) - t2;
      }
    }
  }

  QpSolution finish(QpSolution& sol, int meq, int mineq, const MatX& G,
                    const VecX& g, int iter) const {
    sol.status = QpSolution::Status::kOptimal;
    sol.x = x_;
    sol.dual_eq = VecX::Zero(meq);
    sol.dual_in = VecX::Zero(mineq);
    for (int k = 0; k < num_active_; ++k) {
      if (active_[k] < meq) {
        sol.dual_eq[active_[k]] = u_[k];
      } else {
        sol.dual_in[active_[k] - meq] = u_[k];
      }
    }
    sol.iterations = iter;
    sol.objective = 0.5 * x_.dot(G * x_) + g.dot(x_);
    return sol;
  }

  MatX j_;      // L^-T, progressively rotated
  MatX r_mat_;  // triangular factor of the active-set normals
  VecX x_;
  VecX d_, z_, r_vec_;
  VecX u_;      // duals of the active set
  std::vector<int> active_;
  int num_active_ = 0;
  double r_norm_ = 1.0;
};

inline QpSolution solve_qp(const MatX& G, const VecX& g, const MatX& a_eq,
                           const VecX& b_eq, const MatX& a_in, const VecX& b_in) {
  QpSolver solver;
  return solver.solve(G, g, a_eq, b_eq, a_in, b_in);
}

}  // namespace ffi
