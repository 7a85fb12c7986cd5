#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "pdscr/milp.hpp"

namespace pdscr {

// Primal simplex for bounded variables on a dense tableau.
// Variables 0..n-1 are structural, n..n+m-1 are logicals (one per row).
// Dantzig pricing, falling back to Bland's rule after a run of degenerate
// pivots. All tie-breaking is index-ordered, so identical inputs pivot
// identically.
class BoundedSimplex {
 public:
  struct Outcome {
    SolveStatus status = SolveStatus::IterationLimit;
    std::vector<double> x;        // structural values
    std::vector<double> duals;    // d(obj)/d(rhs) per row
    std::vector<double> reduced;  // reduced costs per structural var
    double objective = 0.0;
    double dual_objective = 0.0;
    long iterations = 0;
  };

  BoundedSimplex(const MilpProblem& p, const SolverConfig& cfg) : cfg_(cfg) {
    n_ = p.num_vars();
    m_ = p.num_rows();
    tot_ = n_ + m_;
    lb_.resize(tot_);
    ub_.resize(tot_);
    cost_ = Eigen::VectorXd::Zero(tot_);
    double flip = p.sense == Sense::Maximize ? -1.0 : 1.0;
    for (int j = 0; j < n_; ++j) {
      lb_[j] = p.var(j).lb;
      ub_[j] = p.var(j).ub;
      cost_(j) = flip * p.obj()[j];
    }
    // last tableau column carries B^{-1} b
    T_.setZero(m_, tot_ + 1);
    for (int i = 0; i < m_; ++i) {
      const auto& r = p.row(i);
      for (const auto& [v, c] : r.terms) T_(i, v) += c;
      T_(i, tot_) = r.rhs;
      int s = n_ + i;
      switch (r.rel) {
        case Relation::LessEq: lb_[s] = 0; ub_[s] = kInf; break;
        case Relation::Equal: lb_[s] = 0; ub_[s] = 0; break;
        case Relation::GreaterEq: lb_[s] = -kInf; ub_[s] = 0; break;
      }
      T_(i, s) = 1.0;
    }
  }

  // Bound overrides let branch-and-bound fix binaries without rebuilding.
  void override_bounds(int var, double lo, double hi) {
    lb_[var] = lo;
    ub_[var] = hi;
  }

  Outcome solve(double sense_flip = 1.0) {
    init_basis();
    Outcome out;
    if (!phase1()) {
      out.status = iter_limit_ ? SolveStatus::IterationLimit
                               : SolveStatus::Infeasible;
      out.iterations = iters_;
      return out;
    }
    SolveStatus st = phase2();
    out.status = st;
    out.iterations = iters_;
    if (st != SolveStatus::Optimal) return out;

    std::vector<double> full(tot_);
    for (int j = 0; j < tot_; ++j) full[j] = nb_value(j);
    for (int i = 0; i < m_; ++i) full[basic_[i]] = xB_(i);
    out.x.assign(full.begin(), full.begin() + n_);

    refresh_zrow();
    out.duals.assign(m_, 0.0);
    out.reduced.assign(n_, 0.0);
    double dualobj = 0.0;
    for (int i = 0; i < m_; ++i) {
      double y = -zrow_(n_ + i);
      out.duals[i] = sense_flip * y;
      dualobj += y * T_orig_rhs_(i);
    }
    for (int j = 0; j < n_; ++j) {
      out.reduced[j] = sense_flip * zrow_(j);
      if (stat_[j] != kBasic && std::isfinite(full[j]))
        dualobj += zrow_(j) * full[j];
    }
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += cost_(j) * full[j];
    out.objective = sense_flip * obj;
    out.dual_objective = sense_flip * dualobj;
    return out;
  }

 private:
  static constexpr int kBasic = -1;
  static constexpr int kAtLb = 0;
  static constexpr int kAtUb = 1;
  static constexpr int kFree = 2;
  static constexpr double kPivTol = 1e-9;
  static constexpr double kDualTol = 1e-9;
  static constexpr double kStepTol = 1e-11;

  SolverConfig cfg_;
  int n_ = 0, m_ = 0, tot_ = 0;
  Eigen::MatrixXd T_;
  Eigen::VectorXd cost_, xB_, zrow_, T_orig_rhs_;
  std::vector<double> lb_, ub_;
  std::vector<int> basic_;
  std::vector<int> stat_;
  long iters_ = 0;
  int degen_run_ = 0;
  bool bland_ = false;
  bool iter_limit_ = false;

  double nb_value(int j) const {
    if (stat_[j] == kAtLb) return lb_[j];
    if (stat_[j] == kAtUb) return ub_[j];
    return 0.0;  // free nonbasic
  }

  void init_basis() {
    basic_.resize(m_);
    stat_.assign(tot_, kAtLb);
    for (int j = 0; j < tot_; ++j) {
      if (std::isfinite(lb_[j]))
        stat_[j] = kAtLb;
      else if (std::isfinite(ub_[j]))
        stat_[j] = kAtUb;
      else
        stat_[j] = kFree;
    }
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      stat_[n_ + i] = kBasic;
    }
    T_orig_rhs_ = T_.col(tot_);
    refresh_xB();
    iters_ = 0;
    degen_run_ = 0;
    bland_ = false;
    iter_limit_ = false;
  }

  // xB = B^{-1} b - sum over nonbasics of their tableau column * value
  void refresh_xB() {
    xB_ = T_.col(tot_);
    for (int j = 0; j < tot_; ++j) {
      if (stat_[j] == kBasic) continue;
      double v = nb_value(j);
      if (v != 0.0) xB_ -= T_.col(j) * v;
    }
  }

  double total_infeasibility() const {
    double total = 0.0;
    for (int i = 0; i < m_; ++i) {
      int v = basic_[i];
      if (xB_(i) > ub_[v]) total += xB_(i) - ub_[v];
      if (xB_(i) < lb_[v]) total += lb_[v] - xB_(i);
    }
    return total;
  }

  // Composite phase 1: minimize total bound violation of the basics.
  bool phase1() {
    Eigen::VectorXd g(m_);
    int since_refresh = 0;
    while (true) {
      if (++iters_ > cfg_.pivot_limit) {
        iter_limit_ = true;
        return false;
      }
      double total = 0.0;
      for (int i = 0; i < m_; ++i) {
        int v = basic_[i];
        if (xB_(i) > ub_[v] + cfg_.feas_tol * 0.1) {
          g(i) = 1.0;
          total += xB_(i) - ub_[v];
        } else if (xB_(i) < lb_[v] - cfg_.feas_tol * 0.1) {
          g(i) = -1.0;
          total += lb_[v] - xB_(i);
        } else {
          g(i) = 0.0;
        }
      }
      if (total <= cfg_.feas_tol * 0.5) {
        refresh_xB();
        return true;
      }

      Eigen::RowVectorXd price = g.transpose() * T_.leftCols(tot_);
      int q = -1, sigma = 0;
      double best = kDualTol;
      for (int j = 0; j < tot_; ++j) {
        if (stat_[j] == kBasic || lb_[j] == ub_[j]) continue;
        // moving x_j by sigma reduces violation at rate sigma*price[j]
        if ((stat_[j] == kAtLb || stat_[j] == kFree) && price(j) > best) {
          best = price(j);
          q = j;
          sigma = 1;
          if (bland_) break;
        }
        if ((stat_[j] == kAtUb || stat_[j] == kFree) && -price(j) > best) {
          best = -price(j);
          q = j;
          sigma = -1;
          if (bland_) break;
        }
      }
      if (q < 0) {
        refresh_xB();
        return total_infeasibility() <= cfg_.feas_tol * 100;
      }
      if (!step(q, sigma, /*phase1=*/true)) {
        // no blocking event on a descent direction cannot happen for a
        // bounded violation sum; treat as numerical failure
        return total_infeasibility() <= cfg_.feas_tol * 100;
      }
      if (++since_refresh >= 256) {
        refresh_xB();
        since_refresh = 0;
      }
    }
  }

  SolveStatus phase2() {
    refresh_zrow();
    int since_refresh = 0;
    while (true) {
      if (++iters_ > cfg_.pivot_limit) {
        iter_limit_ = true;
        return SolveStatus::IterationLimit;
      }
      int q = -1, sigma = 0;
      double best = kDualTol;
      for (int j = 0; j < tot_; ++j) {
        if (stat_[j] == kBasic || lb_[j] == ub_[j]) continue;
        if ((stat_[j] == kAtLb || stat_[j] == kFree) && -zrow_(j) > best) {
          best = -zrow_(j);
          q = j;
          sigma = 1;
          if (bland_) break;
        }
        if ((stat_[j] == kAtUb || stat_[j] == kFree) && zrow_(j) > best) {
          best = zrow_(j);
          q = j;
          sigma = -1;
          if (bland_) break;
        }
      }
      if (q < 0) {
        if (since_refresh == 0 && iters_ > 1) return SolveStatus::Optimal;
        refresh_zrow();
        refresh_xB();
        since_refresh = 0;
        if (optimal_priced()) return SolveStatus::Optimal;
        continue;
      }
      if (!step(q, sigma, /*phase1=*/false)) return SolveStatus::Unbounded;
      if (++since_refresh >= 256) {
        refresh_zrow();
        refresh_xB();
        since_refresh = 0;
      }
    }
  }

  bool optimal_priced() const {
    for (int j = 0; j < tot_; ++j) {
      if (stat_[j] == kBasic || lb_[j] == ub_[j]) continue;
      if ((stat_[j] == kAtLb || stat_[j] == kFree) && -zrow_(j) > kDualTol)
        return false;
      if ((stat_[j] == kAtUb || stat_[j] == kFree) && zrow_(j) > kDualTol)
        return false;
    }
    return true;
  }

  void refresh_zrow() {
    Eigen::VectorXd cB(m_);
    for (int i = 0; i < m_; ++i) cB(i) = cost_(basic_[i]);
    zrow_ = (cost_.transpose() - cB.transpose() * T_.leftCols(tot_));
    for (int i = 0; i < m_; ++i) zrow_(basic_[i]) = 0.0;
  }

  // Moves nonbasic q in direction sigma to the first blocking event.
  // Returns false if no event blocks (unbounded direction).
  bool step(int q, int sigma, bool phase1) {
    Eigen::VectorXd w = T_.col(q);
    double t_best = kInf;
    int leave_row = -1;
    int leave_side = kAtLb;
    double pivot_mag = 0.0;

    for (int i = 0; i < m_; ++i) {
      double delta = -sigma * w(i);
      if (std::fabs(delta) <= kPivTol) continue;
      int v = basic_[i];
      double t;
      int side;
      if (phase1 && xB_(i) > ub_[v] + cfg_.feas_tol * 0.1) {
        if (delta >= 0) continue;  // moving further above: no block
        t = (xB_(i) - ub_[v]) / (-delta);
        side = kAtUb;
      } else if (phase1 && xB_(i) < lb_[v] - cfg_.feas_tol * 0.1) {
        if (delta <= 0) continue;
        t = (lb_[v] - xB_(i)) / delta;
        side = kAtLb;
      } else if (delta > 0) {
        if (!std::isfinite(ub_[v])) continue;
        t = (ub_[v] - xB_(i)) / delta;
        side = kAtUb;
      } else {
        if (!std::isfinite(lb_[v])) continue;
        t = (xB_(i) - lb_[v]) / (-delta);
        side = kAtLb;
      }
      t = std::max(t, 0.0);
      if (t < t_best - 1e-10 ||
          (t < t_best + 1e-10 && std::fabs(w(i)) > pivot_mag)) {
        t_best = t;
        leave_row = i;
        leave_side = side;
        pivot_mag = std::fabs(w(i));
      }
    }

    double range = ub_[q] - lb_[q];
    bool flip =
        stat_[q] != kFree && std::isfinite(range) && range < t_best - 1e-12;
    if (!flip && leave_row < 0) return false;

    double t = flip ? range : t_best;
    if (t > 0) xB_ -= (sigma * t) * w;
    if (t <= kStepTol) {
      if (++degen_run_ > cfg_.degenerate_pivot_limit) bland_ = true;
    } else {
      degen_run_ = 0;
    }

    if (flip) {
      stat_[q] = stat_[q] == kAtLb ? kAtUb : kAtLb;
      return true;
    }

    double enter_val = nb_value(q) + sigma * t;
    int out_var = basic_[leave_row];
    double piv = T_(leave_row, q);
    Eigen::RowVectorXd prow = T_.row(leave_row) / piv;
    Eigen::VectorXd colq = T_.col(q);
    colq(leave_row) = 0.0;
    T_.row(leave_row) = prow;
    T_.noalias() -= colq * prow;
    if (!phase1 && zrow_.size() == tot_)
      zrow_ -= zrow_(q) * prow.head(tot_);

    stat_[out_var] = lb_[out_var] == ub_[out_var] ? kAtLb : leave_side;
    stat_[q] = kBasic;
    basic_[leave_row] = q;
    xB_(leave_row) = enter_val;
    return true;
  }
};

// LP solve of a continuous problem. Binaries are rejected.
inline MilpSolution solve_lp(const MilpProblem& p,
                             const SolverConfig& cfg = {}) {
  p.validate();
  for (const auto& v : p.vars())
    if (v.kind == VarKind::Binary)
      throw std::invalid_argument("solve_lp: problem contains binaries");
  double flip = p.sense == Sense::Maximize ? -1.0 : 1.0;
  BoundedSimplex sx(p, cfg);
  auto out = sx.solve(flip);
  MilpSolution sol;
  sol.status = out.status;
  sol.lp_iterations = out.iterations;
  if (out.status == SolveStatus::Optimal) {
    sol.x = out.x;
    sol.objective = out.objective + p.objective_constant;
    sol.duals = out.duals;
    sol.reduced_costs = out.reduced;
    sol.dual_objective = out.dual_objective + p.objective_constant;
  }
  return sol;
}

}  // namespace pdscr
