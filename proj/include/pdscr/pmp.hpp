#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdscr/complementarity.hpp"
#include "pdscr/milp.hpp"
#include "pdscr/simplex.hpp"

namespace pdscr {

// Serial production line: R procedures with parallel machines, R-1 buffers
// between adjacent procedures. Project counts are continuous in the LP;
// integer schedules appear only in test oracles.
struct PmpSystem {
  struct Stage {
    double max_projects = 0;       // simultaneous project cap
    double power_per_project = 0;  // MW drawn per project and slot
  };
  std::vector<Stage> procedures;  // size R >= 2
  std::vector<Stage> buffers;     // size R-1
  double target_projects = 0;     // minimum finished projects per cycle
  double fixed_cost = 0;          // currency per cycle
  int horizon = 0;                // slots per cycle, 1 h each

  int R() const { return static_cast<int>(procedures.size()); }
  int T() const { return horizon; }

  void validate() const {
    if (R() < 2) throw std::invalid_argument("pmp: needs at least 2 procedures");
    if (static_cast<int>(buffers.size()) != R() - 1)
      throw std::invalid_argument("pmp: buffer count must be R-1");
    if (horizon < 2) throw std::invalid_argument("pmp: horizon too short");
    for (const auto& s : procedures)
      if (s.max_projects <= 0 || s.power_per_project <= 0)
        throw std::invalid_argument("pmp: procedure caps/powers must be > 0");
    for (const auto& s : buffers)
      if (s.max_projects <= 0 || s.power_per_project <= 0)
        throw std::invalid_argument("pmp: buffer caps/powers must be > 0");
    if (target_projects < 0)
      throw std::invalid_argument("pmp: negative production target");
    double last_cap = horizon * procedures.back().max_projects;
    if (last_cap < target_projects)
      throw std::invalid_argument(
          "pmp: final procedure capacity " + std::to_string(last_cap) +
          " cannot reach target " + std::to_string(target_projects));
  }
};

struct PmpSchedule {
  std::vector<std::vector<double>> processed;  // [t][i], T x R
  std::vector<std::vector<double>> buffered;   // [t][i], T x (R-1)

  double slot_demand_mw(const PmpSystem& sys, int t) const {
    double d = 0;
    for (int i = 0; i < sys.R(); ++i)
      d += processed[t][i] * sys.procedures[i].power_per_project;
    for (int i = 0; i < sys.R() - 1; ++i)
      d += buffered[t][i] * sys.buffers[i].power_per_project;
    return d;
  }
};

struct PmpVars {
  std::vector<std::vector<int>> np;  // [t][i]
  std::vector<std::vector<int>> nb;
};

struct PmpRows {
  std::vector<std::vector<int>> np_ub, np_lb;  // caps and nonnegativity
  std::vector<std::vector<int>> nb_ub, nb_lb;
  std::vector<std::vector<int>> flow;          // inflow limit, (T-1)x(R-1)
  int target = -1;
  std::vector<std::vector<int>> balance;       // buffer balance, (T-1)x(R-1)
  int end_empty = -1, start_empty = -1;

  std::vector<int> all_rows() const {
    std::vector<int> out;
    auto add2 = [&](const std::vector<std::vector<int>>& m) {
      for (const auto& r : m) out.insert(out.end(), r.begin(), r.end());
    };
    add2(np_ub);
    add2(np_lb);
    add2(nb_ub);
    add2(nb_lb);
    add2(flow);
    out.push_back(target);
    add2(balance);
    out.push_back(end_empty);
    out.push_back(start_empty);
    return out;
  }
};

// Adds project-count variables and the full production constraint set.
// All inequalities are emitted as rows (not just box bounds) so multipliers
// can be attached to them later.
inline PmpVars add_pmp_block(MilpProblem& p, const PmpSystem& sys,
                             PmpRows* rows_out,
                             const std::string& prefix = "pmp") {
  sys.validate();
  const int T = sys.T(), R = sys.R();
  PmpVars v;
  v.np.assign(T, std::vector<int>(R));
  v.nb.assign(T, std::vector<int>(R - 1));
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < R; ++i)
      v.np[t][i] = p.add_var(
          prefix + ".np[" + std::to_string(t) + "][" + std::to_string(i) + "]",
          0.0, sys.procedures[i].max_projects);
    for (int i = 0; i < R - 1; ++i)
      v.nb[t][i] = p.add_var(
          prefix + ".nb[" + std::to_string(t) + "][" + std::to_string(i) + "]",
          0.0, sys.buffers[i].max_projects);
  }

  PmpRows rows;
  rows.np_ub.assign(T, std::vector<int>(R));
  rows.np_lb.assign(T, std::vector<int>(R));
  rows.nb_ub.assign(T, std::vector<int>(R - 1));
  rows.nb_lb.assign(T, std::vector<int>(R - 1));
  rows.flow.assign(T - 1, std::vector<int>(R - 1));
  rows.balance.assign(T - 1, std::vector<int>(R - 1));

  auto tag = [&](const char* k, int t, int i) {
    return prefix + "." + k + "[" + std::to_string(t) + "][" +
           std::to_string(i) + "]";
  };

  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < R; ++i) {
      rows.np_ub[t][i] =
          p.add_row({{v.np[t][i], 1.0}}, Relation::LessEq,
                    sys.procedures[i].max_projects, tag("np_cap", t, i));
      rows.np_lb[t][i] = p.add_row({{v.np[t][i], -1.0}}, Relation::LessEq,
                                   0.0, tag("np_pos", t, i));
    }
    for (int i = 0; i < R - 1; ++i) {
      rows.nb_ub[t][i] =
          p.add_row({{v.nb[t][i], 1.0}}, Relation::LessEq,
                    sys.buffers[i].max_projects, tag("nb_cap", t, i));
      rows.nb_lb[t][i] = p.add_row({{v.nb[t][i], -1.0}}, Relation::LessEq,
                                   0.0, tag("nb_pos", t, i));
    }
  }

  // inflow to procedure i+1 limited by the upstream buffer plus capacity
  for (int t = 0; t + 1 < T; ++t)
    for (int i = 0; i < R - 1; ++i)
      rows.flow[t][i] = p.add_row(
          {{v.np[t + 1][i + 1], 1.0}, {v.nb[t][i], -1.0}}, Relation::LessEq,
          sys.procedures[i].max_projects, tag("flow", t, i));

  {
    LinExpr e;
    for (int t = 0; t < T; ++t) e.push_back({v.np[t][R - 1], -1.0});
    rows.target = p.add_row(std::move(e), Relation::LessEq,
                            -sys.target_projects, prefix + ".target");
  }

  for (int t = 0; t + 1 < T; ++t)
    for (int i = 0; i < R - 1; ++i)
      rows.balance[t][i] =
          p.add_row({{v.nb[t][i], 1.0},
                     {v.np[t][i], 1.0},
                     {v.np[t][i + 1], -1.0},
                     {v.nb[t + 1][i], -1.0}},
                    Relation::Equal, 0.0, tag("balance", t, i));

  {
    LinExpr e;
    for (int i = 0; i < R - 1; ++i) {
      e.push_back({v.np[T - 1][i], 1.0});
      e.push_back({v.nb[T - 1][i], 1.0});
    }
    rows.end_empty =
        p.add_row(std::move(e), Relation::Equal, 0.0, prefix + ".end_empty");
  }
  {
    LinExpr e;
    for (int i = 1; i < R; ++i) e.push_back({v.np[0][i], 1.0});
    for (int i = 0; i < R - 1; ++i) e.push_back({v.nb[0][i], 1.0});
    rows.start_empty =
        p.add_row(std::move(e), Relation::Equal, 0.0, prefix + ".start_empty");
  }

  if (rows_out) *rows_out = rows;
  return v;
}

inline void check_prices(const PmpSystem& sys, const std::vector<double>& a) {
  if (static_cast<int>(a.size()) != sys.T())
    throw std::invalid_argument("price vector length != horizon");
  for (double x : a)
    if (!std::isfinite(x) || x < 0)
      throw std::invalid_argument("prices must be finite and >= 0");
}

// Electricity-cost LP of the production line at fixed per-slot prices
// (currency per MWh; slots are 1 h, so MW == MWh per slot).
inline MilpProblem build_pmp_lp(const PmpSystem& sys,
                                const std::vector<double>& alpha,
                                PmpVars* vars_out = nullptr,
                                PmpRows* rows_out = nullptr) {
  check_prices(sys, alpha);
  MilpProblem p;
  PmpVars v = add_pmp_block(p, sys, rows_out);
  for (int t = 0; t < sys.T(); ++t) {
    for (int i = 0; i < sys.R(); ++i)
      p.set_obj(v.np[t][i], alpha[t] * sys.procedures[i].power_per_project);
    for (int i = 0; i < sys.R() - 1; ++i)
      p.set_obj(v.nb[t][i], alpha[t] * sys.buffers[i].power_per_project);
  }
  p.objective_constant = sys.fixed_cost;
  if (vars_out) *vars_out = v;
  return p;
}

struct PmpResult {
  SolveStatus status = SolveStatus::Infeasible;
  PmpSchedule schedule;
  double j_pmp = 0;
};

inline PmpSchedule extract_schedule(const PmpSystem& sys, const PmpVars& v,
                                    const std::vector<double>& x) {
  PmpSchedule s;
  s.processed.assign(sys.T(), std::vector<double>(sys.R()));
  s.buffered.assign(sys.T(), std::vector<double>(sys.R() - 1));
  for (int t = 0; t < sys.T(); ++t) {
    for (int i = 0; i < sys.R(); ++i) s.processed[t][i] = x[v.np[t][i]];
    for (int i = 0; i < sys.R() - 1; ++i) s.buffered[t][i] = x[v.nb[t][i]];
  }
  return s;
}

inline double schedule_cost(const PmpSystem& sys, const PmpSchedule& s,
                            const std::vector<double>& alpha) {
  double c = sys.fixed_cost;
  for (int t = 0; t < sys.T(); ++t) c += alpha[t] * s.slot_demand_mw(sys, t);
  return c;
}

inline PmpResult solve_pmp(const PmpSystem& sys,
                           const std::vector<double>& alpha,
                           const SolverConfig& cfg = {}) {
  PmpVars v;
  auto p = build_pmp_lp(sys, alpha, &v);
  auto sol = solve_lp(p, cfg);
  PmpResult r;
  r.status = sol.status;
  if (sol.status == SolveStatus::Optimal) {
    r.schedule = extract_schedule(sys, v, sol.x);
    r.j_pmp = sol.objective;
  }
  return r;
}

// Price handed to the KKT block: either fixed numbers or a two-tier choice
// driven by leader binaries (alpha_t = low + (high-low) * z_t).
struct PriceSpec {
  std::vector<double> fixed;
  std::vector<int> tier_vars;
  double tier_low = 0, tier_high = 0;

  bool symbolic() const { return !tier_vars.empty(); }
  double max_price() const {
    if (symbolic()) return std::max(tier_low, tier_high);
    double m = 0;
    for (double a : fixed) m = std::max(m, a);
    return m;
  }
  static PriceSpec from_fixed(std::vector<double> a) {
    PriceSpec s;
    s.fixed = std::move(a);
    return s;
  }
};

struct PmpKkt {
  PmpVars y;
  PmpRows rows;
  // multipliers, indexed like the rows they price
  std::vector<std::vector<int>> l_np_ub, l_np_lb, l_nb_ub, l_nb_lb, l_flow;
  int l_target = -1;
  std::vector<std::vector<int>> nu_balance;
  int nu_end = -1, nu_start = -1;
  std::vector<int> stationarity_rows;
  std::vector<int> switches;
};

// Emits the follower optimality system: stationarity of the cost
// Lagrangian, complementarity switches for every inequality, and dual sign
// bounds. Parameterized by the price spec, so the block can sit inside a
// leader problem. Fills p.kkt so the solver can exploit the structure.
inline PmpKkt emit_kkt(MilpProblem& p, const PmpSystem& sys,
                       const PriceSpec& price,
                       const std::string& prefix = "pmp") {
  sys.validate();
  if (!price.symbolic()) check_prices(sys, price.fixed);
  const int T = sys.T(), R = sys.R();

  PmpKkt K;
  K.y = add_pmp_block(p, sys, &K.rows, prefix);

  double c_sum = 0;
  for (const auto& s : sys.procedures) c_sum += s.power_per_project;
  for (const auto& s : sys.buffers) c_sum += s.power_per_project;
  const double m_lambda = std::max(10.0, 10.0 * price.max_price() * c_sum);

  auto dual = [&](const char* k, int t, int i) {
    return p.add_var(prefix + ".l_" + std::string(k) + "[" +
                         std::to_string(t) + "][" + std::to_string(i) + "]",
                     0.0, m_lambda);
  };
  auto dual_free = [&](const std::string& name) {
    return p.add_var(prefix + "." + name, -kInf, kInf);
  };

  K.l_np_ub.assign(T, std::vector<int>(R));
  K.l_np_lb.assign(T, std::vector<int>(R));
  K.l_nb_ub.assign(T, std::vector<int>(R - 1));
  K.l_nb_lb.assign(T, std::vector<int>(R - 1));
  K.l_flow.assign(T - 1, std::vector<int>(R - 1));
  K.nu_balance.assign(T - 1, std::vector<int>(R - 1));
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < R; ++i) {
      K.l_np_ub[t][i] = dual("np_ub", t, i);
      K.l_np_lb[t][i] = dual("np_lb", t, i);
    }
    for (int i = 0; i < R - 1; ++i) {
      K.l_nb_ub[t][i] = dual("nb_ub", t, i);
      K.l_nb_lb[t][i] = dual("nb_lb", t, i);
    }
  }
  for (int t = 0; t + 1 < T; ++t)
    for (int i = 0; i < R - 1; ++i) K.l_flow[t][i] = dual("flow", t, i);
  K.l_target = p.add_var(prefix + ".l_target", 0.0, m_lambda);
  for (int t = 0; t + 1 < T; ++t)
    for (int i = 0; i < R - 1; ++i)
      K.nu_balance[t][i] = dual_free("nu_bal[" + std::to_string(t) + "][" +
                                     std::to_string(i) + "]");
  K.nu_end = dual_free("nu_end");
  K.nu_start = dual_free("nu_start");

  // price term of the stationarity row for variable with power coeff c:
  // fixed -> moves to rhs, symbolic -> tier-delta times the slot binary
  auto stationarity = [&](int t, double c, LinExpr duals_part,
                          const std::string& name) {
    double rhs;
    if (price.symbolic()) {
      duals_part.push_back(
          {price.tier_vars[t], (price.tier_high - price.tier_low) * c});
      rhs = -price.tier_low * c;
    } else {
      rhs = -price.fixed[t] * c;
    }
    K.stationarity_rows.push_back(
        p.add_row(std::move(duals_part), Relation::Equal, rhs, name));
  };

  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < R; ++i) {
      LinExpr e = {{K.l_np_ub[t][i], 1.0}, {K.l_np_lb[t][i], -1.0}};
      if (t >= 1 && i >= 1) e.push_back({K.l_flow[t - 1][i - 1], 1.0});
      if (i == R - 1) e.push_back({K.l_target, -1.0});
      if (t + 1 < T && i < R - 1) e.push_back({K.nu_balance[t][i], 1.0});
      if (t + 1 < T && i >= 1) e.push_back({K.nu_balance[t][i - 1], -1.0});
      if (t == T - 1 && i < R - 1) e.push_back({K.nu_end, 1.0});
      if (t == 0 && i >= 1) e.push_back({K.nu_start, 1.0});
      stationarity(t, sys.procedures[i].power_per_project, std::move(e),
                   prefix + ".st_np[" + std::to_string(t) + "][" +
                       std::to_string(i) + "]");
    }
    for (int i = 0; i < R - 1; ++i) {
      LinExpr e = {{K.l_nb_ub[t][i], 1.0}, {K.l_nb_lb[t][i], -1.0}};
      if (t + 1 < T) e.push_back({K.l_flow[t][i], -1.0});
      if (t + 1 < T) e.push_back({K.nu_balance[t][i], 1.0});
      if (t >= 1) e.push_back({K.nu_balance[t - 1][i], -1.0});
      if (t == T - 1) e.push_back({K.nu_end, 1.0});
      if (t == 0) e.push_back({K.nu_start, 1.0});
      stationarity(t, sys.buffers[i].power_per_project, std::move(e),
                   prefix + ".st_nb[" + std::to_string(t) + "][" +
                       std::to_string(i) + "]");
    }
  }

  // complementarity switches, big-M on the slack side from count ranges
  auto pair = [&](int row, int lam, double slack_range, const char* k, int t,
                  int i) {
    int z = add_complementarity(p, row, lam, 10.0 * std::max(1.0, slack_range),
                                m_lambda,
                                prefix + ".cs_" + std::string(k) + "[" +
                                    std::to_string(t) + "][" +
                                    std::to_string(i) + "]");
    K.switches.push_back(z);
  };
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < R; ++i) {
      double cap = sys.procedures[i].max_projects;
      pair(K.rows.np_ub[t][i], K.l_np_ub[t][i], cap, "np_ub", t, i);
      pair(K.rows.np_lb[t][i], K.l_np_lb[t][i], cap, "np_lb", t, i);
    }
    for (int i = 0; i < R - 1; ++i) {
      double cap = sys.buffers[i].max_projects;
      pair(K.rows.nb_ub[t][i], K.l_nb_ub[t][i], cap, "nb_ub", t, i);
      pair(K.rows.nb_lb[t][i], K.l_nb_lb[t][i], cap, "nb_lb", t, i);
    }
  }
  for (int t = 0; t + 1 < T; ++t)
    for (int i = 0; i < R - 1; ++i)
      pair(K.rows.flow[t][i], K.l_flow[t][i],
           sys.buffers[i].max_projects + sys.procedures[i].max_projects,
           "flow", t, i);
  pair(K.rows.target, K.l_target,
       T * sys.procedures[R - 1].max_projects - sys.target_projects,
       "target", 0, 0);

  // solver-facing structure
  KktStructure S;
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < R; ++i) S.primal_vars.push_back(K.y.np[t][i]);
    for (int i = 0; i < R - 1; ++i) S.primal_vars.push_back(K.y.nb[t][i]);
  }
  S.primal_rows = K.rows.all_rows();
  S.stationarity_rows = K.stationarity_rows;
  auto reg_dual = [&](int var, double weight) {
    S.dual_vars.push_back(var);
    if (weight != 0.0) S.dual_obj.push_back({var, weight});
  };
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < R; ++i) {
      reg_dual(K.l_np_ub[t][i], sys.procedures[i].max_projects);
      reg_dual(K.l_np_lb[t][i], 0.0);
    }
    for (int i = 0; i < R - 1; ++i) {
      reg_dual(K.l_nb_ub[t][i], sys.buffers[i].max_projects);
      reg_dual(K.l_nb_lb[t][i], 0.0);
    }
  }
  for (int t = 0; t + 1 < T; ++t)
    for (int i = 0; i < R - 1; ++i) {
      reg_dual(K.l_flow[t][i], sys.procedures[i].max_projects);
      reg_dual(K.nu_balance[t][i], 0.0);
    }
  reg_dual(K.l_target, -sys.target_projects);
  reg_dual(K.nu_end, 0.0);
  reg_dual(K.nu_start, 0.0);
  p.kkt = std::move(S);
  return K;
}

// Objective hook for a standalone optimality-system solve at fixed prices.
inline void set_pmp_cost_objective(MilpProblem& p, const PmpSystem& sys,
                                   const PmpVars& v,
                                   const std::vector<double>& alpha) {
  for (int t = 0; t < sys.T(); ++t) {
    for (int i = 0; i < sys.R(); ++i)
      p.set_obj(v.np[t][i], alpha[t] * sys.procedures[i].power_per_project);
    for (int i = 0; i < sys.R() - 1; ++i)
      p.set_obj(v.nb[t][i], alpha[t] * sys.buffers[i].power_per_project);
  }
  p.objective_constant = sys.fixed_cost;
}

struct KktCertificate {
  double stationarity_residual = 0;
  double complementarity_residual = 0;
  double min_multiplier = 0;  // most negative lambda seen
};

inline KktCertificate extract_certificate(const MilpProblem& p,
                                          const PmpKkt& K,
                                          const std::vector<double>& x) {
  KktCertificate c;
  for (int r : K.stationarity_rows)
    c.stationarity_residual =
        std::max(c.stationarity_residual, row_violation(p.row(r), x));
  c.complementarity_residual = complementarity_residual(p, x);
  double mn = 0;
  auto scan = [&](const std::vector<std::vector<int>>& m) {
    for (const auto& row : m)
      for (int v : row) mn = std::min(mn, x[v]);
  };
  scan(K.l_np_ub);
  scan(K.l_np_lb);
  scan(K.l_nb_ub);
  scan(K.l_nb_lb);
  scan(K.l_flow);
  mn = std::min(mn, x[K.l_target]);
  c.min_multiplier = mn;
  return c;
}

// Schedule feasibility replay used by tests and the pipeline.
inline double schedule_violation(const PmpSystem& sys, const PmpSchedule& s) {
  const int T = sys.T(), R = sys.R();
  double worst = 0;
  auto hit = [&](double v) { worst = std::max(worst, v); };
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < R; ++i) {
      hit(-s.processed[t][i]);
      hit(s.processed[t][i] - sys.procedures[i].max_projects);
    }
    for (int i = 0; i < R - 1; ++i) {
      hit(-s.buffered[t][i]);
      hit(s.buffered[t][i] - sys.buffers[i].max_projects);
    }
  }
  for (int t = 0; t + 1 < T; ++t)
    for (int i = 0; i < R - 1; ++i) {
      hit(s.processed[t + 1][i + 1] - s.buffered[t][i] -
          sys.procedures[i].max_projects);
      hit(std::fabs(s.buffered[t][i] + s.processed[t][i] -
                    s.processed[t][i + 1] - s.buffered[t + 1][i]));
    }
  double made = 0;
  for (int t = 0; t < T; ++t) made += s.processed[t][R - 1];
  hit(sys.target_projects - made);
  for (int i = 0; i < R - 1; ++i) {
    hit(std::fabs(s.processed[T - 1][i]));
    hit(std::fabs(s.buffered[T - 1][i]));
    hit(std::fabs(s.buffered[0][i]));
  }
  for (int i = 1; i < R; ++i) hit(std::fabs(s.processed[0][i]));
  return worst;
}

}  // namespace pdscr
