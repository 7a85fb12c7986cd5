#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <cstdio>
#include <queue>
#include <vector>

#include "pdscr/milp.hpp"
#include "pdscr/simplex.hpp"

namespace pdscr {

namespace detail {

inline double objective_at(const MilpProblem& p, const std::vector<double>& x) {
  double s = p.objective_constant;
  for (int j = 0; j < p.num_vars(); ++j) s += p.obj()[j] * x[j];
  return s;
}

inline bool feasible_at(const MilpProblem& p, const std::vector<double>& x,
                        double feas_tol) {
  for (const auto& r : p.rows()) {
    double scale = 1.0 + std::fabs(r.rhs);
    if (row_violation(r, x) > feas_tol * scale * 10) return false;
  }
  for (int j = 0; j < p.num_vars(); ++j) {
    const auto& v = p.var(j);
    double scale = 1.0 + std::max(std::fabs(v.lb), 0.0);
    if (x[j] < v.lb - feas_tol * scale * 10) return false;
    scale = 1.0 + std::max(std::fabs(v.ub), 0.0);
    if (x[j] > v.ub + feas_tol * scale * 10) return false;
  }
  return true;
}

// Completes the pair switches against the point's slacks: z=1 on active
// rows, z=0 (forcing lambda to zero) on slack ones. Returns false when a
// multiplier is materially positive on a slack row.
inline bool complete_pairs(const MilpProblem& p, const SolverConfig& cfg,
                           std::vector<double>& x) {
  for (const auto& pr : p.pairs) {
    const auto& g = p.row(pr.g_row);
    double slack = g.rhs - eval_expr(g.terms, x);
    double act_tol = cfg.feas_tol * (1.0 + std::fabs(g.rhs)) * 20;
    if (slack <= act_tol) {
      x[pr.z] = 1.0;
    } else {
      x[pr.z] = 0.0;
      if (x[pr.lambda] > cfg.opt_tol * (1.0 + pr.big_m_lambda)) return false;
      x[pr.lambda] = 0.0;
    }
  }
  return true;
}

// Follower data recovered from the stationarity block at fixed values of
// the leader binaries that enter it. stationarity_rows[k] prices
// primal_vars[k]; its constant part (after folding the fixed binaries) is
// minus the follower objective coefficient.
struct FollowerContext {
  bool ok = false;
  double j_star = 0;                 // follower optimal value (no constant)
  std::vector<double> cost;          // per primal var
  std::vector<double> dual_values;   // per dual var (aligned to dual_vars)
  std::vector<double> y_vertex;      // one exact optimum (aligned to primal_vars)
};

inline FollowerContext solve_follower(const MilpProblem& p,
                                      const SolverConfig& cfg,
                                      const std::vector<double>& fixed_vals) {
  FollowerContext out;
  const KktStructure& K = *p.kkt;
  const std::size_t ny = K.primal_vars.size();
  if (K.stationarity_rows.size() != ny) return out;

  std::vector<int> dmap(p.num_vars(), -1);
  MilpProblem dual;
  for (int v : K.dual_vars)
    dmap[v] = dual.add_var(p.var(v).name, p.var(v).lb, p.var(v).ub);

  out.cost.assign(ny, 0.0);
  for (std::size_t k = 0; k < ny; ++k) {
    const auto& row = p.row(K.stationarity_rows[k]);
    double folded = row.rhs;
    LinExpr dual_terms;
    for (const auto& [v, c] : row.terms) {
      if (dmap[v] >= 0) {
        dual_terms.push_back({dmap[v], c});
      } else {
        if (fixed_vals[v] == kInf) return out;  // unfixed leader column
        folded -= c * fixed_vals[v];
      }
    }
    out.cost[k] = -folded;
    dual.add_row(std::move(dual_terms), row.rel, folded, row.name);
  }

  MilpProblem prim;
  std::vector<int> pmap(p.num_vars(), -1);
  for (std::size_t k = 0; k < ny; ++k) {
    int v = K.primal_vars[k];
    pmap[v] = prim.add_var(p.var(v).name, p.var(v).lb, p.var(v).ub);
    prim.set_obj(pmap[v], out.cost[k]);
  }
  for (int r : K.primal_rows) {
    LinExpr e;
    for (const auto& [v, c] : p.row(r).terms) {
      if (pmap[v] < 0) return out;
      e.push_back({pmap[v], c});
    }
    prim.add_row(std::move(e), p.row(r).rel, p.row(r).rhs, p.row(r).name);
  }
  auto psol = solve_lp(prim, cfg);
  if (psol.status != SolveStatus::Optimal) return out;

  for (const auto& [v, w] : K.dual_obj) {
    if (dmap[v] < 0) return out;
    dual.set_obj(dmap[v], w);
  }
  auto dsol = solve_lp(dual, cfg);
  if (dsol.status != SolveStatus::Optimal) return out;

  double gap = psol.objective + dsol.objective;
  if (std::fabs(gap) > cfg.opt_tol * (1.0 + std::fabs(psol.objective)))
    return out;

  out.j_star = psol.objective;
  out.dual_values.resize(K.dual_vars.size());
  for (std::size_t i = 0; i < K.dual_vars.size(); ++i)
    out.dual_values[i] = dsol.x[dmap[K.dual_vars[i]]];
  out.y_vertex.resize(ny);
  for (std::size_t k = 0; k < ny; ++k)
    out.y_vertex[k] = psol.x[pmap[K.primal_vars[k]]];
  out.ok = true;
  return out;
}

// Root shortcut for problems whose binaries all stem from pair switches:
// compose a primal-dual optimal pair from the two blocks and prove it at
// the root through the dropped-rows relaxation.
inline std::optional<MilpSolution> try_kkt_presolve(const MilpProblem& p,
                                                    const SolverConfig& cfg) {
  if (!p.kkt || p.pairs.empty()) return std::nullopt;
  const KktStructure& K = *p.kkt;

  std::vector<char> is_z(p.num_vars(), 0);
  for (const auto& pr : p.pairs) is_z[pr.z] = 1;
  for (int j = 0; j < p.num_vars(); ++j)
    if (p.var(j).kind == VarKind::Binary && !is_z[j]) return std::nullopt;

  std::vector<char> role(p.num_vars(), 0);
  for (int v : K.primal_vars) role[v] = 1;
  for (int v : K.dual_vars) role[v] = 2;
  for (const auto& pr : p.pairs) role[pr.z] = 3;
  for (int j = 0; j < p.num_vars(); ++j)
    if (!role[j]) return std::nullopt;

  // follower objective must be the problem objective (up to the constant)
  std::vector<double> fixed(p.num_vars(), kInf);
  auto fc = solve_follower(p, cfg, fixed);
  if (!fc.ok) return std::nullopt;
  for (int j = 0; j < p.num_vars(); ++j)
    if (p.obj()[j] != 0.0 && role[j] != 1) return std::nullopt;
  for (std::size_t k = 0; k < K.primal_vars.size(); ++k)
    if (std::fabs(p.obj()[K.primal_vars[k]] - fc.cost[k]) > 1e-9)
      return std::nullopt;

  // primal block re-solve for the point itself
  MilpProblem prim;
  std::vector<int> pmap(p.num_vars(), -1);
  for (std::size_t k = 0; k < K.primal_vars.size(); ++k) {
    int v = K.primal_vars[k];
    pmap[v] = prim.add_var(p.var(v).name, p.var(v).lb, p.var(v).ub);
    prim.set_obj(pmap[v], fc.cost[k]);
  }
  for (int r : K.primal_rows) {
    LinExpr e;
    for (const auto& [v, c] : p.row(r).terms) e.push_back({pmap[v], c});
    prim.add_row(std::move(e), p.row(r).rel, p.row(r).rhs);
  }
  auto psol = solve_lp(prim, cfg);
  if (psol.status != SolveStatus::Optimal) return std::nullopt;

  std::vector<double> x(p.num_vars(), 0.0);
  for (int v : K.primal_vars) x[v] = psol.x[pmap[v]];
  for (std::size_t i = 0; i < K.dual_vars.size(); ++i)
    x[K.dual_vars[i]] = fc.dual_values[i];
  if (!complete_pairs(p, cfg, x)) return std::nullopt;
  if (!feasible_at(p, x, cfg.feas_tol)) return std::nullopt;

  MilpSolution sol;
  sol.status = SolveStatus::Optimal;
  sol.x = std::move(x);
  sol.objective = objective_at(p, sol.x);
  sol.duals.assign(p.num_rows(), 0.0);
  for (std::size_t k = 0; k < K.primal_rows.size(); ++k)
    sol.duals[K.primal_rows[k]] = psol.duals[k];
  sol.nodes = 1;
  sol.lp_iterations = psol.lp_iterations;
  return sol;
}

}  // namespace detail

// Best-first branch-and-bound. Nodes with equal bounds pop deepest-first.
// Problems carrying a follower optimality system get the structured
// treatment: the dual/switch block is projected out of node relaxations,
// branching never touches pair switches, and once the leader binaries
// appearing in the stationarity rows are fixed the follower value bound
// closes the subtree exactly.
inline MilpSolution solve_milp(const MilpProblem& p0,
                               const SolverConfig& cfg = {},
                               const std::vector<double>* warm = nullptr) {
  p0.validate();
  if (p0.num_binaries() > cfg.max_binaries && !p0.kkt)
    throw std::invalid_argument("solve_milp: binary count exceeds cap");

  const bool maximize = p0.sense == Sense::Maximize;
  const MilpProblem* pp = &p0;
  MilpProblem flipped;
  if (maximize) {
    flipped = p0;
    flipped.sense = Sense::Minimize;
    flipped.objective_constant = -flipped.objective_constant;
    for (int j = 0; j < flipped.num_vars(); ++j)
      flipped.set_obj(j, -flipped.obj()[j]);
    pp = &flipped;
  }
  const MilpProblem& p = *pp;

  auto finish = [&](MilpSolution s) {
    if (maximize) s.objective = -s.objective;
    return s;
  };

  if (auto ks = detail::try_kkt_presolve(p, cfg)) return finish(*ks);

  // variable roles
  std::vector<char> is_pair_z(p.num_vars(), 0), is_dual(p.num_vars(), 0);
  std::vector<char> is_stat_bin(p.num_vars(), 0);
  bool structured = false;
  if (p.kkt && !p.pairs.empty()) {
    structured = true;
    for (const auto& pr : p.pairs) is_pair_z[pr.z] = 1;
    for (int v : p.kkt->dual_vars) is_dual[v] = 1;
    for (int r : p.kkt->stationarity_rows)
      for (const auto& [v, c] : p.row(r).terms)
        if (p.var(v).kind == VarKind::Binary && !is_pair_z[v])
          is_stat_bin[v] = 1;
    for (int j = 0; j < p.num_vars() && structured; ++j)
      if (p.obj()[j] != 0.0 && (is_dual[j] || is_pair_z[j]))
        structured = false;  // objective reaches the dual block: keep it all
  }

  std::vector<int> branch_bins, stat_bins;
  for (int j = 0; j < p.num_vars(); ++j)
    if (p.var(j).kind == VarKind::Binary && !(structured && is_pair_z[j])) {
      branch_bins.push_back(j);
      if (is_stat_bin[j]) stat_bins.push_back(j);
    }

  // reduced problem: project out the dual block and the pair switches
  MilpProblem red;
  std::vector<int> rmap(p.num_vars(), -1);
  int value_row_cost_vars = 0;
  if (structured) {
    for (int j = 0; j < p.num_vars(); ++j) {
      if (is_dual[j] || is_pair_z[j]) continue;
      rmap[j] = red.add_var(p.var(j).name, p.var(j).lb, p.var(j).ub,
                            p.var(j).kind);
      red.set_obj(rmap[j], p.obj()[j]);
    }
    red.objective_constant = p.objective_constant;
    for (int r = 0; r < p.num_rows(); ++r) {
      bool keep = true;
      for (const auto& [v, c] : p.row(r).terms)
        if (rmap[v] < 0) keep = false;
      if (!keep) continue;
      LinExpr e;
      for (const auto& [v, c] : p.row(r).terms) e.push_back({rmap[v], c});
      red.add_row(std::move(e), p.row(r).rel, p.row(r).rhs, p.row(r).name);
    }
    value_row_cost_vars = static_cast<int>(p.kkt->primal_vars.size());
  }
  const MilpProblem& node_prob = structured ? red : p;
  auto to_node_id = [&](int full_id) {
    return structured ? rmap[full_id] : full_id;
  };

  struct Ctx {
    detail::FollowerContext fc;
    LinExpr value_terms;  // on node-problem ids
    double value_rhs = 0;
  };

  struct Node {
    double bound;
    int depth;
    long id;
    std::vector<std::pair<int, int>> fixes;  // full ids
    std::vector<Constraint> extra_rows;      // node-local cuts (node ids)
    std::shared_ptr<Ctx> ctx;
    bool full_mode = false;  // last-resort: branch the pair switches too
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);

  MilpSolution best;
  best.status = SolveStatus::Infeasible;
  bool have_inc = false;
  double inc_obj = kInf;
  if (warm && static_cast<int>(warm->size()) == p.num_vars()) {
    bool integral = true;
    for (int j = 0; j < p.num_vars(); ++j)
      if (p.var(j).kind == VarKind::Binary &&
          std::fabs((*warm)[j] - std::round((*warm)[j])) > cfg.int_tol)
        integral = false;
    if (integral && detail::feasible_at(p, *warm, cfg.feas_tol)) {
      best.x = *warm;
      best.objective = detail::objective_at(p, best.x);
      best.status = SolveStatus::Optimal;
      inc_obj = best.objective;
      have_inc = true;
    }
  }

  long next_id = 0;
  {
    Node root;
    root.bound = -kInf;
    root.depth = 0;
    root.id = next_id++;
    open.push(std::move(root));
  }
  long nodes = 0;
  long lp_iters = 0;
  bool hit_limit = false;
  std::vector<double> root_duals;

  auto make_ctx = [&](const std::vector<std::pair<int, int>>& fixes)
      -> std::shared_ptr<Ctx> {
    std::vector<double> fixed(p.num_vars(), kInf);
    for (auto [v, val] : fixes) fixed[v] = val;
    auto fc = detail::solve_follower(p, cfg, fixed);
    if (!fc.ok) return nullptr;
    auto ctx = std::make_shared<Ctx>();
    ctx->fc = std::move(fc);
    for (int k = 0; k < value_row_cost_vars; ++k) {
      int v = p.kkt->primal_vars[k];
      if (ctx->fc.cost[k] != 0.0)
        ctx->value_terms.push_back({to_node_id(v), ctx->fc.cost[k]});
    }
    ctx->value_rhs = ctx->fc.j_star + 1e-9 * (1 + std::fabs(ctx->fc.j_star));
    return ctx;
  };

  bool unresolved_nodes = false;
  std::vector<Node> dive;  // plunge stack used until the first incumbent

  while (!open.empty() || !dive.empty()) {
    Node nd;
    if (!have_inc && !dive.empty()) {
      nd = std::move(dive.back());
      dive.pop_back();
    } else if (!dive.empty()) {
      for (auto& d : dive) open.push(std::move(d));
      dive.clear();
      continue;
    } else {
      nd = open.top();
      open.pop();
    }
    if (have_inc && nd.bound > inc_obj - cfg.opt_tol * (1 + std::fabs(inc_obj)))
      continue;
    if (++nodes > cfg.node_limit) {
      hit_limit = true;
      break;
    }
    const bool reduced_mode = structured && !nd.full_mode;

    // attach the follower value context once its leader binaries are fixed
    if (reduced_mode && !nd.ctx) {
      std::size_t fixed_count = 0;
      for (auto [v, val] : nd.fixes)
        if (is_stat_bin[v]) ++fixed_count;
      if (fixed_count == stat_bins.size()) {
        nd.ctx = make_ctx(nd.fixes);
        if (!nd.ctx) {
          // follower blocks would not certify: re-run on the full model
          nd.full_mode = true;
          nd.ctx = nullptr;
        }
      }
    }
    const bool use_reduced = structured && !nd.full_mode;

    MilpProblem work;
    const MilpProblem* solve_prob = use_reduced ? &node_prob : &p;
    if (use_reduced && (nd.ctx || !nd.extra_rows.empty())) {
      work = node_prob;
      if (nd.ctx)
        work.add_row(LinExpr(nd.ctx->value_terms), Relation::LessEq,
                     nd.ctx->value_rhs, "follower_value");
      for (const auto& r : nd.extra_rows)
        work.add_row(LinExpr(r.terms), r.rel, r.rhs, r.name);
      solve_prob = &work;
    }
    auto solve_node = [&](const std::vector<std::pair<int, double>>& extra) {
      BoundedSimplex sx(*solve_prob, cfg);
      for (auto [v, val] : nd.fixes) {
        int nv = use_reduced ? to_node_id(v) : v;
        if (nv >= 0) sx.override_bounds(nv, double(val), double(val));
      }
      for (auto [v, val] : extra) sx.override_bounds(v, val, val);
      return sx.solve();
    };
    auto lp = solve_node({});
    lp_iters += lp.iterations;
    if (cfg.trace)
      std::fprintf(stderr,
                   "[bnb] node=%ld depth=%d fixes=%zu %s lp=%s obj=%.6g "
                   "bound=%.6g inc=%.6g iters=%ld\n",
                   nodes, nd.depth, nd.fixes.size(),
                   nd.full_mode ? "full" : (nd.ctx ? "ctx" : "red"),
                   to_string(lp.status), lp.objective,
                   lp.status == SolveStatus::Optimal
                       ? lp.objective + p.objective_constant
                       : 0.0,
                   have_inc ? inc_obj : kInf, lp.iterations);
    if (lp.status == SolveStatus::Infeasible) continue;
    if (lp.status == SolveStatus::Unbounded) {
      if (!have_inc) {
        best.status = SolveStatus::Unbounded;
        best.nodes = nodes;
        return finish(best);
      }
      continue;
    }
    if (lp.status == SolveStatus::IterationLimit) {
      hit_limit = true;
      continue;
    }
    double bound = lp.objective + p.objective_constant;
    if (nodes == 1 && !structured) root_duals = lp.duals;
    if (have_inc && bound > inc_obj - cfg.opt_tol * (1 + std::fabs(inc_obj)))
      continue;

    // branch decision
    int frac_var = -1;
    double frac_score = cfg.int_tol;
    if (use_reduced) {
      for (int b : branch_bins) {
        double v = lp.x[to_node_id(b)];
        double f = std::min(v - std::floor(v), std::ceil(v) - v);
        if (f > frac_score) {
          frac_score = f;
          frac_var = b;
        }
      }
    } else {
      for (int j = 0; j < p.num_vars(); ++j) {
        if (p.var(j).kind != VarKind::Binary) continue;
        double v = lp.x[j];
        double f = std::min(v - std::floor(v), std::ceil(v) - v);
        if (f > frac_score) {
          frac_score = f;
          frac_var = j;
        }
      }
    }

    if (frac_var < 0 && use_reduced && !nd.ctx) {
      // integral leader pattern, not yet pinned: branch into "commit to
      // this pattern" versus "any other pattern" (one no-good row)
      std::vector<std::pair<int, int>> loose;
      for (int b : stat_bins) {
        bool fixed = false;
        for (auto [v, val] : nd.fixes) fixed |= v == b;
        if (!fixed)
          loose.push_back({b, lp.x[to_node_id(b)] >= 0.5 ? 1 : 0});
      }
      if (!loose.empty()) {
        Node commit;
        commit.bound = bound;
        commit.depth = nd.depth + 1;
        commit.id = next_id++;
        commit.fixes = nd.fixes;
        for (auto pr : loose) commit.fixes.push_back(pr);
        commit.extra_rows = nd.extra_rows;
        commit.ctx = nd.ctx;

        Node other;
        other.bound = bound;
        other.depth = nd.depth + 1;
        other.id = next_id++;
        other.fixes = nd.fixes;
        other.extra_rows = nd.extra_rows;
        other.ctx = nd.ctx;
        Constraint cut;
        cut.rel = Relation::GreaterEq;
        cut.rhs = 1.0;
        cut.name = "pattern_cut";
        for (auto [b, val] : loose) {
          if (val == 0) {
            cut.terms.push_back({to_node_id(b), 1.0});
          } else {
            cut.terms.push_back({to_node_id(b), -1.0});
            cut.rhs -= 1.0;
          }
        }
        other.extra_rows.push_back(std::move(cut));
        if (!have_inc) {
          open.push(std::move(other));
          dive.push_back(std::move(commit));
        } else {
          open.push(std::move(commit));
          open.push(std::move(other));
        }
        continue;
      }
      // all pinned yet no context: certification failed, redo in full form
      Node redo = nd;
      redo.id = next_id++;
      redo.full_mode = true;
      redo.bound = bound;
      open.push(std::move(redo));
      continue;
    }

    if (frac_var < 0) {
      std::vector<double> cand;
      double obj = bound;
      bool feas = false;
      bool closes = true;  // candidate value matches the node bound
      if (!use_reduced) {
        cand = lp.x;
        feas = true;
      } else if (nd.ctx) {
        cand.assign(p.num_vars(), 0.0);
        for (int j = 0; j < p.num_vars(); ++j)
          if (rmap[j] >= 0) cand[j] = lp.x[rmap[j]];
        for (std::size_t i = 0; i < p.kkt->dual_vars.size(); ++i)
          cand[p.kkt->dual_vars[i]] = nd.ctx->fc.dual_values[i];
        feas = detail::complete_pairs(p, cfg, cand) &&
               detail::feasible_at(p, cand, cfg.feas_tol);
        if (feas) obj = detail::objective_at(p, cand);
        if (!feas) {
          // pin the exact follower vertex and let the rest re-dispatch
          std::vector<std::pair<int, double>> pin;
          for (std::size_t k = 0; k < p.kkt->primal_vars.size(); ++k)
            pin.push_back({to_node_id(p.kkt->primal_vars[k]),
                           nd.ctx->fc.y_vertex[k]});
          auto lp2 = solve_node(pin);
          lp_iters += lp2.iterations;
          if (lp2.status == SolveStatus::Optimal) {
            cand.assign(p.num_vars(), 0.0);
            for (int j = 0; j < p.num_vars(); ++j)
              if (rmap[j] >= 0) cand[j] = lp2.x[rmap[j]];
            for (std::size_t k = 0; k < p.kkt->primal_vars.size(); ++k)
              cand[p.kkt->primal_vars[k]] = nd.ctx->fc.y_vertex[k];
            for (std::size_t i = 0; i < p.kkt->dual_vars.size(); ++i)
              cand[p.kkt->dual_vars[i]] = nd.ctx->fc.dual_values[i];
            feas = detail::complete_pairs(p, cfg, cand) &&
                   detail::feasible_at(p, cand, cfg.feas_tol);
            if (feas) {
              obj = detail::objective_at(p, cand);
              closes =
                  obj <= bound + cfg.opt_tol * (1 + std::fabs(bound));
            }
          }
        }
      }
      if (feas && (!have_inc || obj < inc_obj - 1e-12)) {
        best.x = cand;
        best.objective = obj;
        best.duals = lp.duals;
        best.status = SolveStatus::Optimal;
        inc_obj = obj;
        have_inc = true;
      }
      if (feas && closes) continue;
      // could not certify this node in reduced form: requeue on the full
      // model so the pair switches get branched explicitly
      if (use_reduced) {
        Node redo = nd;
        redo.id = next_id++;
        redo.full_mode = true;
        redo.bound = bound;
        redo.ctx = nd.ctx;
        open.push(std::move(redo));
      } else {
        unresolved_nodes = true;
      }
      continue;
    }

    double relax_val =
        use_reduced ? lp.x[to_node_id(frac_var)] : lp.x[frac_var];
    int first = relax_val >= 0.5 ? 1 : 0;
    for (int side = 0; side < 2; ++side) {
      Node child;
      child.bound = bound;
      child.depth = nd.depth + 1;
      child.id = next_id++;
      child.fixes = nd.fixes;
      child.fixes.push_back({frac_var, side == 0 ? first : 1 - first});
      child.ctx = nd.ctx;
      child.full_mode = nd.full_mode;
      if (!have_inc && side == 0)
        dive.push_back(std::move(child));
      else
        open.push(std::move(child));
    }
  }

  if (hit_limit)
    best.status = SolveStatus::IterationLimit;
  else if (!have_inc)
    best.status =
        unresolved_nodes ? SolveStatus::IterationLimit : SolveStatus::Infeasible;
  best.nodes = nodes;
  best.lp_iterations = lp_iters;
  if (best.duals.empty()) best.duals = root_duals;
  return finish(best);
}

}  // namespace pdscr
