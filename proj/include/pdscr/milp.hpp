#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdscr {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Centralized numeric policy shared by every solve in the library.
struct SolverConfig {
  double feas_tol = 1e-7;    // max row residual accepted on an optimum
  double opt_tol = 1e-6;     // relative optimality / duality gap
  double int_tol = 1e-6;     // distance from {0,1} accepted as integral
  int degenerate_pivot_limit = 500;  // switch to Bland's rule after this
  int max_binaries = 256;
  long node_limit = 200000;
  long pivot_limit = 2000000;
  bool trace = false;  // stderr line per branch-and-bound node
};

enum class VarKind { Continuous, Binary };
enum class Relation { LessEq, Equal, GreaterEq };
enum class Sense { Minimize, Maximize };

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration-limit";
  }
  return "?";
}

// One term of a sparse linear expression, variable id times coefficient.
using LinTerm = std::pair<int, double>;
using LinExpr = std::vector<LinTerm>;

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = kInf;
  VarKind kind = VarKind::Continuous;
};

struct Constraint {
  LinExpr terms;
  Relation rel = Relation::LessEq;
  double rhs = 0.0;
  std::string name;
};

// Convex piecewise-linear description of a cost curve: values at strictly
// increasing breakpoints, non-decreasing secant slopes.
struct PiecewiseBlock {
  int var = -1;                    // argument variable
  std::vector<double> breaks;
  std::vector<double> values;
};

// A complementarity pair registered on the problem: row `g` (stored in
// a'y <= b form), multiplier variable `lambda` >= 0, switch binary `z`
// with lambda <= big_m_lambda * z and slack(g) <= big_m_g * (1 - z).
struct ComplementarityPair {
  int g_row = -1;
  int lambda = -1;
  int z = -1;
  double big_m_g = 0.0;
  double big_m_lambda = 0.0;
};

// Optional structural annotation for problems built from a follower LP's
// KKT system: which variables/rows form the primal block, which form the
// stationarity/dual block. Lets the solver compose a primal-dual optimal
// pair from two small LPs instead of branching on every pair binary.
struct KktStructure {
  std::vector<int> primal_vars;
  std::vector<int> dual_vars;            // every lambda and nu
  std::vector<int> primal_rows;          // inequality + equality rows on y
  std::vector<int> stationarity_rows;    // equality rows on duals only
  // rhs-weight of each dual variable in the dual objective (b of its row;
  // 0 for equality duals with zero rhs).
  std::vector<std::pair<int, double>> dual_obj;
};

class MilpProblem {
 public:
  Sense sense = Sense::Minimize;
  double objective_constant = 0.0;

  int add_var(std::string name, double lb, double ub,
              VarKind kind = VarKind::Continuous) {
    if (kind == VarKind::Binary) {
      lb = 0.0;
      ub = 1.0;
    }
    vars_.push_back({std::move(name), lb, ub, kind});
    obj_.push_back(0.0);
    return static_cast<int>(vars_.size()) - 1;
  }

  int add_binary(std::string name) {
    return add_var(std::move(name), 0, 1, VarKind::Binary);
  }

  void set_obj(int var, double coef) { obj_.at(var) = coef; }
  void add_obj(int var, double coef) { obj_.at(var) += coef; }

  int add_row(LinExpr terms, Relation rel, double rhs, std::string name = "") {
    for (const auto& [v, c] : terms) {
      if (v < 0 || v >= static_cast<int>(vars_.size()))
        throw std::invalid_argument("row '" + name +
                                    "' references undeclared variable");
      (void)c;
    }
    rows_.push_back({std::move(terms), rel, rhs, std::move(name)});
    return static_cast<int>(rows_.size()) - 1;
  }

  const std::vector<Variable>& vars() const { return vars_; }
  const std::vector<Constraint>& rows() const { return rows_; }
  const std::vector<double>& obj() const { return obj_; }
  Variable& var(int i) { return vars_.at(i); }
  const Variable& var(int i) const { return vars_.at(i); }
  const Constraint& row(int i) const { return rows_.at(i); }

  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  int num_binaries() const {
    int n = 0;
    for (const auto& v : vars_)
      if (v.kind == VarKind::Binary) ++n;
    return n;
  }

  // Attaches a convex piecewise block as epigraph rows on a fresh cost
  // variable: cost >= slope_k * x + intercept_k for every segment.
  // Returns the cost variable id.
  int attach_piecewise(const PiecewiseBlock& blk, const std::string& tag) {
    validate_piecewise(blk);
    int cost = add_var(tag + ".cost", -kInf, kInf);
    for (std::size_t k = 0; k + 1 < blk.breaks.size(); ++k) {
      double slope = (blk.values[k + 1] - blk.values[k]) /
                     (blk.breaks[k + 1] - blk.breaks[k]);
      double intercept = blk.values[k] - slope * blk.breaks[k];
      add_row({{cost, 1.0}, {blk.var, -slope}}, Relation::GreaterEq, intercept,
              tag + ".seg" + std::to_string(k));
    }
    if (blk.breaks.size() == 1)
      add_row({{cost, 1.0}}, Relation::GreaterEq, blk.values[0], tag + ".pt");
    blocks_.push_back(blk);
    return cost;
  }

  static void validate_piecewise(const PiecewiseBlock& blk) {
    if (blk.breaks.size() != blk.values.size() || blk.breaks.empty())
      throw std::invalid_argument("piecewise block shape mismatch");
    double prev_slope = -kInf;
    for (std::size_t k = 0; k + 1 < blk.breaks.size(); ++k) {
      if (!(blk.breaks[k + 1] > blk.breaks[k]))
        throw std::invalid_argument("piecewise breakpoints must increase");
      double slope = (blk.values[k + 1] - blk.values[k]) /
                     (blk.breaks[k + 1] - blk.breaks[k]);
      if (slope < prev_slope - 1e-9)
        throw std::invalid_argument("piecewise block is not convex");
      prev_slope = slope;
    }
  }

  const std::vector<PiecewiseBlock>& piecewise_blocks() const {
    return blocks_;
  }

  std::vector<ComplementarityPair> pairs;
  std::optional<KktStructure> kkt;

  // Structural sanity check; throws on malformed problems.
  void validate() const {
    for (const auto& v : vars_) {
      if (!(v.lb <= v.ub))
        throw std::invalid_argument("variable '" + v.name +
                                    "' has lb > ub");
      if (v.kind == VarKind::Binary && (v.lb != 0.0 || v.ub != 1.0))
        throw std::invalid_argument("binary '" + v.name +
                                    "' must have bounds {0,1}");
    }
  }

  // Plain LP-format dump for external cross-checking.
  std::string to_lp_text() const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::vector<double> obj_;
  std::vector<PiecewiseBlock> blocks_;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  // duals[i] = d(objective)/d(rhs of row i) at the final LP relaxation
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  double dual_objective = 0.0;
  long nodes = 0;
  long lp_iterations = 0;

  double value(int var) const { return x.at(var); }
  bool on(int var) const { return x.at(var) > 0.5; }
};

inline double eval_expr(const LinExpr& e, const std::vector<double>& x) {
  double s = 0.0;
  for (const auto& [v, c] : e) s += c * x[v];
  return s;
}

// Signed violation of a row at point x (positive = infeasible amount).
inline double row_violation(const Constraint& r, const std::vector<double>& x) {
  double lhs = eval_expr(r.terms, x);
  switch (r.rel) {
    case Relation::LessEq: return lhs - r.rhs;
    case Relation::GreaterEq: return r.rhs - lhs;
    case Relation::Equal: return std::fabs(lhs - r.rhs);
  }
  return 0.0;
}

inline double max_violation(const MilpProblem& p, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& r : p.rows()) worst = std::max(worst, row_violation(r, x));
  for (int j = 0; j < p.num_vars(); ++j) {
    const auto& v = p.var(j);
    worst = std::max(worst, v.lb - x[j]);
    worst = std::max(worst, x[j] - v.ub);
  }
  return worst;
}

inline std::string MilpProblem::to_lp_text() const {
  std::ostringstream os;
  os.precision(12);
  os << (sense == Sense::Minimize ? "Minimize" : "Maximize") << "\n obj:";
  for (int j = 0; j < num_vars(); ++j)
    if (obj_[j] != 0.0)
      os << (obj_[j] >= 0 ? " +" : " ") << obj_[j] << " " << vars_[j].name;
  if (objective_constant != 0.0)
    os << (objective_constant >= 0 ? " +" : " ") << objective_constant;
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    os << " " << (r.name.empty() ? "c" + std::to_string(i) : r.name) << ":";
    for (const auto& [v, c] : r.terms)
      os << (c >= 0 ? " +" : " ") << c << " " << vars_[v].name;
    switch (r.rel) {
      case Relation::LessEq: os << " <= "; break;
      case Relation::Equal: os << " = "; break;
      case Relation::GreaterEq: os << " >= "; break;
    }
    os << r.rhs << "\n";
  }
  os << "Bounds\n";
  for (const auto& v : vars_) {
    os << " ";
    if (v.lb == -kInf)
      os << "-inf";
    else
      os << v.lb;
    os << " <= " << v.name << " <= ";
    if (v.ub == kInf)
      os << "+inf";
    else
      os << v.ub;
    os << "\n";
  }
  bool any_bin = false;
  for (const auto& v : vars_)
    if (v.kind == VarKind::Binary) {
      if (!any_bin) os << "Binaries\n";
      any_bin = true;
      os << " " << v.name << "\n";
    }
  os << "End\n";
  return os.str();
}

}  // namespace pdscr
