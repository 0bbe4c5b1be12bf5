#pragma once

// Self-contained dense LP / 0-1 ILP solver.
//
// solve_lp: two-phase primal simplex on the bound-substituted standard form.
// Dantzig pricing with a Bland fallback after a streak of degenerate pivots,
// so termination is guaranteed. Dense tableau; intended for desk-scale
// programs (hundreds of rows/columns), which is all the library produces.
//
// solve_binary_ilp: depth-first branch-and-bound on the LP relaxation.
// Most-fractional branching, ties by variable order, closer-value child
// explored first. A node budget caps the search; when exceeded the best
// incumbent found is returned with status budget_exceeded.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "telab/error.hpp"

namespace telab {

inline constexpr double kLpFeasTol = 1e-9;   // feasibility / pivot tolerance
inline constexpr double kLpOptTol = 1e-6;    // relative optimality tolerance
inline constexpr double kLpInf = std::numeric_limits<double>::infinity();

enum class LpStatus { optimal, infeasible, unbounded, budget_exceeded };

inline const char* lp_status_name(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::budget_exceeded: return "budget-exceeded";
  }
  return "?";
}

struct LinearProgram {
  struct Term {
    int var;
    double coef;
  };
  struct Row {
    std::vector<Term> terms;
    char rel;    // '<' means <=, '=' equality, '>' means >=
    double rhs;
  };

  bool maximize = true;
  std::vector<std::string> names;
  std::vector<double> objective;
  std::vector<double> lower, upper;
  std::vector<char> binary;
  std::vector<Row> rows;
  std::map<std::string, int> by_name;

  int num_vars() const { return static_cast<int>(names.size()); }

  int add_variable(const std::string& name, double lo, double hi,
                   double obj = 0.0) {
    if (by_name.count(name))
      throw Error(ErrorKind::validation, "duplicate variable '" + name + "'");
    if (!(lo <= hi) && !(lo == -kLpInf || hi == kLpInf))
      throw Error(ErrorKind::validation,
                  "variable '" + name + "' has lower bound above upper");
    int i = num_vars();
    by_name[name] = i;
    names.push_back(name);
    lower.push_back(lo);
    upper.push_back(hi);
    objective.push_back(obj);
    binary.push_back(0);
    return i;
  }

  int add_binary(const std::string& name, double obj = 0.0) {
    int i = add_variable(name, 0.0, 1.0, obj);
    binary[i] = 1;
    return i;
  }

  int index_of(const std::string& name) const {
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw Error(ErrorKind::unknown_name, "unknown variable '" + name + "'");
    return it->second;
  }

  void add_constraint(const std::vector<Term>& terms, char rel, double rhs) {
    if (rel != '<' && rel != '=' && rel != '>')
      throw Error(ErrorKind::validation, "constraint relation must be <, =, >");
    if (!std::isfinite(rhs))
      throw Error(ErrorKind::validation, "constraint constant must be finite");
    for (const Term& term : terms) {
      if (term.var < 0 || term.var >= num_vars())
        throw Error(ErrorKind::validation, "constraint references unknown variable");
      if (!std::isfinite(term.coef))
        throw Error(ErrorKind::validation, "constraint coefficient must be finite");
    }
    rows.push_back({terms, rel, rhs});
  }
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;        // by variable index; empty when no assignment
  double objective = 0.0;
  long iterations = 0;          // simplex pivots
  long nodes = 0;               // branch-and-bound nodes (ILP only)

  double value(const LinearProgram& p, const std::string& name) const {
    return x.at(p.index_of(name));
  }
};

namespace detail {

// Two-phase simplex over explicit bound arrays (branch-and-bound overrides
// bounds without copying the program).
inline LpSolution simplex(const LinearProgram& p, const std::vector<double>& lo,
                          const std::vector<double>& up) {
  const int n = p.num_vars();
  LpSolution out;

  for (int i = 0; i < n; ++i)
    if (lo[i] > up[i] + kLpFeasTol) return out;  // infeasible

  // --- bound substitution into x^ >= 0 columns ---
  enum class Kind { shift, mirror, split };
  struct Map {
    Kind kind;
    double base;
    int col, col2;
  };
  std::vector<Map> vmap(n);
  int cols = 0;
  std::vector<double> ubrow;        // per substituted column: finite upper or inf
  for (int i = 0; i < n; ++i) {
    if (lo[i] != -kLpInf) {
      vmap[i] = {Kind::shift, lo[i], cols, -1};
      ubrow.push_back(up[i] == kLpInf ? kLpInf : up[i] - lo[i]);
      ++cols;
    } else if (up[i] != kLpInf) {
      vmap[i] = {Kind::mirror, up[i], cols, -1};
      ubrow.push_back(kLpInf);
      ++cols;
    } else {
      vmap[i] = {Kind::split, 0.0, cols, cols + 1};
      ubrow.push_back(kLpInf);
      ubrow.push_back(kLpInf);
      cols += 2;
    }
  }

  // column coefficient of original var i, and rhs shift contributed by it
  auto emit = [&](std::vector<double>& row, double& rhs, int i, double coef) {
    const Map& m = vmap[i];
    switch (m.kind) {
      case Kind::shift:
        row[m.col] += coef;
        rhs -= coef * m.base;
        break;
      case Kind::mirror:
        row[m.col] -= coef;
        rhs -= coef * m.base;
        break;
      case Kind::split:
        row[m.col] += coef;
        row[m.col2] -= coef;
        break;
    }
  };

  struct StdRow {
    std::vector<double> a;
    char rel;
    double rhs;
  };
  std::vector<StdRow> srows;
  for (const auto& r : p.rows) {
    StdRow sr{std::vector<double>(cols, 0.0), r.rel, r.rhs};
    for (const auto& term : r.terms) emit(sr.a, sr.rhs, term.var, term.coef);
    srows.push_back(std::move(sr));
  }
  for (int j = 0; j < cols; ++j)
    if (ubrow[j] != kLpInf) {
      StdRow sr{std::vector<double>(cols, 0.0), '<', ubrow[j]};
      sr.a[j] = 1.0;
      srows.push_back(std::move(sr));
    }

  // objective in substituted columns, minimization sense (the constant the
  // substitution produces is irrelevant: the final objective is recomputed
  // from the original coefficients)
  std::vector<double> cost(cols, 0.0);
  double obj_shift = 0.0;
  for (int i = 0; i < n; ++i) emit(cost, obj_shift, i, p.objective[i]);
  (void)obj_shift;
  if (p.maximize)
    for (double& c : cost) c = -c;

  // --- assemble tableau with slacks / artificials ---
  const int m = static_cast<int>(srows.size());
  int total = cols;
  std::vector<int> slack(m, -1), artificial(m, -1);
  for (int r = 0; r < m; ++r) {
    if (srows[r].rhs < 0) {
      for (double& v : srows[r].a) v = -v;
      srows[r].rhs = -srows[r].rhs;
      srows[r].rel = srows[r].rel == '<' ? '>' : (srows[r].rel == '>' ? '<' : '=');
    }
    if (srows[r].rel == '<')
      slack[r] = total++;
    else if (srows[r].rel == '>') {
      slack[r] = total++;      // surplus
      artificial[r] = total++;
    } else {
      artificial[r] = total++;
    }
  }

  std::vector<std::vector<double>> a(m, std::vector<double>(total, 0.0));
  std::vector<double> b(m);
  std::vector<int> basis(m);
  std::vector<char> is_artificial(total, 0);
  for (int r = 0; r < m; ++r) {
    std::copy(srows[r].a.begin(), srows[r].a.end(), a[r].begin());
    b[r] = srows[r].rhs;
    if (slack[r] >= 0) a[r][slack[r]] = srows[r].rel == '>' ? -1.0 : 1.0;
    if (artificial[r] >= 0) {
      a[r][artificial[r]] = 1.0;
      is_artificial[artificial[r]] = 1;
      basis[r] = artificial[r];
    } else {
      basis[r] = slack[r];
    }
  }

  std::vector<char> in_basis(total, 0);
  std::vector<char> alive_row(m, 1);
  for (int r = 0; r < m; ++r) in_basis[basis[r]] = 1;

  double obj_scale = 1.0;
  for (double c : cost) obj_scale = std::max(obj_scale, std::abs(c));

  long pivots = 0;
  const long pivot_cap = 20000 + 200L * (m + total);

  auto run_phase = [&](const std::vector<double>& phase_cost,
                       bool ban_artificials) -> bool {
    // returns false on unbounded
    int degenerate_streak = 0;
    bool bland = false;
    while (true) {
      if (pivots > pivot_cap)
        throw Error(ErrorKind::internal, "simplex pivot limit exceeded");

      // reduced costs rc_j = c_j - c_B . a_:j
      std::vector<double> cb(m, 0.0);
      for (int r = 0; r < m; ++r)
        if (alive_row[r]) cb[r] = phase_cost[basis[r]];
      int enter = -1;
      double best = -kLpFeasTol * obj_scale;
      for (int j = 0; j < total; ++j) {
        if (in_basis[j]) continue;
        if (ban_artificials && is_artificial[j]) continue;
        double rc = phase_cost[j];
        for (int r = 0; r < m; ++r)
          if (alive_row[r]) rc -= cb[r] * a[r][j];
        if (rc < best) {
          enter = j;
          if (bland) break;  // Bland: first improving column
          best = rc;         // Dantzig: most negative
        }
      }
      if (enter == -1) return true;  // optimal for this phase

      int leave = -1;
      double ratio = kLpInf;
      for (int r = 0; r < m; ++r) {
        if (!alive_row[r] || a[r][enter] <= kLpFeasTol) continue;
        double q = b[r] / a[r][enter];
        if (q < ratio - kLpFeasTol ||
            (q < ratio + kLpFeasTol && (leave == -1 || basis[r] < basis[leave])))
          leave = r, ratio = std::min(ratio, q);
      }
      if (leave == -1) return false;  // unbounded

      // pivot on (leave, enter)
      ++pivots;
      if (ratio <= kLpFeasTol) {
        if (++degenerate_streak >= 50) bland = true;
      } else {
        degenerate_streak = 0;
      }
      double piv = a[leave][enter];
      for (int j = 0; j < total; ++j) a[leave][j] /= piv;
      b[leave] /= piv;
      for (int r = 0; r < m; ++r) {
        if (r == leave || !alive_row[r]) continue;
        double f = a[r][enter];
        if (f == 0.0) continue;
        for (int j = 0; j < total; ++j) a[r][j] -= f * a[leave][j];
        b[r] -= f * b[leave];
        if (b[r] < 0 && b[r] > -kLpFeasTol) b[r] = 0.0;
      }
      in_basis[basis[leave]] = 0;
      basis[leave] = enter;
      in_basis[enter] = 1;
    }
  };

  // --- phase 1 ---
  bool any_artificial = false;
  for (int r = 0; r < m; ++r) any_artificial |= artificial[r] >= 0;
  if (any_artificial) {
    std::vector<double> c1(total, 0.0);
    for (int j = 0; j < total; ++j)
      if (is_artificial[j]) c1[j] = 1.0;
    double save_scale = obj_scale;
    obj_scale = 1.0;
    run_phase(c1, false);  // phase 1 is never unbounded
    obj_scale = save_scale;
    double infeas = 0.0;
    for (int r = 0; r < m; ++r)
      if (alive_row[r] && is_artificial[basis[r]]) infeas += b[r];
    double rhs_scale = 1.0;
    for (int r = 0; r < m; ++r) rhs_scale = std::max(rhs_scale, std::abs(srows[r].rhs));
    if (infeas > 1e-7 * rhs_scale) return out;  // infeasible

    // drive artificials out of the basis; drop redundant rows
    for (int r = 0; r < m; ++r) {
      if (!alive_row[r] || !is_artificial[basis[r]]) continue;
      int j = -1;
      for (int jj = 0; jj < total && j == -1; ++jj)
        if (!is_artificial[jj] && !in_basis[jj] && std::abs(a[r][jj]) > kLpFeasTol)
          j = jj;
      if (j == -1) {
        alive_row[r] = 0;  // redundant constraint
        in_basis[basis[r]] = 0;
        continue;
      }
      double piv = a[r][j];
      for (int jj = 0; jj < total; ++jj) a[r][jj] /= piv;
      b[r] /= piv;
      for (int rr = 0; rr < m; ++rr) {
        if (rr == r || !alive_row[rr]) continue;
        double f = a[rr][j];
        if (f == 0.0) continue;
        for (int jj = 0; jj < total; ++jj) a[rr][jj] -= f * a[r][jj];
        b[rr] -= f * b[r];
      }
      in_basis[basis[r]] = 0;
      basis[r] = j;
      in_basis[j] = 1;
    }
  }

  // --- phase 2 ---
  std::vector<double> c2(total, 0.0);
  std::copy(cost.begin(), cost.end(), c2.begin());
  if (!run_phase(c2, true)) {
    out.status = LpStatus::unbounded;
    return out;
  }

  // read substituted solution, then undo the substitution
  std::vector<double> xhat(cols, 0.0);
  for (int r = 0; r < m; ++r)
    if (alive_row[r] && basis[r] < cols) xhat[basis[r]] = b[r];
  out.x.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const Map& mp = vmap[i];
    switch (mp.kind) {
      case Kind::shift: out.x[i] = mp.base + xhat[mp.col]; break;
      case Kind::mirror: out.x[i] = mp.base - xhat[mp.col]; break;
      case Kind::split: out.x[i] = xhat[mp.col] - xhat[mp.col2]; break;
    }
    if (std::abs(out.x[i]) < 1e-12) out.x[i] = 0.0;
  }
  out.objective = 0.0;
  for (int i = 0; i < n; ++i) out.objective += p.objective[i] * out.x[i];
  out.status = LpStatus::optimal;
  out.iterations = pivots;
  return out;
}

}  // namespace detail

inline LpSolution solve_lp(const LinearProgram& p) {
  return detail::simplex(p, p.lower, p.upper);
}

inline LpSolution solve_binary_ilp(const LinearProgram& p,
                                   long node_budget = 1000000) {
  std::vector<int> bins;
  for (int i = 0; i < p.num_vars(); ++i)
    if (p.binary[i]) {
      if (p.lower[i] < -kLpFeasTol || p.upper[i] > 1.0 + kLpFeasTol)
        throw Error(ErrorKind::precondition,
                    "binary variable '" + p.names[i] + "' must have bounds within [0,1]");
      bins.push_back(i);
    }
  if (bins.empty()) return solve_lp(p);

  struct Node {
    std::vector<double> lo, up;
  };
  std::vector<Node> stack{{p.lower, p.upper}};
  LpSolution best;
  bool have_best = false;
  long nodes = 0;
  long pivots = 0;
  bool out_of_budget = false;
  const double sense = p.maximize ? 1.0 : -1.0;

  while (!stack.empty()) {
    if (nodes >= node_budget) {
      out_of_budget = true;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    ++nodes;

    LpSolution relax = detail::simplex(p, node.lo, node.up);
    pivots += relax.iterations;
    if (relax.status == LpStatus::unbounded) {
      // binaries are boxed, so only continuous vars can be unbounded
      LpSolution out;
      out.status = LpStatus::unbounded;
      out.nodes = nodes;
      out.iterations = pivots;
      return out;
    }
    if (relax.status != LpStatus::optimal) continue;
    if (have_best &&
        sense * relax.objective <= sense * best.objective + kLpFeasTol)
      continue;  // bound: relaxation cannot beat the incumbent

    // most-fractional binary, ties by variable order
    int branch = -1;
    double closest = kLpInf;
    for (int i : bins) {
      double f = std::abs(relax.x[i] - 0.5);
      if (f > 0.5 - kLpOptTol) continue;  // integral within tolerance
      if (f < closest - 1e-15) {
        closest = f;
        branch = i;
      }
    }

    if (branch == -1) {
      // integral leaf: pin binaries to their rounded values and re-solve so
      // continuous variables are exact
      Node leaf = node;
      for (int i : bins) {
        double v = std::round(relax.x[i]);
        leaf.lo[i] = v;
        leaf.up[i] = v;
      }
      LpSolution exact = detail::simplex(p, leaf.lo, leaf.up);
      pivots += exact.iterations;
      if (exact.status != LpStatus::optimal) continue;
      if (!have_best ||
          sense * exact.objective > sense * best.objective + 1e-12) {
        best = exact;
        have_best = true;
      }
      continue;
    }

    Node zero = node, one = node;
    zero.up[branch] = 0.0;
    one.lo[branch] = 1.0;
    // explore the child closer to the fractional value first (stack = LIFO)
    if (relax.x[branch] >= 0.5) {
      stack.push_back(std::move(zero));
      stack.push_back(std::move(one));
    } else {
      stack.push_back(std::move(one));
      stack.push_back(std::move(zero));
    }
  }

  LpSolution out;
  if (have_best) {
    out = best;
    out.status = out_of_budget ? LpStatus::budget_exceeded : LpStatus::optimal;
  } else {
    out.status = out_of_budget ? LpStatus::budget_exceeded : LpStatus::infeasible;
  }
  out.nodes = nodes;
  out.iterations = pivots;
  return out;
}

// Human-readable LP-format dump for debugging; not a stability contract.
inline std::string to_lp_string(const LinearProgram& p) {
  std::ostringstream os;
  os.precision(12);
  auto expr = [&](const std::vector<LinearProgram::Term>& terms) {
    bool first = true;
    for (const auto& term : terms) {
      double c = term.coef;
      if (c == 0.0) continue;
      if (first) {
        if (c < 0) os << "- ";
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      c = std::abs(c);
      if (c != 1.0) os << c << " ";
      os << p.names[term.var];
      first = false;
    }
    if (first) os << "0";
  };
  os << (p.maximize ? "Maximize" : "Minimize") << "\n obj: ";
  std::vector<LinearProgram::Term> obj;
  for (int i = 0; i < p.num_vars(); ++i)
    if (p.objective[i] != 0.0) obj.push_back({i, p.objective[i]});
  expr(obj);
  os << "\nSubject To\n";
  for (size_t r = 0; r < p.rows.size(); ++r) {
    os << " c" << r << ": ";
    expr(p.rows[r].terms);
    os << (p.rows[r].rel == '<' ? " <= " : p.rows[r].rel == '>' ? " >= " : " = ")
       << p.rows[r].rhs << "\n";
  }
  os << "Bounds\n";
  for (int i = 0; i < p.num_vars(); ++i) {
    if (p.binary[i]) continue;
    if (p.lower[i] == -kLpInf && p.upper[i] == kLpInf)
      os << " " << p.names[i] << " free\n";
    else if (p.upper[i] == kLpInf)
      os << " " << p.names[i] << " >= " << p.lower[i] << "\n";
    else if (p.lower[i] == -kLpInf)
      os << " " << p.names[i] << " <= " << p.upper[i] << "\n";
    else
      os << " " << p.lower[i] << " <= " << p.names[i] << " <= " << p.upper[i]
         << "\n";
  }
  bool any_bin = false;
  for (int i = 0; i < p.num_vars(); ++i) any_bin |= p.binary[i] != 0;
  if (any_bin) {
    os << "Binary\n";
    for (int i = 0; i < p.num_vars(); ++i)
      if (p.binary[i]) os << " " << p.names[i] << "\n";
  }
  os << "End\n";
  return os.str();
}

}  // namespace telab
