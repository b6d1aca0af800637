#include "minnorm/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minnorm/errors.hpp"

namespace minnorm {

void LinearProgram::add_row(std::vector<double> coeffs, Relation r, double b) {
  if (coeffs.size() != num_vars) throw InputError("row length differs from the number of variables");
  rows.push_back(std::move(coeffs));
  rel.push_back(r);
  rhs.push_back(b);
}

namespace {

struct Tableau {
  std::size_t m = 0, cols = 0;  // cols excludes the rhs column
  std::vector<std::vector<double>> t;  // m constraint rows, then the cost row
  std::vector<std::size_t> basis;

  double& rhs(std::size_t r) { return t[r][cols]; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = t[r][c];
    for (double& v : t[r]) v /= p;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r) continue;
      const double f = t[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = c;
  }

  // Minimises the cost row restricted to columns allowed[c].
  LpStatus run(const std::vector<bool>& allowed, double eps, std::size_t max_iter) {
    for (std::size_t it = 0; it < max_iter; ++it) {
      std::size_t enter = cols;
      for (std::size_t c = 0; c < cols; ++c) {
        if (allowed[c] && t[m][c] < -eps) {
          enter = c;
          break;
        }
      }
      if (enter == cols) return LpStatus::Optimal;
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m; ++r) {
        if (t[r][enter] > eps) {
          const double ratio = t[r][cols] / t[r][enter];
          if (ratio < best - eps || (ratio <= best + eps && leave < m && basis[r] < basis[leave])) {
            best = ratio;
            leave = r;
          }
        }
      }
      if (leave == m) return LpStatus::Unbounded;
      pivot(leave, enter);
    }
    return LpStatus::IterationLimit;
  }
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, double eps) {
  const std::size_t n = lp.num_vars;
  const std::size_t m = lp.rows.size();
  if (lp.objective.size() != n) throw InputError("objective length differs from the number of variables");

  std::vector<std::vector<double>> rows = lp.rows;
  std::vector<Relation> rel = lp.rel;
  std::vector<double> rhs = lp.rhs;
  for (std::size_t r = 0; r < m; ++r) {
    if (rhs[r] < 0.0) {
      for (double& v : rows[r]) v = -v;
      rhs[r] = -rhs[r];
      if (rel[r] == Relation::LessEq) {
        rel[r] = Relation::GreaterEq;
      } else if (rel[r] == Relation::GreaterEq) {
        rel[r] = Relation::LessEq;
      }
    }
  }

  std::size_t slack = 0, artificial = 0;
  for (auto r : rel) {
    if (r != Relation::Equal) ++slack;
    if (r != Relation::LessEq) ++artificial;
  }
  Tableau tb;
  tb.m = m;
  tb.cols = n + slack + artificial;
  tb.t.assign(m + 1, std::vector<double>(tb.cols + 1, 0.0));
  tb.basis.assign(m, 0);
  std::vector<bool> is_artificial(tb.cols, false);
  std::size_t next_slack = n, next_art = n + slack;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < n; ++j) tb.t[r][j] = rows[r][j];
    tb.rhs(r) = rhs[r];
    if (rel[r] == Relation::LessEq) {
      tb.t[r][next_slack] = 1.0;
      tb.basis[r] = next_slack++;
    } else {
      if (rel[r] == Relation::GreaterEq) tb.t[r][next_slack++] = -1.0;
      tb.t[r][next_art] = 1.0;
      is_artificial[next_art] = true;
      tb.basis[r] = next_art++;
    }
  }

  const std::size_t max_iter = 50 * (tb.cols + m + 10);
  LpResult res;
  if (artificial > 0) {
    // Phase 1 cost row: sum of artificials, reduced against the basis.
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_artificial[tb.basis[r]]) continue;
      for (std::size_t j = 0; j <= tb.cols; ++j) tb.t[m][j] -= tb.t[r][j];
    }
    for (std::size_t j = 0; j < tb.cols; ++j)
      if (is_artificial[j]) tb.t[m][j] = 0.0;
    std::vector<bool> all(tb.cols, true);
    const LpStatus st = tb.run(all, eps, max_iter);
    if (st == LpStatus::IterationLimit) {
      res.status = st;
      return res;
    }
    double scale = 1.0;
    for (double b : rhs) scale = std::max(scale, std::fabs(b));
    if (-tb.t[m][tb.cols] > 1e-9 * scale) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    // Drive remaining artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_artificial[tb.basis[r]]) continue;
      for (std::size_t j = 0; j < tb.cols; ++j) {
        if (!is_artificial[j] && std::fabs(tb.t[r][j]) > 1e-9) {
          tb.pivot(r, j);
          break;
        }
      }
    }
  }

  std::fill(tb.t[m].begin(), tb.t[m].end(), 0.0);
  for (std::size_t j = 0; j < n; ++j) tb.t[m][j] = lp.objective[j];
  for (std::size_t r = 0; r < m; ++r) {
    const double c = tb.t[m][tb.basis[r]];
    if (c == 0.0) continue;
    for (std::size_t j = 0; j <= tb.cols; ++j) tb.t[m][j] -= c * tb.t[r][j];
  }
  std::vector<bool> allowed(tb.cols);
  for (std::size_t j = 0; j < tb.cols; ++j) allowed[j] = !is_artificial[j];
  const LpStatus st = tb.run(allowed, eps, max_iter);
  res.status = st;
  if (st != LpStatus::Optimal) return res;
  res.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (tb.basis[r] < n) res.x[tb.basis[r]] = tb.rhs(r);
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += lp.objective[j] * res.x[j];
  return res;
}

}  // namespace minnorm
