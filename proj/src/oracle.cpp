#include "minnorm/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "minnorm/errors.hpp"
#include "minnorm/lp.hpp"

namespace minnorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int side_of(double v, double delta) {
  if (std::fabs(v - delta) <= 1e-12 * (1.0 + std::fabs(delta))) return 0;
  return v > delta ? 1 : -1;
}

std::size_t first_nonneg(const Dataset& d) {
  std::size_t i = 0;
  while (i < d.size() && d.x(i) < 0.0) ++i;
  return i;
}

double box_objective(const Dataset& d, const std::vector<double>& s) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    const double delta = d.slope(k);
    total += std::hypot(d.x(k + 1) * (s[k + 1] - delta) - d.x(k) * (s[k] - delta), s[k + 1] - s[k]);
  }
  return total;
}

}  // namespace

OracleResult box_convex_solve(const Dataset& d, const OracleConfig& cfg) {
  const std::size_t n = d.size();
  if (n < 3) throw InputError("box oracle needs at least three points");
  const std::size_t i0 = first_nonneg(d);

  std::vector<double> lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = d.box_lo(i);
    hi[i] = d.box_hi(i);
  }
  // Pins: where both boxes adjacent to segment k lie on one side of its slope
  // (or one box is flat), the constraint closure forces a slope onto delta_k.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double delta = d.slope(k);
    const double left_end = k == 0 ? delta : d.slope(k - 1);
    const double right_end = k + 2 >= n ? delta : d.slope(k + 1);
    const int a = side_of(left_end, delta);
    const int b = side_of(right_end, delta);
    if (!(a == 0 || b == 0 || a == b)) continue;
    const bool right_rule = k >= i0;
    const bool left_rule = k + 1 < i0;
    if (right_rule || !left_rule) lo[k + 1] = hi[k + 1] = delta;
    if (left_rule || !right_rule) lo[k] = hi[k] = delta;
  }

  // Operator rows per segment: u = x_{k+1} s_{k+1} - x_k s_k - c_k, v = s_{k+1} - s_k.
  const std::size_t m = n - 1;
  std::vector<double> c(m), sigma(m), tau(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    c[k] = d.slope(k) * (d.x(k + 1) - d.x(k));
    sigma[k] = 1.0 / std::max(std::fabs(d.x(k)) + std::fabs(d.x(k + 1)), 2.0);
    tau[k] += std::fabs(d.x(k)) + 1.0;
    tau[k + 1] += std::fabs(d.x(k + 1)) + 1.0;
  }
  for (double& t : tau) t = 1.0 / t;

  std::vector<double> s(n), s_bar(n), yu(m, 0.0), yv(m, 0.0), grad(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = 0.5 * (lo[i] + hi[i]);
  s_bar = s;

  OracleResult res;
  res.slopes = s;
  double best_primal = box_objective(d, s);
  double best_dual = -kInf;
  res.converged = false;
  std::size_t it = 0;
  for (; it < cfg.max_iters; ++it) {
    for (std::size_t k = 0; k < m; ++k) {
      double u = yu[k] + sigma[k] * (d.x(k + 1) * s_bar[k + 1] - d.x(k) * s_bar[k] - c[k]);
      double v = yv[k] + sigma[k] * (s_bar[k + 1] - s_bar[k]);
      const double norm = std::hypot(u, v);
      if (norm > 1.0) {
        u /= norm;
        v /= norm;
      }
      yu[k] = u;
      yv[k] = v;
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      grad[k] -= d.x(k) * yu[k] + yv[k];
      grad[k + 1] += d.x(k + 1) * yu[k] + yv[k];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double next = std::clamp(s[i] - tau[i] * grad[i], lo[i], hi[i]);
      s_bar[i] = 2.0 * next - s[i];
      s[i] = next;
    }
    if (it % 64 == 0 || it + 1 == cfg.max_iters) {
      const double primal = box_objective(d, s);
      if (primal < best_primal) {
        best_primal = primal;
        res.slopes = s;
      }
      // Dual bound: -<y, c> + min over the box of <K^T y, s>.
      double dual = 0.0;
      for (std::size_t k = 0; k < m; ++k) dual -= yu[k] * c[k];
      for (std::size_t i = 0; i < n; ++i) dual += std::min(lo[i] * grad[i], hi[i] * grad[i]);
      best_dual = std::max(best_dual, dual);
      if (best_primal - best_dual <= cfg.gap_tol * (1.0 + best_primal)) {
        res.converged = true;
        break;
      }
    }
  }
  res.iterations = it;
  res.cost = best_primal;
  res.gap = best_primal - best_dual;
  return res;
}

OracleResult fine_grid_solve(const Dataset& d, std::size_t resolution) {
  const std::size_t n = d.size();
  if (n > 12) throw InputError("fine grid oracle is limited to 12 points");
  if (resolution < 2) throw InputError("resolution must be at least 2");
  OracleResult res;
  if (n <= 2) {
    res.slopes.assign(n, n == 2 ? d.slope(0) : 0.0);
    return res;
  }
  const std::size_t i0 = first_nonneg(d);
  std::vector<std::vector<double>> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = d.box_lo(i), hi = d.box_hi(i);
    if (side_of(hi, lo) == 0) {
      grid[i] = {lo};
      continue;
    }
    for (std::size_t j = 0; j < resolution; ++j)
      grid[i].push_back(j + 1 == resolution ? hi : lo + (hi - lo) * double(j) / double(resolution - 1));
  }
  auto feasible = [&](std::size_t k, double sc, double sn) {
    const double delta = d.slope(k);
    const int a = side_of(sc, delta), b = side_of(sn, delta);
    if (k >= i0) return a == 0 ? b == 0 : (b == 0 || b == -a);
    if (k + 1 < i0) return b == 0 ? a == 0 : (a == 0 || a == -b);
    return (a == 0 && b == 0) || (a != 0 && b == -a);
  };
  auto g = [&](std::size_t k, double sc, double sn) {
    const double delta = d.slope(k);
    return std::hypot(d.x(k + 1) * (sn - delta) - d.x(k) * (sc - delta), sn - sc);
  };

  std::vector<std::vector<double>> val(n);
  std::vector<std::vector<std::size_t>> arg(n);
  for (std::size_t i = 0; i < n; ++i) {
    val[i].assign(grid[i].size(), 0.0);
    arg[i].assign(grid[i].size(), 0);
  }
  for (std::size_t i = n - 1; i-- > i0;) {
    for (std::size_t j = 0; j < grid[i].size(); ++j) {
      double best = kInf;
      for (std::size_t q = 0; q < grid[i + 1].size(); ++q) {
        if (!feasible(i, grid[i][j], grid[i + 1][q])) continue;
        const double v = g(i, grid[i][j], grid[i + 1][q]) + val[i + 1][q];
        if (v < best) {
          best = v;
          arg[i][j] = q;
        }
      }
      val[i][j] = best;
    }
  }
  for (std::size_t i = 1; i < std::min(i0, n); ++i) {
    for (std::size_t j = 0; j < grid[i].size(); ++j) {
      double best = kInf;
      for (std::size_t q = 0; q < grid[i - 1].size(); ++q) {
        if (!feasible(i - 1, grid[i - 1][q], grid[i][j])) continue;
        const double v = g(i - 1, grid[i - 1][q], grid[i][j]) + val[i - 1][q];
        if (v < best) {
          best = v;
          arg[i][j] = q;
        }
      }
      val[i][j] = best;
    }
  }
  std::vector<std::size_t> idx(n, 0);
  double best = kInf;
  if (i0 == 0 || i0 >= n) {
    const std::size_t root = i0 == 0 ? 0 : n - 1;
    for (std::size_t j = 0; j < grid[root].size(); ++j) {
      if (val[root][j] < best) {
        best = val[root][j];
        idx[root] = j;
      }
    }
  } else {
    const std::size_t k = i0 - 1;
    for (std::size_t j = 0; j < grid[k].size(); ++j) {
      for (std::size_t q = 0; q < grid[k + 1].size(); ++q) {
        if (!feasible(k, grid[k][j], grid[k + 1][q])) continue;
        const double v = g(k, grid[k][j], grid[k + 1][q]) + val[k][j] + val[k + 1][q];
        if (v < best) {
          best = v;
          idx[k] = j;
          idx[k + 1] = q;
        }
      }
    }
  }
  if (!std::isfinite(best)) throw ConvergenceError("fine grid has no feasible slope sequence");
  for (std::size_t i = std::min(i0, n); i + 1 < n; ++i) idx[i + 1] = arg[i][idx[i]];
  for (std::size_t i = std::min(i0, n); i-- > 1;) idx[i - 1] = arg[i][idx[i]];
  res.cost = best;
  res.slopes.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.slopes[i] = grid[i][idx[i]];
  return res;
}

namespace {

std::vector<double> kink_candidates(const Dataset& d, std::size_t subgrid, bool line_intersections) {
  const std::size_t n = d.size();
  const double lo = d.x(0), hi = d.x(n - 1);
  std::vector<double> c;
  for (std::size_t i = 1; i + 1 < n; ++i) c.push_back(d.x(i));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = d.x(i), b = d.x(i + 1);
    c.push_back(0.5 * (a + b));
    for (std::size_t j = 1; j <= subgrid; ++j) c.push_back(a + (b - a) * double(j) / double(subgrid + 1));
  }
  if (line_intersections) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q + 1 < n; ++q) {
        const double sp = d.slope(p), sq = d.slope(q);
        if (side_of(sp, sq) == 0) continue;
        // y_p + sp (t - x_p) = y_q + sq (t - x_q)
        const double t = (d.y(q) - sq * d.x(q) - d.y(p) + sp * d.x(p)) / (sp - sq);
        if (t > lo && t < hi) c.push_back(t);
      }
    }
  }
  std::sort(c.begin(), c.end());
  std::vector<double> out;
  for (double t : c) {
    if (!(t > lo && t < hi)) continue;
    if (!out.empty() && std::fabs(t - out.back()) <= 1e-12 * (1.0 + std::fabs(t))) continue;
    out.push_back(t);
  }
  return out;
}

// Depth-first search over increasing kink tuples.  fits(kinks, count) tells
// whether the first `count` data points can be matched with those kinks;
// since points right of the next kink position are unaffected by it, a prefix
// that fails for one candidate fails for every later one.
bool search(const Dataset& d, const std::vector<double>& cand, std::size_t k, std::vector<double>& chosen,
            std::size_t start, const std::function<bool(const std::vector<double>&, std::size_t)>& fits) {
  if (chosen.size() == k) return fits(chosen, d.size());
  for (std::size_t c = start; c < cand.size(); ++c) {
    std::size_t covered = 0;
    while (covered < d.size() && d.x(covered) <= cand[c]) ++covered;
    if (!fits(chosen, covered)) break;
    chosen.push_back(cand[c]);
    if (search(d, cand, k, chosen, c + 1, fits)) return true;
    chosen.pop_back();
  }
  return false;
}

KinkSearchResult run_search(const Dataset& d, const OracleConfig& cfg, bool intersections,
                            const std::function<bool(const std::vector<double>&, std::size_t)>& fits) {
  if (d.size() > 8) throw InputError("brute-force search is limited to 8 points");
  const std::vector<double> cand = kink_candidates(d, cfg.subgrid, intersections);
  for (std::size_t k = 0; k <= cfg.k_max; ++k) {
    std::vector<double> chosen;
    if (search(d, cand, k, chosen, 0, fits)) return {k, false};
  }
  return {cfg.k_max + 1, true};
}

double feature(double x, const std::vector<double>& kinks, std::size_t col) {
  if (col == 0) return x;
  if (col == 1) return 1.0;
  return std::max(0.0, x - kinks[col - 2]);
}

}  // namespace

KinkSearchResult brute_force_min_kinks(const Dataset& d, const OracleConfig& cfg) {
  const double threshold = 1e-7 * (1.0 + d.max_abs_y());
  auto fits = [&](const std::vector<double>& kinks, std::size_t count) {
    const std::size_t cols = kinks.size() + 2;
    if (count <= 2) return true;
    Eigen::MatrixXd A(count, cols);
    Eigen::VectorXd y(count);
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < cols; ++j) A(i, j) = feature(d.x(i), kinks, j);
      y(i) = d.y(i);
    }
    const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(y);
    return (A * sol - y).cwiseAbs().maxCoeff() <= threshold;
  };
  return run_search(d, cfg, true, fits);
}

KinkSearchResult brute_force_margin_min_kinks(const Dataset& d, const OracleConfig& cfg) {
  for (const auto& p : d.points())
    if (p.y != 1.0 && p.y != -1.0) throw InputError("labels must be -1 or +1");
  auto fits = [&](const std::vector<double>& kinks, std::size_t count) {
    if (count == 0) return true;
    // Phase-1 program: minimise total violation with split free coefficients.
    const std::size_t cols = kinks.size() + 2;
    LinearProgram lp;
    lp.num_vars = 2 * cols + count;
    lp.objective.assign(lp.num_vars, 0.0);
    for (std::size_t i = 0; i < count; ++i) lp.objective[2 * cols + i] = 1.0;
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<double> row(lp.num_vars, 0.0);
      for (std::size_t j = 0; j < cols; ++j) {
        const double v = d.y(i) * feature(d.x(i), kinks, j);
        row[2 * j] = v;
        row[2 * j + 1] = -v;
      }
      row[2 * cols + i] = 1.0;
      lp.add_row(std::move(row), Relation::GreaterEq, 1.0);
    }
    const LpResult r = solve_lp(lp);
    return r.status == LpStatus::Optimal && r.objective <= 1e-7;
  };
  return run_search(d, cfg, false, fits);
}

}  // namespace minnorm
