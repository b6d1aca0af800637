#include "minnorm/classify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "minnorm/cost.hpp"
#include "minnorm/errors.hpp"
#include "minnorm/lp.hpp"

namespace minnorm {

void validate_labels(const Dataset& d) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.y(i) != 1.0 && d.y(i) != -1.0) throw InputError("labels must be -1 or +1 (point " + std::to_string(i) + ")");
  }
}

std::vector<LabelBlock> margin_partition(const Dataset& d) {
  validate_labels(d);
  std::vector<LabelBlock> blocks;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int label = d.y(i) > 0 ? 1 : -1;
    if (blocks.empty() || blocks.back().label != label) {
      blocks.push_back({i, i, label});
    } else {
      blocks.back().last = i;
    }
  }
  return blocks;
}

std::size_t margin_sparsest_count(const Dataset& d) {
  const std::size_t b = margin_partition(d).size();
  return b > 2 ? b - 2 : 0;
}

double margin_cost_at(const Dataset& d, const std::vector<double>& locations, double margin, PiecewiseLinearFn* f) {
  const std::size_t k = locations.size();
  const std::size_t cols = k + 2;
  LinearProgram lp;
  lp.num_vars = 2 * cols;
  lp.objective.assign(lp.num_vars, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    const double w = std::hypot(1.0, locations[j]);
    lp.objective[2 * (j + 2)] = w;
    lp.objective[2 * (j + 2) + 1] = w;
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::vector<double> row(lp.num_vars);
    for (std::size_t c = 0; c < cols; ++c) {
      const double feat = c == 0 ? d.x(i) : (c == 1 ? 1.0 : std::max(0.0, d.x(i) - locations[c - 2]));
      row[2 * c] = d.y(i) * feat;
      row[2 * c + 1] = -d.y(i) * feat;
    }
    lp.add_row(std::move(row), Relation::GreaterEq, margin);
  }
  const LpResult r = solve_lp(lp);
  if (r.status != LpStatus::Optimal) return std::numeric_limits<double>::infinity();
  if (f != nullptr) {
    std::vector<Kink> kinks;
    for (std::size_t j = 0; j < k; ++j) {
      const double a = r.x[2 * (j + 2)] - r.x[2 * (j + 2) + 1];
      if (a != 0.0) kinks.push_back({a, locations[j]});
    }
    *f = PiecewiseLinearFn(r.x[0] - r.x[1], r.x[2] - r.x[3], std::move(kinks));
  }
  return r.objective;
}

namespace {

double slack_of(const Dataset& d, const PiecewiseLinearFn& f, double margin) {
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.size(); ++i) s = std::min(s, d.y(i) * f(d.x(i)) - margin);
  return d.size() == 0 ? 0.0 : s;
}

}  // namespace

MarginSolution max_margin_solve(const Dataset& d, const MarginConfig& cfg) {
  const auto blocks = margin_partition(d);
  if (!(cfg.margin > 0.0)) throw InputError("margin must be positive");
  if (cfg.grid < 1) throw InputError("margin grid needs at least one point");
  MarginSolution sol;
  const double affine = margin_cost_at(d, {}, cfg.margin, &sol.f);
  if (std::isfinite(affine)) {
    sol.cost = 0.0;
    sol.min_slack = slack_of(d, sol.f, cfg.margin);
    return sol;
  }
  const std::size_t k = blocks.size() - 2;
  // Kink j serves interior block j+1; it lies strictly between the blocks around it.
  std::vector<double> lo(k), hi(k);
  for (std::size_t j = 0; j < k; ++j) {
    lo[j] = d.x(blocks[j].last);
    hi[j] = d.x(blocks[j + 2].first);
  }
  std::size_t per = cfg.grid;
  while (per > 1 && std::pow(double(per), double(k)) > double(cfg.max_tuples)) --per;

  std::vector<double> win_lo = lo, win_hi = hi;
  std::vector<double> best_loc;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t round = 0; round <= cfg.refine_rounds; ++round) {
    std::vector<std::vector<double>> cand(k);
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t t = 0; t < per; ++t) {
        const double v = win_lo[j] + (win_hi[j] - win_lo[j]) * double(t + 1) / double(per + 1);
        if (v > lo[j] && v < hi[j]) cand[j].push_back(v);
      }
      if (!best_loc.empty()) cand[j].push_back(best_loc[j]);
    }
    std::vector<double> loc(k);
    std::function<void(std::size_t)> rec = [&](std::size_t j) {
      if (j == k) {
        const double c = margin_cost_at(d, loc, cfg.margin);
        if (c < best) {
          best = c;
          best_loc = loc;
        }
        return;
      }
      for (double v : cand[j]) {
        if (j > 0 && !(v > loc[j - 1])) continue;
        loc[j] = v;
        rec(j + 1);
      }
    };
    rec(0);
    if (best_loc.empty()) throw ConvergenceError("no feasible kink placement for the margin problem");
    for (std::size_t j = 0; j < k; ++j) {
      const double w = (win_hi[j] - win_lo[j]) * cfg.refine_shrink;
      win_lo[j] = std::max(lo[j], best_loc[j] - 0.5 * w);
      win_hi[j] = std::min(hi[j], best_loc[j] + 0.5 * w);
    }
  }
  (void)margin_cost_at(d, best_loc, cfg.margin, &sol.f);
  sol.cost = weighted_tv_cost(sol.f);
  sol.min_slack = slack_of(d, sol.f, cfg.margin);
  return sol;
}

}  // namespace minnorm
