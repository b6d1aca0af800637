#include "minnorm/dp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "minnorm/cost.hpp"
#include "minnorm/errors.hpp"

namespace minnorm {

void DPConfig::validate() const {
  if (grid_points < 3) throw InputError("grid_points must be at least 3");
  if (!(refine_shrink > 0.0 && refine_shrink < 1.0)) throw InputError("refine_shrink must lie in (0, 1)");
  if (!(tol >= 0.0)) throw InputError("tol must be nonnegative");
}

double neuron_cost_g(const Dataset& d, std::size_t k, double s_next, double s_cur) {
  if (k + 1 >= d.size()) {
    std::ostringstream msg;
    msg << "segment index " << k << " out of range for " << d.size() << " points";
    throw InputError(msg.str());
  }
  const double delta = d.slope(k);
  const double u = d.x(k + 1) * (s_next - delta) - d.x(k) * (s_cur - delta);
  return std::hypot(u, s_next - s_cur);
}

double slope_cost(const Dataset& d, std::span<const double> s) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) total += neuron_cost_g(d, k, s[k + 1], s[k]);
  return total;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  std::size_t threads = 0;
  if (const char* env = std::getenv("MINNORM1D_THREADS")) threads = std::strtoul(env, nullptr, 10);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smaller value wins; near-ties go to the higher priority.
struct Best {
  double value = kInf;
  int priority = -1;
  std::size_t index = ValueFunctionSamples::npos;

  void offer(double v, int prio, std::size_t idx) {
    const double eps = 1e-12 * (1.0 + std::fabs(value));
    if (v < value - eps || (v <= value + eps && prio > priority)) {
      value = v;
      priority = prio;
      index = idx;
    }
  }
};

std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(count - 1);
    g[j] = lo + t * (hi - lo);
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

void sort_unique(std::vector<double>& g) {
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
}

struct Boxes {
  std::vector<double> lo, hi;
};

Boxes slope_boxes(const Dataset& d, const Tolerance& tol) {
  Boxes b;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double lo = d.box_lo(i);
    double hi = d.box_hi(i);
    if (tol.equal(lo, hi)) hi = lo;
    b.lo.push_back(lo);
    b.hi.push_back(hi);
  }
  return b;
}

std::vector<std::vector<double>> initial_grids(const Boxes& b, std::size_t points) {
  std::vector<std::vector<double>> grids;
  for (std::size_t i = 0; i < b.lo.size(); ++i) {
    if (b.lo[i] == b.hi[i]) {
      grids.push_back({b.lo[i]});
    } else {
      grids.push_back(uniform_grid(b.lo[i], b.hi[i], points));
    }
  }
  return grids;
}

// Fills value functions for both chains on fixed grids.
ValueFunctionSamples fill_values(const Dataset& d, std::vector<std::vector<double>> grids,
                                 const Tolerance& tol) {
  const std::size_t n = d.size();
  const std::size_t i0 = d.first_nonnegative();
  ValueFunctionSamples vf;
  vf.value.resize(n);
  vf.pointer.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    vf.value[i].assign(grids[i].size(), 0.0);
    vf.pointer[i].assign(grids[i].size(), ValueFunctionSamples::npos);
  }
  vf.grid = std::move(grids);
  const auto& G = vf.grid;

  // Right chain: successor s_{i+1} for each s_i.
  for (std::size_t i = n - 1; i-- > i0;) {
    const double delta = d.slope(i);
    parallel_for(G[i].size(), [&](std::size_t j) {
      const double sc = G[i][j];
      Best best;
      for (std::size_t m = 0; m < G[i + 1].size(); ++m) {
        const double sn = G[i + 1][m];
        if (!segment_admissible(d, i, sc, sn, tol)) continue;
        const int prio = 2 * tol.equal(sn, delta) + tol.equal(sn, sc);
        best.offer(neuron_cost_g(d, i, sn, sc) + vf.value[i + 1][m], prio, m);
      }
      vf.value[i][j] = best.value;
      vf.pointer[i][j] = best.index;
    });
  }
  // Left chain: predecessor s_{i-1} for each s_i.
  for (std::size_t i = 1; i < i0 && i < n; ++i) {
    const double delta = d.slope(i - 1);
    parallel_for(G[i].size(), [&](std::size_t j) {
      const double sn = G[i][j];
      Best best;
      for (std::size_t m = 0; m < G[i - 1].size(); ++m) {
        const double sc = G[i - 1][m];
        if (!segment_admissible(d, i - 1, sc, sn, tol)) continue;
        const int prio = 2 * tol.equal(sc, delta) + tol.equal(sn, sc);
        best.offer(neuron_cost_g(d, i - 1, sn, sc) + vf.value[i - 1][m], prio, m);
      }
      vf.value[i][j] = best.value;
      vf.pointer[i][j] = best.index;
    });
  }
  return vf;
}

struct GridSolution {
  double cost = kInf;
  SlopeSequence slopes;
};

GridSolution solve_on_grids(const Dataset& d, std::vector<std::vector<double>> grids,
                            const Tolerance& tol) {
  const std::size_t n = d.size();
  const std::size_t i0 = d.first_nonnegative();
  const ValueFunctionSamples vf = fill_values(d, std::move(grids), tol);
  const auto& G = vf.grid;
  std::vector<std::size_t> idx(n, ValueFunctionSamples::npos);
  GridSolution out;

  if (i0 == 0 || i0 == n) {
    const std::size_t root = i0 == 0 ? 0 : n - 1;
    Best best;
    for (std::size_t j = 0; j < G[root].size(); ++j) best.offer(vf.value[root][j], 0, j);
    out.cost = best.value;
    idx[root] = best.index;
  } else {
    const std::size_t k = i0 - 1;
    const double delta = d.slope(k);
    const std::size_t cols = G[k + 1].size();
    Best best;
    for (std::size_t j = 0; j < G[k].size(); ++j) {
      const double sl = G[k][j];
      if (!std::isfinite(vf.value[k][j])) continue;
      for (std::size_t m = 0; m < cols; ++m) {
        const double sr = G[k + 1][m];
        if (!segment_admissible(d, k, sl, sr, tol)) continue;
        const double v = neuron_cost_g(d, k, sr, sl) + vf.value[k][j] + vf.value[k + 1][m];
        const int prio = tol.equal(sl, delta) && tol.equal(sr, delta) ? 1 : 0;
        best.offer(v, prio, j * cols + m);
      }
    }
    out.cost = best.value;
    if (best.index != ValueFunctionSamples::npos) {
      idx[k] = best.index / cols;
      idx[k + 1] = best.index % cols;
    }
  }
  if (!std::isfinite(out.cost)) throw ConvergenceError("no feasible slope sequence on the grid");

  const std::size_t start_right = i0 == n ? n : i0;
  for (std::size_t i = start_right; i + 1 < n; ++i) idx[i + 1] = vf.pointer[i][idx[i]];
  const std::size_t start_left = i0 == 0 ? 0 : std::min(i0, n) - 1;
  for (std::size_t i = start_left; i >= 1; --i) idx[i - 1] = vf.pointer[i][idx[i]];

  out.slopes.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.slopes[i] = G[i][idx[i]];
  return out;
}

// Closed interval containing every s_i admissible with the current neighbours.
std::pair<double, double> coordinate_range(const Dataset& d, const Boxes& b, std::span<const double> s,
                                           std::size_t i, const Tolerance& tol) {
  double lo = b.lo[i];
  double hi = b.hi[i];
  const std::size_t i0 = d.first_nonnegative();
  auto side = [&](double v, double delta) { return tol.equal(v, delta) ? 0 : (v > delta ? 1 : -1); };
  auto apply = [&](int constraint, double delta) {
    // constraint: -1 means s_i <= delta, +1 means s_i >= delta, 2 means s_i == delta.
    if (constraint == 2) {
      lo = std::max(lo, delta);
      hi = std::min(hi, delta);
    } else if (constraint == -1) {
      hi = std::min(hi, delta);
    } else if (constraint == 1) {
      lo = std::max(lo, delta);
    }
  };
  if (i >= 1) {
    const std::size_t k = i - 1;
    const double delta = d.slope(k);
    const int c = side(s[i - 1], delta);
    if (k >= i0) {
      apply(c == 0 ? 2 : -c, delta);
    } else if (k + 1 < i0) {
      if (c != 0) apply(-c, delta);
    } else {
      apply(c == 0 ? 2 : -c, delta);
    }
  }
  if (i + 1 < d.size()) {
    const std::size_t k = i;
    const double delta = d.slope(k);
    const int c = side(s[i + 1], delta);
    if (k >= i0) {
      if (c != 0) apply(-c, delta);
    } else {
      apply(c == 0 ? 2 : -c, delta);
    }
  }
  return {lo, hi};
}

double local_cost(const Dataset& d, std::span<const double> s, std::size_t i, double v) {
  double total = 0.0;
  if (i >= 1) total += neuron_cost_g(d, i - 1, v, s[i - 1]);
  if (i + 1 < d.size()) total += neuron_cost_g(d, i, s[i + 1], v);
  return total;
}

void polish(const Dataset& d, const Boxes& b, SlopeSequence& s, std::size_t sweeps, const Tolerance& tol) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto [lo, hi] = coordinate_range(d, b, s, i, tol);
      if (!(hi > lo)) continue;
      auto f = [&](double v) { return local_cost(d, s, i, v); };
      double a = lo, c = hi;
      double x1 = c - phi * (c - a), x2 = a + phi * (c - a);
      double f1 = f(x1), f2 = f(x2);
      for (int it = 0; it < 200 && c - a > 1e-15 * (1.0 + std::fabs(a)); ++it) {
        if (f1 <= f2) {
          c = x2;
          x2 = x1;
          f2 = f1;
          x1 = c - phi * (c - a);
          f1 = f(x1);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + phi * (c - a);
          f2 = f(x2);
        }
      }
      const double current = s[i];
      double best_v = current;
      double best_f = f(current);
      for (double cand : {0.5 * (a + c), lo, hi}) {
        const double fc = f(cand);
        if (fc >= best_f - 1e-15 * (1.0 + best_f)) continue;
        s[i] = cand;
        const bool ok = (i == 0 || segment_admissible(d, i - 1, s[i - 1], s[i], tol)) &&
                        (i + 1 == s.size() || segment_admissible(d, i, s[i], s[i + 1], tol));
        s[i] = current;
        if (ok) {
          best_v = cand;
          best_f = fc;
        }
      }
      s[i] = best_v;
    }
  }
}

Tolerance tolerance_of(const DPConfig& cfg) { return {cfg.tol, cfg.tol}; }

}  // namespace

ValueFunctionSamples value_function_samples(const Dataset& d, const DPConfig& cfg) {
  cfg.validate();
  if (d.size() < 3) throw InputError("value functions need at least three points");
  const Tolerance tol = tolerance_of(cfg);
  return fill_values(d, initial_grids(slope_boxes(d, tol), cfg.grid_points), tol);
}

Solution solve_min_norm(const Dataset& d, const DPConfig& cfg) {
  cfg.validate();
  const std::size_t n = d.size();
  const Tolerance tol = tolerance_of(cfg);
  Solution sol;
  if (n == 1) {
    sol.f = PiecewiseLinearFn(0.0, d.y(0), {});
    sol.slopes = {0.0};
    sol.cost_trace = {0.0};
    return sol;
  }
  if (n == 2) {
    sol.slopes = {d.slope(0), d.slope(0)};
    sol.f = from_slopes(d, sol.slopes, tol);
    sol.cost_trace = {0.0};
    return sol;
  }

  const Boxes boxes = slope_boxes(d, tol);
  GridSolution inc = solve_on_grids(d, initial_grids(boxes, cfg.grid_points), tol);
  sol.cost_trace.push_back(inc.cost);

  std::vector<double> width(n);
  for (std::size_t i = 0; i < n; ++i) width[i] = boxes.hi[i] - boxes.lo[i];
  for (std::size_t round = 0; round < cfg.refine_rounds; ++round) {
    std::vector<std::vector<double>> grids(n);
    for (std::size_t i = 0; i < n; ++i) {
      width[i] *= cfg.refine_shrink;
      if (boxes.lo[i] == boxes.hi[i]) {
        grids[i] = {boxes.lo[i]};
        continue;
      }
      const double lo = std::max(boxes.lo[i], inc.slopes[i] - 0.5 * width[i]);
      const double hi = std::min(boxes.hi[i], inc.slopes[i] + 0.5 * width[i]);
      grids[i] = hi > lo ? uniform_grid(lo, hi, cfg.grid_points) : std::vector<double>{};
      grids[i].push_back(boxes.lo[i]);
      grids[i].push_back(boxes.hi[i]);
      grids[i].push_back(inc.slopes[i]);
      sort_unique(grids[i]);
    }
    GridSolution next = solve_on_grids(d, std::move(grids), tol);
    if (next.cost <= inc.cost) inc = std::move(next);
    sol.cost_trace.push_back(inc.cost);
  }

  SlopeSequence s = inc.slopes;
  polish(d, boxes, s, cfg.polish_sweeps, tol);
  if (is_admissible(d, s, tol) && slope_cost(d, s) <= inc.cost) inc.slopes = s;
  sol.cost_trace.push_back(slope_cost(d, inc.slopes));

  sol.slopes = std::move(inc.slopes);
  sol.f = from_slopes(d, sol.slopes, tol);
  sol.cost = weighted_tv_cost(sol.f);
  return sol;
}

}  // namespace minnorm
