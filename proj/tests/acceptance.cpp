// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "minnorm/classify.hpp"
#include "minnorm/cost.hpp"
#include "minnorm/dp.hpp"
#include "minnorm/oracle.hpp"
#include "minnorm/partition.hpp"
#include "minnorm/recovery.hpp"
#include "minnorm/train.hpp"

using namespace minnorm;

namespace {

// Tolerances and budgets.
constexpr double kClosedFormCostTol = 1e-6;
constexpr double kClosedFormTauTol = 1e-4;
constexpr double kNetworkCostRelTol = 1e-10;
constexpr double kNoSkipTol = 1e-12;
constexpr double kOracleRelTol = 1e-4;
constexpr double kResolutionTol = 1e-4;
constexpr double kConvexityTol = 1e-8;
constexpr double kLipschitzSlack = 1e-6;
constexpr double kMarginSlackTol = 1e-9;

constexpr double kBudget1 = 1.0;
constexpr double kBudget2 = 1.0;
constexpr double kBudget4 = 120.0;
constexpr double kBudget5 = 300.0;
constexpr double kBudget6 = 300.0;
constexpr double kBudget8 = 120.0;
constexpr double kBudget9 = 900.0;

// Training protocol for the sparsity contrast.
constexpr std::size_t kTrainSteps = 1000000;
constexpr double kKinkTolFraction = 0.02;
constexpr double kKinkMergeGap = 0.0;

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Stopwatch {
 public:
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Dataset random_dataset(std::mt19937_64& rng, std::size_t n, double xlo, double xhi, double min_gap = 1e-2) {
  std::uniform_real_distribution<double> ux(xlo, xhi), uy(-1.0, 1.0);
  std::vector<double> x(n), y(n);
  for (;;) {
    for (auto& v : x) v = ux(rng);
    std::sort(x.begin(), x.end());
    bool ok = true;
    for (std::size_t i = 1; i < n; ++i) ok &= x[i] - x[i - 1] > min_gap;
    if (ok) break;
  }
  for (auto& v : y) v = uy(rng);
  return Dataset::from_xy(x, y);
}

double rel_diff(double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-12}); }

void closed_form() {
  Stopwatch sw;
  const Dataset d = Dataset::from_xy(std::vector<double>{-1, 0, 1}, std::vector<double>{0, 0, 1});
  const Solution s = solve_min_norm(d);
  const double t = sw.seconds();
  const bool one = s.f.kink_count() == 1;
  const double tau = one ? s.f.kinks()[0].location : NAN;
  const bool ok = std::fabs(s.cost - 1.0) <= kClosedFormCostTol && one && std::fabs(tau) <= kClosedFormTauTol &&
                  t < kBudget1;
  report(1, ok, fmt("cost=%.12f kinks=%zu tau=%.3g time=%.3fs", s.cost, s.f.kink_count(), tau, t));
}

void network_identity() {
  Stopwatch sw;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<std::pair<double, Kink>> neurons;
    double norm = 0.0;
    const int width = 1 + t % 10;
    for (int j = 0; j < width; ++j) {
      const double a = nd(rng), w = nd(rng), b = nd(rng);
      norm += std::fabs(a) * std::hypot(w, b);
      neurons.push_back({-b / w, {a * std::fabs(w), -b / w}});
    }
    std::sort(neurons.begin(), neurons.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    std::vector<Kink> kinks;
    for (const auto& n : neurons) kinks.push_back(n.second);
    worst = std::max(worst, rel_diff(weighted_tv_cost(PiecewiseLinearFn(0.0, 0.0, kinks)), norm));
  }
  const double t = sw.seconds();
  report(2, worst <= kNetworkCostRelTol && t < kBudget2, fmt("100 networks, worst rel error %.2e, time=%.3fs", worst, t));
}

void no_skip() {
  // One balanced neuron a = w = 1, b = 0 for (x)_+; sigma(x) - sigma(-x) for x.
  const double relu_net = 0.5 * (1.0 + 1.0 + 0.0);
  const double id_net = 0.5 * (1.0 + 1.0) + 0.5 * (1.0 + 1.0);
  const double relu = no_skip_cost(PiecewiseLinearFn(0, 0, {{1, 0}}));
  const double id = no_skip_cost(PiecewiseLinearFn(1, 0, {}));
  const bool ok = std::fabs(relu - 1.0) <= kNoSkipTol && std::fabs(id - 2.0) <= kNoSkipTol &&
                  std::fabs(relu - relu_net) <= kNoSkipTol && std::fabs(id - id_net) <= kNoSkipTol;
  report(3, ok, fmt("relu=%.15f identity=%.15f (networks %.1f, %.1f)", relu, id, relu_net, id_net));
}

void oracle_agreement() {
  Stopwatch sw;
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> un(3, 10);
  double worst_box = 0.0, worst_grid = 0.0, worst_res = 0.0;
  std::size_t unconverged = 0;
  for (int t = 0; t < 100; ++t) {
    const Dataset d = random_dataset(rng, un(rng), -2.0, 2.0);
    const Solution s = solve_min_norm(d);
    const OracleResult box = box_convex_solve(d);
    const OracleResult grid = fine_grid_solve(d, OracleConfig{}.fine_resolution);
    unconverged += box.converged ? 0 : 1;
    worst_box = std::max(worst_box, rel_diff(s.cost, box.cost));
    worst_grid = std::max(worst_grid, rel_diff(s.cost, grid.cost));

    DPConfig fine;
    fine.grid_points = 1023;
    const Solution s2 = solve_min_norm(d, fine);
    const double lo = d.x(0), hi = d.x(d.size() - 1);
    double diff = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double x = lo + (hi - lo) * k / 999.0;
      diff = std::max(diff, std::fabs(s.f(x) - s2.f(x)));
    }
    worst_res = std::max(worst_res, diff / (1.0 + d.max_abs_y()));
  }
  const double t = sw.seconds();
  const bool ok = worst_box <= kOracleRelTol && worst_grid <= kOracleRelTol && worst_res <= kResolutionTol && t < kBudget4;
  report(4, ok,
         fmt("100 datasets, dp-vs-box %.2e, dp-vs-grid %.2e, grid 512-vs-1023 %.2e, box unconverged %zu, time=%.1fs",
             worst_box, worst_grid, worst_res, unconverged, t));
}

void sparse_recovery() {
  Stopwatch sw;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> un(3, 10);
  int cases = 0, mismatches = 0, brute_cases = 0, brute_mismatches = 0;
  while (cases < 100) {
    const Dataset d = random_dataset(rng, un(rng), -2.0, 2.0);
    if (!check_assumption1(d)) continue;
    ++cases;
    const std::size_t sparse = sparsest_count(d);
    if (solve_min_norm(d).f.kink_count() != sparse) ++mismatches;
    if (d.size() <= 7) {
      ++brute_cases;
      if (brute_force_min_kinks(d).kinks != sparse) ++brute_mismatches;
    }
  }
  const double t = sw.seconds();
  report(5, mismatches == 0 && brute_mismatches == 0 && t < kBudget5,
         fmt("%d datasets, dp kink mismatches %d, brute-force mismatches %d/%d, time=%.1fs", cases, mismatches,
             brute_mismatches, brute_cases, t));
}

void six_point() {
  Stopwatch sw;
  int holds = 0, fails = 0, bad_holds = 0, bad_fails = 0;
  for (std::uint64_t seed = 1; holds < 20 || fails < 20; ++seed) {
    const bool want = holds < 20 && (fails >= 20 || seed % 2 == 1);
    const auto s = sample_six_point(want, seed);
    if (!s) continue;
    const std::size_t kinks = solve_min_norm(s->data).f.kink_count();
    const std::size_t sparse = sparsest_count(s->data);
    if (s->condition) {
      ++holds;
      if (kinks != sparse) ++bad_holds;
    } else {
      ++fails;
      if (!(kinks > sparse)) ++bad_fails;
    }
  }
  const double t = sw.seconds();
  report(6, bad_holds == 0 && bad_fails == 0 && t < kBudget6,
         fmt("%d true (%d without equality), %d false (%d without excess kinks), time=%.1fs", holds, bad_holds, fails,
             bad_fails, t));
}

void value_functions() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> un(3, 8);
  double worst_convex = 0.0, worst_lip = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Dataset d = random_dataset(rng, un(rng), 0.05, 3.0);
    const auto v = value_function_samples(d);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto& g = v.grid[i];
      const auto& c = v.value[i];
      const double lip = std::sqrt(1.0 + d.x(i) * d.x(i));
      for (std::size_t j = 1; j + 1 < c.size(); ++j) worst_convex = std::min(worst_convex, c[j + 1] - 2 * c[j] + c[j - 1]);
      for (std::size_t j = 1; j < c.size(); ++j)
        worst_lip = std::max(worst_lip, std::fabs(c[j] - c[j - 1]) - lip * std::fabs(g[j] - g[j - 1]));
    }
  }
  report(7, worst_convex >= -kConvexityTol && worst_lip <= kLipschitzSlack,
         fmt("20 datasets, min second difference %.2e, max Lipschitz excess %.2e", worst_convex, worst_lip));
}

void classification() {
  Stopwatch sw;
  const std::vector<double> x{-1.0, -0.4, 0.1, 0.5, 1.2};
  int labelings = 0, mismatches = 0, other_formula = 0;
  double worst_slack = 0.0;
  for (int mask = 1; mask < 31; ++mask) {
    std::vector<double> y(5);
    for (int i = 0; i < 5; ++i) y[i] = (mask >> i) & 1 ? 1.0 : -1.0;
    const Dataset d = Dataset::from_xy(x, y);
    ++labelings;
    const MarginSolution s = max_margin_solve(d);
    const std::size_t brute = brute_force_margin_min_kinks(d).kinks;
    if (s.f.kink_count() != brute) ++mismatches;
    worst_slack = std::min(worst_slack, s.min_slack);
    // Count with one more kink per labeling than the block formula, B - 1.
    const std::size_t blocks = margin_partition(d).size();
    if (blocks - 1 != brute) ++other_formula;
  }
  const double t = sw.seconds();
  report(8, mismatches == 0 && worst_slack >= -kMarginSlackTol && t < kBudget8,
         fmt("%d labelings, solver-vs-brute-force mismatches %d, min slack %.1e, B-1 count disagrees on %d, time=%.2fs",
             labelings, mismatches, worst_slack, other_formula, t));
}

// Two-kink targets alpha (t1 - x)_+ + beta (x - t2)_+ sampled at six points,
// kept when the min-norm interpolator has two kinks and pays no affine
// correction, so both network variants share the same sparse target.
std::vector<Dataset> training_datasets() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Dataset> out;
  while (out.size() < 5) {
    const double t1 = -0.8 + 0.7 * u(rng), t2 = 0.1 + 0.7 * u(rng);
    const double alpha = 0.5 + 1.5 * u(rng), beta = 0.5 + 1.5 * u(rng);
    std::vector<double> x(6), y(6);
    for (auto& v : x) v = -1.0 + 2.0 * u(rng);
    std::sort(x.begin(), x.end());
    bool spread = true;
    for (int i = 0; i < 5; ++i) spread &= x[i + 1] - x[i] > 0.1;
    if (!spread) continue;
    for (int i = 0; i < 6; ++i) y[i] = alpha * std::max(0.0, t1 - x[i]) + beta * std::max(0.0, x[i] - t2);
    const Dataset d = Dataset::from_xy(x, y);
    if (sparsest_count(d) != 2 || !check_assumption1(d)) continue;
    const Solution s = solve_min_norm(d);
    if (s.f.kink_count() != 2 || no_skip_cost(s.f) - s.cost > 1e-9) continue;
    out.push_back(d);
  }
  return out;
}

double median(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? double(v[m]) : 0.5 * double(v[m - 1] + v[m]);
}

void training_contrast() {
  Stopwatch sw;
  const auto data = training_datasets();
  // runs[(skip * 2 + penalize) * 5 + dataset]
  std::vector<std::size_t> kinks(20);
  parallel_for(20, [&](std::size_t r) {
    TrainConfig c;
    c.steps = kTrainSteps;
    c.skip_connection = r / 10 == 1;
    c.penalize_biases = (r / 5) % 2 == 1;
    c.seed = r % 5 + 1;
    const TrainResult res = train_network(data[r % 5], c);
    kinks[r] = effective_kink_count(res.params, data[r % 5], kKinkTolFraction, kKinkMergeGap);
  });
  bool ok = true;
  std::string detail;
  for (int skip = 0; skip < 2; ++skip) {
    std::vector<std::size_t> pen(kinks.begin() + skip * 10 + 5, kinks.begin() + skip * 10 + 10);
    std::vector<std::size_t> free(kinks.begin() + skip * 10, kinks.begin() + skip * 10 + 5);
    const double mp = median(pen), mf = median(free);
    ok &= mp == 2.0 && mf > mp;
    detail += fmt("%s: penalised [%zu %zu %zu %zu %zu] median %.0f, unpenalised [%zu %zu %zu %zu %zu] median %.0f; ",
                  skip ? "skip" : "no skip", pen[0], pen[1], pen[2], pen[3], pen[4], mp, free[0], free[1], free[2],
                  free[3], free[4], mf);
  }
  const double t = sw.seconds();
  report(9, ok && t < kBudget9, detail + fmt("time=%.0fs", t));
}

void shift() {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<std::size_t> un(3, 8);
  int cases = 0, bad_cost = 0, bad_count = 0;
  double min_ratio = INFINITY;
  while (cases < 20) {
    Dataset d = random_dataset(rng, un(rng), -2.0, 2.0);
    double mean = 0.0;
    for (const auto& p : d.points()) mean += p.x;
    d = d.shifted(-mean / double(d.size()));
    if (sparsest_count(d) == 0) continue;
    ++cases;
    const double c0 = weighted_tv_cost(solve_min_norm(d).f);
    const Dataset far = d.shifted(10.0);
    const double c1 = weighted_tv_cost(solve_min_norm(far).f);
    if (!(c1 > c0)) ++bad_cost;
    if (sparsest_count(far) != sparsest_count(d)) ++bad_count;
    min_ratio = std::min(min_ratio, c1 / c0);
  }
  report(10, bad_cost == 0 && bad_count == 0,
         fmt("%d centered datasets, cost not increased %d, sparsest count changed %d, min cost ratio %.2f", cases,
             bad_cost, bad_count, min_ratio));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{closed_form,      network_identity, no_skip,       oracle_agreement,
                                                    sparse_recovery,  six_point,        value_functions, classification,
                                                    training_contrast, shift};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, std::string("exception: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
