#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "minnorm/model.hpp"

namespace minnorm {

struct DPConfig {
  std::size_t grid_points = 512;
  std::size_t refine_rounds = 4;
  double refine_shrink = 0.1;
  double tol = 1e-9;
  std::size_t polish_sweeps = 2;

  void validate() const;
};

/// Cost of the kink on segment k (0-based, joining points k and k+1) when the
/// slopes at its ends are s_cur and s_next.
[[nodiscard]] double neuron_cost_g(const Dataset& d, std::size_t k, double s_next, double s_cur);

/// Total cost sum_k g_k(s_{k+1}, s_k) of a slope sequence.
[[nodiscard]] double slope_cost(const Dataset& d, std::span<const double> s);

/// Sampled value functions.  For i >= first_nonnegative() the value c_i(s) is
/// the cheapest cost of segments i..n-2 given s_i = s and pointer[i][j]
/// indexes the optimal s_{i+1} on grid i+1.  For i < first_nonnegative() it
/// covers segments 0..i-1 and pointer[i][j] indexes the optimal s_{i-1}.
/// Pointers are npos at the chain ends.
struct ValueFunctionSamples {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::vector<double>> grid;
  std::vector<std::vector<double>> value;
  std::vector<std::vector<std::size_t>> pointer;
};

struct Solution {
  PiecewiseLinearFn f;
  double cost = 0.0;
  SlopeSequence slopes;
  /// Cost after the initial grid pass, after each refinement round, and after the polish.
  std::vector<double> cost_trace;
};

[[nodiscard]] Solution solve_min_norm(const Dataset& d, const DPConfig& cfg = {});

/// Step (b) of the solver on the full slope boxes, without refinement.
[[nodiscard]] ValueFunctionSamples value_function_samples(const Dataset& d, const DPConfig& cfg = {});

/// Runs fn(i) for i in [0, count).  Thread count comes from MINNORM1D_THREADS
/// (unset or 0 means hardware concurrency).  fn must not depend on call order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace minnorm
