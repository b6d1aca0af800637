#pragma once

#include <cstddef>

#include "minnorm/model.hpp"

namespace minnorm {

struct OracleConfig {
  std::size_t max_iters = 2000000;
  /// Relative duality gap at which the convex solver stops.
  double gap_tol = 1e-6;
  /// Points added strictly inside every inter-datum interval for the kink searches.
  std::size_t subgrid = 8;
  std::size_t k_max = 6;
  std::size_t fine_resolution = 1001;
};

struct OracleResult {
  double cost = 0.0;
  SlopeSequence slopes;
  /// Certified upper bound on cost minus the box optimum.
  double gap = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
};

/// Minimises the slope objective over the slope boxes with the coordinates
/// pinned to delta where the closure of the constraint set forces it
/// (convexity switches).  Primal-dual first-order method; reports
/// converged = false with the best iterate when max_iters is reached.
[[nodiscard]] OracleResult box_convex_solve(const Dataset& d, const OracleConfig& cfg = {});

/// Exhaustive DP on uniform slope grids of the given resolution, no refinement.
[[nodiscard]] OracleResult fine_grid_solve(const Dataset& d, std::size_t resolution);

struct KinkSearchResult {
  std::size_t kinks = 0;
  /// True when no k <= k_max was feasible; kinks is then k_max + 1.
  bool exhausted = false;
};

/// Smallest kink count of an interpolator with kinks drawn from a candidate grid.
[[nodiscard]] KinkSearchResult brute_force_min_kinks(const Dataset& d, const OracleConfig& cfg = {});

/// Same search with margin constraints y_i f(x_i) >= 1 (labels in {-1, +1}).
[[nodiscard]] KinkSearchResult brute_force_margin_min_kinks(const Dataset& d, const OracleConfig& cfg = {});

}  // namespace minnorm
