#pragma once

#include <cstddef>
#include <vector>

#include "minnorm/model.hpp"

namespace minnorm {

/// Maximal run of equal labels, as 0-based inclusive point indices.
struct LabelBlock {
  std::size_t first = 0;
  std::size_t last = 0;
  int label = 1;
};

/// Throws InputError unless every y is exactly -1 or +1.
void validate_labels(const Dataset& d);

[[nodiscard]] std::vector<LabelBlock> margin_partition(const Dataset& d);

/// max(0, B - 2) for B label blocks.
[[nodiscard]] std::size_t margin_sparsest_count(const Dataset& d);

struct MarginConfig {
  double margin = 1.0;
  /// Candidate locations per kink in each grid pass.
  std::size_t grid = 9;
  std::size_t refine_rounds = 8;
  double refine_shrink = 0.35;
  /// Bound on location tuples per pass; the per-kink grid is reduced to fit.
  std::size_t max_tuples = 20000;
};

struct MarginSolution {
  PiecewiseLinearFn f;
  double cost = 0.0;
  /// min_i y_i f(x_i) - margin
  double min_slack = 0.0;
};

/// Minimises the weighted TV cost subject to y_i f(x_i) >= margin, with one
/// kink per interior label block.
[[nodiscard]] MarginSolution max_margin_solve(const Dataset& d, const MarginConfig& cfg = {});

/// Cost of the best classifier with the given increasing kink locations, or
/// +inf when the margin constraints cannot be met.  Fills f when non-null.
[[nodiscard]] double margin_cost_at(const Dataset& d, const std::vector<double>& locations, double margin,
                                    PiecewiseLinearFn* f = nullptr);

}  // namespace minnorm
