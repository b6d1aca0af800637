#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "minnorm/model.hpp"

namespace minnorm {

enum class Convexity { Convex, Concave, Affine };

[[nodiscard]] std::string to_string(Convexity c);

/// Convexity blocks of the canonical interpolator.
///
/// breakpoints holds 0-based point indices b_0 = 0 < b_1 < ... < b_K = n-1; block k
/// spans points b_k .. b_{k+1}.  tags[k] is the sign of the slope change at
/// point b_k (the first block is always tagged Affine because the extended slope
/// before the first segment repeats it).
struct Partition {
  std::vector<std::size_t> breakpoints;
  std::vector<Convexity> tags;

  [[nodiscard]] std::size_t block_count() const { return tags.size(); }
  /// Number of slope changes spanned by block k, i.e. b_{k+1} - b_k.
  [[nodiscard]] std::size_t block_length(std::size_t k) const {
    return breakpoints[k + 1] - breakpoints[k];
  }
};

/// Sign of delta_j - delta_{j-1} where |difference| <= tol (1 + max |delta|) counts as 0.
/// j addresses the extended slope sequence (see Dataset::ext_slope).
[[nodiscard]] int slope_change_sign(const Dataset& d, std::size_t j, double tol);

[[nodiscard]] Partition build_partition(const Dataset& d, double tol = 1e-9);

/// No strictly convex or concave block spans more than three slope changes.
[[nodiscard]] bool check_assumption1(const Dataset& d, double tol = 1e-9);

/// Minimal number of kinks over all interpolators of d.
[[nodiscard]] std::size_t sparsest_count(const Dataset& d, double tol = 1e-9);

/// An interpolator attaining sparsest_count kinks.
[[nodiscard]] PiecewiseLinearFn construct_sparsest(const Dataset& d, double tol = 1e-9);

}  // namespace minnorm
