#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minnorm/model.hpp"
#include "minnorm/partition.hpp"

namespace minnorm {

enum class Verdict { Guaranteed, ConditionalHolds, ConditionalFails, Unknown };

[[nodiscard]] std::string to_string(Verdict v);

struct RecoveryVerdict {
  Partition partition;
  std::vector<Verdict> blocks;
  Verdict overall = Verdict::Guaranteed;
};

struct SixPointTerms {
  double lhs = 0.0;
  double rhs = 0.0;
  [[nodiscard]] bool holds() const { return lhs <= rhs; }
};

/// Both sides of the six-point inequality for block k of build_partition(d, tol).
/// Throws InputError unless the block is strictly convex or concave with
/// exactly four slope changes.
[[nodiscard]] SixPointTerms six_point_terms(const Dataset& d, std::size_t block_k, double tol = 1e-9);
[[nodiscard]] bool six_point_condition(const Dataset& d, std::size_t block_k, double tol = 1e-9);

[[nodiscard]] RecoveryVerdict predict_recovery(const Dataset& d, double tol = 1e-9);

struct SixPointSample {
  Dataset data;
  bool condition = false;
};

/// Random strictly convex six-point dataset with x >= 0 whose condition
/// evaluates to `want`, found by rejection sampling; nullopt after max_tries.
[[nodiscard]] std::optional<SixPointSample> sample_six_point(bool want, std::uint64_t seed,
                                                             std::size_t max_tries = 10000);

}  // namespace minnorm
