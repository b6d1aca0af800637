#pragma once

#include <cstddef>
#include <vector>

namespace minnorm {

enum class Relation { LessEq, Equal, GreaterEq };

/// minimize objective . x  subject to  rows[r] . x (rel[r]) rhs[r],  x >= 0.
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<Relation> rel;
  std::vector<double> rhs;

  void add_row(std::vector<double> coeffs, Relation r, double b);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

/// Dense two-phase simplex with Bland's rule.  Meant for programs with a few
/// dozen rows and columns.
[[nodiscard]] LpResult solve_lp(const LinearProgram& lp, double eps = 1e-11);

}  // namespace minnorm
