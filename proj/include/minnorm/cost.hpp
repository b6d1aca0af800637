#pragma once

#include <array>
#include <vector>

#include "minnorm/model.hpp"

namespace minnorm {

using Vec2 = std::array<double, 2>;

/// (f'(+inf) + f'(-inf), f(0) - sum |tau_i| a_i)
[[nodiscard]] Vec2 affine_data(const PiecewiseLinearFn& f);

/// One generator (a_i, -tau_i a_i) per kink; kinks with |a_i| <= amp_tol are skipped.
[[nodiscard]] std::vector<Vec2> zonotope_generators(const PiecewiseLinearFn& f, double amp_tol = 1e-12);

/// sum |a_i| sqrt(1 + tau_i^2)
[[nodiscard]] double weighted_tv_cost(const PiecewiseLinearFn& f);

/// Euclidean distance from p to the zonotope { sum phi_i g_i : |phi_i| <= 1 }.
[[nodiscard]] double zonotope_distance(const Vec2& p, const std::vector<Vec2>& gens);

/// Cost without a free skip connection: weighted TV plus the affine correction.
[[nodiscard]] double no_skip_cost(const PiecewiseLinearFn& f);

}  // namespace minnorm
