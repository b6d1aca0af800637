#include "minnorm/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minnorm/errors.hpp"

namespace minnorm {

Vec2 affine_data(const PiecewiseLinearFn& f) {
  double weighted = 0.0;
  for (const auto& k : f.kinks()) weighted += std::fabs(k.location) * k.amplitude;
  return {f.slope_at_plus_infinity() + f.slope_at_minus_infinity(), f(0.0) - weighted};
}

std::vector<Vec2> zonotope_generators(const PiecewiseLinearFn& f, double amp_tol) {
  std::vector<Vec2> gens;
  for (const auto& k : f.kinks()) {
    if (std::fabs(k.amplitude) <= amp_tol) continue;
    gens.push_back({k.amplitude, -k.location * k.amplitude});
  }
  return gens;
}

double weighted_tv_cost(const PiecewiseLinearFn& f) {
  double total = 0.0;
  for (const auto& k : f.kinks()) total += std::fabs(k.amplitude) * std::hypot(1.0, k.location);
  return total;
}

namespace {

double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const double ex = b[0] - a[0], ey = b[1] - a[1];
  const double len2 = ex * ex + ey * ey;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / len2, 0.0, 1.0);
  return std::hypot(p[0] - a[0] - t * ex, p[1] - a[1] - t * ey);
}

}  // namespace

double zonotope_distance(const Vec2& p, const std::vector<Vec2>& gens) {
  if (!std::isfinite(p[0]) || !std::isfinite(p[1])) throw InputError("non-finite point");
  std::vector<Vec2> g;
  for (const auto& v : gens) {
    if (!std::isfinite(v[0]) || !std::isfinite(v[1])) throw InputError("non-finite generator");
    if (v[0] == 0.0 && v[1] == 0.0) continue;
    // Upper half-plane representative, angle in [0, pi).
    if (v[1] < 0.0 || (v[1] == 0.0 && v[0] < 0.0)) {
      g.push_back({-v[0], -v[1]});
    } else {
      g.push_back(v);
    }
  }
  if (g.empty()) return std::hypot(p[0], p[1]);
  std::sort(g.begin(), g.end(),
            [](const Vec2& a, const Vec2& b) { return std::atan2(a[1], a[0]) < std::atan2(b[1], b[0]); });

  // Counter-clockwise boundary: start at the vertex -sum g, add each 2g in
  // angle order, then subtract them in the same order.
  Vec2 start{0.0, 0.0};
  for (const auto& v : g) {
    start[0] -= v[0];
    start[1] -= v[1];
  }
  std::vector<Vec2> poly{start};
  for (int pass = 0; pass < 2; ++pass) {
    const double sign = pass == 0 ? 2.0 : -2.0;
    for (const auto& v : g) {
      const Vec2& last = poly.back();
      poly.push_back({last[0] + sign * v[0], last[1] + sign * v[1]});
    }
  }
  poly.pop_back();  // closes onto start

  double area2 = 0.0;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) area2 += cross(poly[i], poly[(i + 1) % m]);

  double scale = 0.0;
  for (const auto& v : poly) scale = std::max(scale, std::max(std::fabs(v[0]), std::fabs(v[1])));
  const bool solid = area2 > 1e-14 * scale * scale;
  if (solid) {
    bool inside = true;
    for (std::size_t i = 0; i < m && inside; ++i) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[(i + 1) % m];
      const Vec2 e{b[0] - a[0], b[1] - a[1]};
      const Vec2 q{p[0] - a[0], p[1] - a[1]};
      if (cross(e, q) < 0.0) inside = false;
    }
    if (inside) return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % m]));
  return best;
}

double no_skip_cost(const PiecewiseLinearFn& f) {
  return weighted_tv_cost(f) + zonotope_distance(affine_data(f), zonotope_generators(f));
}

}  // namespace minnorm
