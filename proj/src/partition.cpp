#include "minnorm/partition.hpp"

#include <algorithm>
#include <cmath>

#include "minnorm/errors.hpp"

namespace minnorm {

std::string to_string(Convexity c) {
  switch (c) {
    case Convexity::Convex:
      return "convex";
    case Convexity::Concave:
      return "concave";
    case Convexity::Affine:
      return "affine";
  }
  return "affine";
}

namespace {

double slope_scale(const Dataset& d) {
  double m = 0.0;
  for (double s : d.slopes()) m = std::max(m, std::fabs(s));
  return 1.0 + m;
}

}  // namespace

int slope_change_sign(const Dataset& d, std::size_t j, double tol) {
  const double diff = d.ext_slope(j) - d.ext_slope(j - 1);
  if (std::fabs(diff) <= tol * slope_scale(d)) return 0;
  return diff > 0.0 ? 1 : -1;
}

Partition build_partition(const Dataset& d, double tol) {
  const std::size_t n = d.size();
  Partition p;
  if (n < 2) {
    p.breakpoints.push_back(0);
    return p;
  }
  // In 1-based terms: next = min { j in (cur, n-1] : sign changes at j } or n.
  std::size_t cur = 1;
  while (true) {
    p.breakpoints.push_back(cur - 1);
    if (cur == n) break;
    const int s = slope_change_sign(d, cur, tol);
    p.tags.push_back(s > 0 ? Convexity::Convex : (s < 0 ? Convexity::Concave : Convexity::Affine));
    std::size_t next = n;
    for (std::size_t j = cur + 1; j <= n - 1; ++j) {
      if (slope_change_sign(d, j, tol) != slope_change_sign(d, j - 1, tol)) {
        next = j;
        break;
      }
    }
    cur = next;
  }
  return p;
}

bool check_assumption1(const Dataset& d, double tol) {
  const Partition p = build_partition(d, tol);
  for (std::size_t k = 0; k < p.block_count(); ++k) {
    if (p.tags[k] != Convexity::Affine && p.block_length(k) > 3) return false;
  }
  return true;
}

std::size_t sparsest_count(const Dataset& d, double tol) {
  if (d.size() < 2) return 0;
  const Partition p = build_partition(d, tol);
  std::size_t total = 0;
  for (std::size_t k = 0; k < p.block_count(); ++k) {
    if (p.tags[k] != Convexity::Affine) total += (p.block_length(k) + 1) / 2;
  }
  return total;
}

PiecewiseLinearFn construct_sparsest(const Dataset& d, double tol) {
  const std::size_t n = d.size();
  if (n == 1) return {0.0, d.y(0), {}};
  const Partition p = build_partition(d, tol);
  // Built on data translated to start at x = 0 so that every slope is a left derivative.
  const double x0 = d.x(0);
  const Dataset shifted = d.shifted(-x0);
  const Tolerance eq{tol * slope_scale(d), 0.0};
  auto is_breakpoint = [&](std::size_t one_based) {
    return std::find(p.breakpoints.begin(), p.breakpoints.end(), one_based - 1) != p.breakpoints.end();
  };
  SlopeSequence s(n);
  s[0] = shifted.ext_slope(1);
  for (std::size_t i = 2; i <= n; ++i) {
    const double prev_delta = shifted.ext_slope(i - 1);
    if (eq.equal(s[i - 2], prev_delta) || is_breakpoint(i)) {
      s[i - 1] = prev_delta;
    } else {
      s[i - 1] = shifted.ext_slope(i);
    }
  }
  const PiecewiseLinearFn g = from_slopes(shifted, s, eq);
  std::vector<Kink> kinks = g.kinks();
  for (auto& k : kinks) k.location += x0;
  return {g.a0(), g.b0() - g.a0() * x0, std::move(kinks)};
}

}  // namespace minnorm
