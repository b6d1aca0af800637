#include "minnorm/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "minnorm/errors.hpp"

namespace minnorm {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Guaranteed:
      return "guaranteed";
    case Verdict::ConditionalHolds:
      return "conditional_holds";
    case Verdict::ConditionalFails:
      return "conditional_fails";
    case Verdict::Unknown:
      return "unknown";
  }
  return "unknown";
}

namespace {

struct V2 {
  double a, b;
};

double dot(V2 p, V2 q) { return p.a * q.a + p.b * q.b; }
double norm2(V2 p) { return dot(p, p); }

}  // namespace

SixPointTerms six_point_terms(const Dataset& d, std::size_t block_k, double tol) {
  const Partition p = build_partition(d, tol);
  if (block_k >= p.block_count()) throw InputError("block index out of range");
  if (p.tags[block_k] == Convexity::Affine || p.block_length(block_k) != 4)
    throw InputError("six-point condition needs a strictly convex or concave block of six points");
  // 1-based: i = n_k + 1 with n_k = breakpoint + 1.
  const std::size_t i = p.breakpoints[block_k] + 2;
  const std::size_t b = p.breakpoints[block_k];
  for (std::size_t j = b + 2; j <= b + 4; ++j) {
    if (slope_change_sign(d, j, tol) != slope_change_sign(d, b + 1, tol))
      throw InputError("six-point block is not strictly convex or concave");
  }
  auto X = [&](std::size_t one_based) { return d.x(one_based - 1); };
  auto D = [&](std::size_t one_based) { return d.ext_slope(one_based); };

  const double den_m = D(i) - D(i - 2);
  const double den_p = D(i + 2) - D(i);
  if (den_m == 0.0 || den_p == 0.0) throw InputError("vanishing slope differences in six-point block");

  const V2 u_i{X(i), 1.0};
  const V2 u_ip{X(i + 1), 1.0};
  const double cm1 = (D(i) - D(i - 1)) / den_m;
  const double cm2 = (D(i - 1) - D(i - 2)) / den_m;
  const V2 w_m{cm1 * X(i) + cm2 * X(i - 1), cm1 * 1.0 + cm2 * 1.0};
  const double cp1 = (D(i + 2) - D(i + 1)) / den_p;
  const double cp2 = (D(i + 1) - D(i)) / den_p;
  const V2 w_p{cp1 * X(i + 2) + cp2 * X(i + 1), cp1 * 1.0 + cp2 * 1.0};

  SixPointTerms t;
  t.lhs = dot(u_i, w_m) * dot(u_ip, w_p) / (std::sqrt(norm2(w_m)) * std::sqrt(norm2(w_p))) - dot(u_i, u_ip);
  const double r1 = norm2(u_i) - dot(u_i, w_m) * dot(u_i, w_m) / norm2(w_m);
  const double r2 = norm2(u_ip) - dot(u_ip, w_p) * dot(u_ip, w_p) / norm2(w_p);
  t.rhs = std::sqrt(std::max(0.0, r1)) * std::sqrt(std::max(0.0, r2));
  return t;
}

bool six_point_condition(const Dataset& d, std::size_t block_k, double tol) {
  return six_point_terms(d, block_k, tol).holds();
}

RecoveryVerdict predict_recovery(const Dataset& d, double tol) {
  RecoveryVerdict v;
  v.partition = build_partition(d, tol);
  bool any_fail = false, any_unknown = false, any_holds = false;
  for (std::size_t k = 0; k < v.partition.block_count(); ++k) {
    Verdict b = Verdict::Guaranteed;
    const std::size_t len = v.partition.block_length(k);
    if (v.partition.tags[k] != Convexity::Affine && len > 3) {
      if (len == 4) {
        b = six_point_condition(d, k, tol) ? Verdict::ConditionalHolds : Verdict::ConditionalFails;
      } else {
        b = Verdict::Unknown;
      }
    }
    any_fail |= b == Verdict::ConditionalFails;
    any_unknown |= b == Verdict::Unknown;
    any_holds |= b == Verdict::ConditionalHolds;
    v.blocks.push_back(b);
  }
  if (any_fail) {
    v.overall = Verdict::ConditionalFails;
  } else if (any_unknown) {
    v.overall = Verdict::Unknown;
  } else if (any_holds) {
    v.overall = Verdict::ConditionalHolds;
  }
  return v;
}

std::optional<SixPointSample> sample_six_point(bool want, std::uint64_t seed, std::size_t max_tries) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t t = 0; t < max_tries; ++t) {
    const double offset = 0.5 * unit(rng);
    const double span = 0.5 + 5.5 * unit(rng);
    std::vector<double> x(6), slopes(5);
    for (double& v : x) v = offset + span * unit(rng);
    for (double& v : slopes) v = -3.0 + 6.0 * unit(rng);
    std::sort(x.begin(), x.end());
    std::sort(slopes.begin(), slopes.end());
    bool ok = true;
    for (std::size_t i = 0; i + 1 < 6; ++i) ok &= x[i + 1] - x[i] > 1e-3;
    for (std::size_t i = 0; i + 1 < 5; ++i) ok &= slopes[i + 1] - slopes[i] > 1e-3;
    if (!ok) continue;
    std::vector<Point> pts(6);
    pts[0] = {x[0], 0.0};
    for (std::size_t i = 1; i < 6; ++i) pts[i] = {x[i], pts[i - 1].y + slopes[i - 1] * (x[i] - x[i - 1])};
    Dataset d(pts);
    const Partition p = build_partition(d);
    if (p.block_count() != 2 || p.block_length(1) != 4) continue;
    if (six_point_condition(d, 1) == want) return SixPointSample{std::move(d), want};
  }
  return std::nullopt;
}

}  // namespace minnorm
