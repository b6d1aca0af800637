#include "minnorm/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "minnorm/errors.hpp"

namespace minnorm {

double Tolerance::band(double a, double b) const {
  return abs + rel * std::max(std::fabs(a), std::fabs(b));
}

bool Tolerance::equal(double a, double b) const { return std::fabs(a - b) <= band(a, b); }

int Tolerance::sign_near(double v, double ref) const {
  if (std::fabs(v) <= abs + rel * std::fabs(ref)) return 0;
  return v > 0 ? 1 : -1;
}

Dataset::Dataset(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.empty()) throw InputError("dataset must contain at least one point");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].x) || !std::isfinite(points_[i].y)) {
      std::ostringstream msg;
      msg << "non-finite value at point " << i;
      throw InputError(msg.str());
    }
    if (i > 0 && !(points_[i].x > points_[i - 1].x)) {
      std::ostringstream msg;
      msg << "abscissae must be strictly increasing (point " << i << ": x=" << points_[i].x
          << " after x=" << points_[i - 1].x << ")";
      throw InputError(msg.str());
    }
  }
  slopes_.reserve(points_.size() - 1);
  for (std::size_t k = 0; k + 1 < points_.size(); ++k) {
    const double s = (points_[k + 1].y - points_[k].y) / (points_[k + 1].x - points_[k].x);
    if (!std::isfinite(s)) throw InputError("segment slope overflows");
    slopes_.push_back(s);
  }
  first_nonneg_ = points_.size();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].x >= 0.0) {
      first_nonneg_ = i;
      break;
    }
  }
}

Dataset Dataset::from_xy(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("x and y must have the same length");
  std::vector<Point> pts(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) pts[i] = {x[i], y[i]};
  return Dataset(std::move(pts));
}

double Dataset::ext_slope(std::size_t j) const {
  if (slopes_.empty()) throw InputError("slopes need at least two points");
  if (j == 0) return slopes_.front();
  if (j >= slopes_.size() + 1) return slopes_.back();
  return slopes_[j - 1];
}

double Dataset::box_lo(std::size_t i) const { return std::min(ext_slope(i), ext_slope(i + 1)); }
double Dataset::box_hi(std::size_t i) const { return std::max(ext_slope(i), ext_slope(i + 1)); }

double Dataset::max_abs_y() const {
  double m = 0.0;
  for (const auto& p : points_) m = std::max(m, std::fabs(p.y));
  return m;
}

Dataset Dataset::shifted(double dx) const {
  auto pts = points_;
  for (auto& p : pts) p.x += dx;
  return Dataset(std::move(pts));
}

Dataset Dataset::scaled_y(double factor) const {
  auto pts = points_;
  for (auto& p : pts) p.y *= factor;
  return Dataset(std::move(pts));
}

Dataset Dataset::without_point(std::size_t i) const {
  auto pts = points_;
  pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
  return Dataset(std::move(pts));
}

PiecewiseLinearFn::PiecewiseLinearFn(double a0, double b0, std::vector<Kink> kinks)
    : a0_(a0), b0_(b0), kinks_(std::move(kinks)) {
  if (!std::isfinite(a0_) || !std::isfinite(b0_)) throw InputError("non-finite affine part");
  for (std::size_t j = 0; j < kinks_.size(); ++j) {
    const auto& k = kinks_[j];
    if (!std::isfinite(k.amplitude) || !std::isfinite(k.location))
      throw InputError("non-finite kink");
    if (k.amplitude == 0.0) throw InputError("kink amplitudes must be nonzero");
    if (j > 0 && !(k.location > kinks_[j - 1].location))
      throw InputError("kink locations must be strictly increasing");
  }
}

double PiecewiseLinearFn::operator()(double x) const {
  double v = a0_ * x + b0_;
  for (const auto& k : kinks_) {
    if (x > k.location) v += k.amplitude * (x - k.location);
  }
  return v;
}

double PiecewiseLinearFn::slope_at_plus_infinity() const {
  double s = a0_;
  for (const auto& k : kinks_) s += k.amplitude;
  return s;
}

double evaluate(const PiecewiseLinearFn& f, double x) { return f(x); }

PiecewiseLinearFn canonical_linear_interpolator(const Dataset& d, const Tolerance& tol) {
  if (d.size() < 2) throw InputError("canonical interpolator needs at least two points");
  const double a0 = d.slope(0);
  const double b0 = d.y(0) - a0 * d.x(0);
  std::vector<Kink> kinks;
  for (std::size_t i = 1; i + 1 < d.size(); ++i) {
    const double jump = d.slope(i) - d.slope(i - 1);
    if (!tol.equal(d.slope(i), d.slope(i - 1))) kinks.push_back({jump, d.x(i)});
  }
  return {a0, b0, std::move(kinks)};
}

namespace {

enum class Rule { Right, Left, Junction };

Rule segment_rule(const Dataset& d, std::size_t k) {
  const std::size_t i0 = d.first_nonnegative();
  if (k >= i0) return Rule::Right;
  if (k + 1 < i0) return Rule::Left;
  return Rule::Junction;
}

// -1 / 0 / +1 position of v relative to delta.
int side(double v, double delta, const Tolerance& tol) {
  if (tol.equal(v, delta)) return 0;
  return v > delta ? 1 : -1;
}

}  // namespace

bool segment_admissible(const Dataset& d, std::size_t k, double s_cur, double s_next,
                        const Tolerance& tol) {
  const double delta = d.slope(k);
  const int cur = side(s_cur, delta, tol);
  const int next = side(s_next, delta, tol);
  switch (segment_rule(d, k)) {
    case Rule::Right:
      return cur == 0 ? next == 0 : next != cur;
    case Rule::Left:
      return next == 0 ? cur == 0 : cur != next;
    case Rule::Junction:
      return (cur == 0 && next == 0) || (cur * next == -1);
  }
  return false;
}

bool is_admissible(const Dataset& d, std::span<const double> s, const Tolerance& tol) {
  if (s.size() != d.size() || d.size() < 2) return false;
  for (double v : s)
    if (!std::isfinite(v)) return false;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    if (!segment_admissible(d, k, s[k], s[k + 1], tol)) return false;
  }
  return true;
}

PiecewiseLinearFn from_slopes(const Dataset& d, std::span<const double> s, const Tolerance& tol) {
  if (d.size() < 2) throw InputError("slope map needs at least two points");
  if (s.size() != d.size()) throw InputError("slope sequence length differs from dataset size");
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    if (!segment_admissible(d, k, s[k], s[k + 1], tol)) {
      std::ostringstream msg;
      msg << "slope sequence is not admissible at segment " << k << " (s=" << s[k] << ", "
          << s[k + 1] << ", delta=" << d.slope(k) << ")";
      throw InputError(msg.str());
    }
  }
  const double a0 = s[0];
  const double b0 = d.y(0) - s[0] * d.x(0);
  std::vector<Kink> kinks;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    if (tol.equal(s[k + 1], s[k])) continue;
    const double delta = d.slope(k);
    const double xl = d.x(k);
    const double xr = d.x(k + 1);
    double tau;
    if (tol.equal(s[k + 1], delta)) {
      tau = xl;
    } else if (tol.equal(s[k], delta)) {
      tau = xr;
    } else {
      tau = ((s[k + 1] - delta) * xr + (delta - s[k]) * xl) / (s[k + 1] - s[k]);
      tau = std::clamp(tau, xl, xr);
    }
    const double amp = s[k + 1] - s[k];
    if (!kinks.empty() && !(tau > kinks.back().location)) {
      // Only reachable through round-off at a shared data point.
      kinks.back().amplitude += amp;
      if (kinks.back().amplitude == 0.0) kinks.pop_back();
      continue;
    }
    kinks.push_back({amp, tau});
  }
  return {a0, b0, std::move(kinks)};
}

double max_interpolation_error(const Dataset& d, const PiecewiseLinearFn& f) {
  double worst = 0.0;
  for (const auto& p : d.points()) worst = std::max(worst, std::fabs(f(p.x) - p.y) / (1.0 + std::fabs(p.y)));
  return worst;
}

SlopeSequence to_slopes(const Dataset& d, const PiecewiseLinearFn& f, const Tolerance& tol) {
  const std::size_t n = d.size();
  if (n < 2) throw InputError("slope map needs at least two points");
  if (max_interpolation_error(d, f) > 1e-9) throw InputError("function does not interpolate the dataset");
  const std::size_t i0 = d.first_nonnegative();
  std::vector<double> amp(n - 1, 0.0);
  std::vector<int> count(n - 1, 0);
  for (const auto& kink : f.kinks()) {
    const double t = kink.location;
    std::size_t seg = n;  // sentinel: no admissible segment
    // Kinks sitting on a data point are attributed by the placement pattern.
    std::size_t at = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::fabs(t - d.x(i)) <= tol.abs + tol.rel * std::fabs(d.x(i))) {
        at = i;
        break;
      }
    }
    if (at < n) {
      if (at >= i0) {
        if (at + 1 < n) seg = at;
      } else if (at >= 1) {
        seg = at - 1;
      }
    } else if (t > d.x(0) && t < d.x(n - 1)) {
      const auto it = std::upper_bound(d.points().begin(), d.points().end(), t,
                                       [](double v, const Point& p) { return v < p.x; });
      seg = static_cast<std::size_t>(it - d.points().begin()) - 1;
    }
    if (seg >= n - 1) {
      std::ostringstream msg;
      msg << "kink at " << t << " lies outside the canonical placement pattern";
      throw InputError(msg.str());
    }
    if (++count[seg] > 1) throw InputError("more than one kink on a segment");
    amp[seg] += kink.amplitude;
  }
  SlopeSequence s(n);
  s[0] = f.a0();
  for (std::size_t k = 0; k + 1 < n; ++k) s[k + 1] = s[k] + amp[k];
  if (!is_admissible(d, s, tol)) throw InputError("kink placement violates the slope constraints");
  return s;
}

}  // namespace minnorm
