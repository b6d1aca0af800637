#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace minnorm {

/// Absolute + relative tolerance used wherever two reals are compared for
/// equality (slopes, kink amplitudes).
struct Tolerance {
  double abs = 1e-9;
  double rel = 1e-9;

  [[nodiscard]] double band(double a, double b) const;
  [[nodiscard]] bool equal(double a, double b) const;
  /// -1, 0 or +1 with |v| <= band(v, ref) mapped to 0.
  [[nodiscard]] int sign_near(double v, double ref) const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Univariate training set with strictly increasing abscissae.
///
/// Indexing is 0-based throughout: point i is (x(i), y(i)) for i < size().
/// slope(k) is the slope of segment k joining points k and k+1.
/// ext_slope(j) addresses the extended sequence delta_0..delta_n used by the
/// slope boxes, where ext_slope(j) = slope(j-1) for 1 <= j <= n-1 and the two
/// ends repeat their neighbour.
class Dataset {
 public:
  explicit Dataset(std::vector<Point> points);
  static Dataset from_xy(std::span<const double> x, std::span<const double> y);

  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] double x(std::size_t i) const { return points_[i].x; }
  [[nodiscard]] double y(std::size_t i) const { return points_[i].y; }
  [[nodiscard]] const std::vector<Point>& points() const { return points_; }

  [[nodiscard]] double slope(std::size_t k) const { return slopes_[k]; }
  [[nodiscard]] const std::vector<double>& slopes() const { return slopes_; }
  [[nodiscard]] double ext_slope(std::size_t j) const;

  /// First index with x >= 0, or size() when every abscissa is negative.
  [[nodiscard]] std::size_t first_nonnegative() const { return first_nonneg_; }

  /// Box [lo, hi] containing the optimal slope at point i.
  [[nodiscard]] double box_lo(std::size_t i) const;
  [[nodiscard]] double box_hi(std::size_t i) const;

  [[nodiscard]] double max_abs_y() const;

  [[nodiscard]] Dataset shifted(double dx) const;
  [[nodiscard]] Dataset scaled_y(double factor) const;
  [[nodiscard]] Dataset without_point(std::size_t i) const;

 private:
  std::vector<Point> points_;
  std::vector<double> slopes_;
  std::size_t first_nonneg_ = 0;
};

struct Kink {
  double amplitude = 0.0;
  double location = 0.0;
};

/// f(x) = a0 x + b0 + sum_j a_j (x - tau_j)_+ with strictly increasing tau_j and
/// nonzero a_j.
class PiecewiseLinearFn {
 public:
  PiecewiseLinearFn() = default;
  PiecewiseLinearFn(double a0, double b0, std::vector<Kink> kinks);

  [[nodiscard]] double a0() const { return a0_; }
  [[nodiscard]] double b0() const { return b0_; }
  [[nodiscard]] const std::vector<Kink>& kinks() const { return kinks_; }
  [[nodiscard]] std::size_t kink_count() const { return kinks_.size(); }

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] double slope_at_minus_infinity() const { return a0_; }
  [[nodiscard]] double slope_at_plus_infinity() const;

 private:
  double a0_ = 0.0;
  double b0_ = 0.0;
  std::vector<Kink> kinks_;
};

/// Slopes (s_1..s_n) at the data points.  s_i is the left derivative at x_i
/// when x_i >= 0 and the right derivative when x_i < 0.
using SlopeSequence = std::vector<double>;

[[nodiscard]] double evaluate(const PiecewiseLinearFn& f, double x);

[[nodiscard]] PiecewiseLinearFn canonical_linear_interpolator(const Dataset& d,
                                                              const Tolerance& tol = {});

/// Membership of consecutive slopes (s_k, s_{k+1}) in the admissible set of
/// segment k.  The rule depends on where segment k sits relative to the
/// first nonnegative abscissa.
[[nodiscard]] bool segment_admissible(const Dataset& d, std::size_t k, double s_cur, double s_next,
                                      const Tolerance& tol = {});
[[nodiscard]] bool is_admissible(const Dataset& d, std::span<const double> s,
                                 const Tolerance& tol = {});

/// Inverse slope map: builds the interpolator whose slopes at the data are s.
/// Throws InputError when s is not admissible for d.
[[nodiscard]] PiecewiseLinearFn from_slopes(const Dataset& d, std::span<const double> s,
                                            const Tolerance& tol = {});

/// Slope map: reads the one-sided derivatives of an interpolator with at
/// most one kink per segment in the canonical placement.
[[nodiscard]] SlopeSequence to_slopes(const Dataset& d, const PiecewiseLinearFn& f,
                                      const Tolerance& tol = {});

[[nodiscard]] double max_interpolation_error(const Dataset& d, const PiecewiseLinearFn& f);

}  // namespace minnorm
