#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "minnorm/errors.hpp"
#include "minnorm/model.hpp"

using namespace minnorm;

namespace {

Dataset make(std::vector<double> x, std::vector<double> y) { return Dataset::from_xy(x, y); }

// Uniform draw from the admissible slope set, segment by segment.
SlopeSequence random_admissible(const Dataset& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = d.size();
  const std::size_t i0 = d.first_nonnegative();
  SlopeSequence s(n);
  // Slopes left of the junction are drawn backwards from it, slopes right of it forwards.
  auto near = [&](double delta) { return delta + (u(rng) - 0.5) * 4.0; };
  auto opposite = [&](double v, double delta) {
    if (u(rng) < 0.15) return delta;
    const double gap = 0.05 + 2.0 * u(rng);
    return v >= delta ? delta - gap : delta + gap;
  };
  if (i0 == 0 || i0 >= n) {
    if (i0 == 0) {
      s[0] = near(d.slope(0));
      for (std::size_t k = 0; k + 1 < n; ++k) s[k + 1] = s[k] == d.slope(k) ? d.slope(k) : opposite(s[k], d.slope(k));
    } else {
      s[n - 1] = near(d.slope(n - 2));
      for (std::size_t k = n - 1; k-- > 0;) s[k] = s[k + 1] == d.slope(k) ? d.slope(k) : opposite(s[k + 1], d.slope(k));
    }
    return s;
  }
  const std::size_t k = i0 - 1;  // junction segment
  const double delta = d.slope(k);
  if (u(rng) < 0.15) {
    s[k] = s[k + 1] = delta;
  } else {
    const double gap = 0.05 + 2.0 * u(rng);
    const double other = 0.05 + 2.0 * u(rng);
    if (u(rng) < 0.5) {
      s[k] = delta - gap;
      s[k + 1] = delta + other;
    } else {
      s[k] = delta + gap;
      s[k + 1] = delta - other;
    }
  }
  for (std::size_t j = k + 1; j + 1 < n; ++j) s[j + 1] = s[j] == d.slope(j) ? d.slope(j) : opposite(s[j], d.slope(j));
  for (std::size_t j = k; j-- > 0;) s[j] = s[j + 1] == d.slope(j) ? d.slope(j) : opposite(s[j + 1], d.slope(j));
  return s;
}

Dataset random_dataset(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(-1.0, 1.0);
  std::vector<double> x(n), y(n);
  for (;;) {
    for (auto& v : x) v = ux(rng);
    std::sort(x.begin(), x.end());
    bool ok = true;
    for (std::size_t i = 1; i < n; ++i) ok &= x[i] - x[i - 1] > 1e-3;
    if (ok) break;
  }
  for (auto& v : y) v = uy(rng);
  return Dataset::from_xy(x, y);
}

}  // namespace

TEST_CASE("evaluate") {
  CHECK(evaluate(PiecewiseLinearFn(0, 0, {{1, 0}}), 2.0) == 2.0);
  CHECK(evaluate(PiecewiseLinearFn(3, 1, {}), -1.0) == -2.0);
  CHECK(evaluate(PiecewiseLinearFn(0, 0, {{2, 3}}), 1.0) == 0.0);
}

TEST_CASE("function construction rejects bad kinks") {
  CHECK_THROWS_AS(PiecewiseLinearFn(0, 0, {{1, 1}, {1, 0}}), InputError);
  CHECK_THROWS_AS(PiecewiseLinearFn(0, 0, {{0, 1}}), InputError);
  CHECK_THROWS_AS(PiecewiseLinearFn(NAN, 0, {}), InputError);
  const PiecewiseLinearFn f(1, 0, {{2, -1}, {-0.5, 3}});
  CHECK(f.slope_at_minus_infinity() == 1.0);
  CHECK(f.slope_at_plus_infinity() == doctest::Approx(2.5));
}

TEST_CASE("dataset validation") {
  CHECK_THROWS_AS(make({0, 0}, {1, 2}), InputError);
  CHECK_THROWS_AS(make({1, 0}, {1, 2}), InputError);
  CHECK_THROWS_AS(make({0, NAN}, {1, 2}), InputError);
  CHECK_THROWS_AS(make({}, {}), InputError);
  const Dataset d = make({-1, 0, 1}, {0, 0, 1});
  CHECK(d.first_nonnegative() == 1);
  CHECK(d.ext_slope(0) == 0.0);
  CHECK(d.ext_slope(1) == 0.0);
  CHECK(d.ext_slope(2) == 1.0);
  CHECK(d.ext_slope(3) == 1.0);
  CHECK(d.box_lo(1) == 0.0);
  CHECK(d.box_hi(1) == 1.0);
  CHECK(make({-3, -2}, {0, 1}).first_nonnegative() == 2);
  CHECK(make({5}, {2}).size() == 1);
}

TEST_CASE("canonical linear interpolator") {
  {
    const auto f = canonical_linear_interpolator(make({-1, 0, 1}, {0, 0, 1}));
    CHECK(f.a0() == 0.0);
    CHECK(f.b0() == 0.0);
    REQUIRE(f.kink_count() == 1);
    CHECK(f.kinks()[0].amplitude == 1.0);
    CHECK(f.kinks()[0].location == 0.0);
  }
  {
    const auto f = canonical_linear_interpolator(make({0, 1, 2}, {0, 1, 2}));
    CHECK(f.a0() == 1.0);
    CHECK(f.b0() == 0.0);
    CHECK(f.kink_count() == 0);
  }
  {
    const auto f = canonical_linear_interpolator(make({0, 1, 2}, {0, 1, 0}));
    CHECK(f.a0() == 1.0);
    CHECK(f.b0() == 0.0);
    REQUIRE(f.kink_count() == 1);
    CHECK(f.kinks()[0].amplitude == -2.0);
    CHECK(f.kinks()[0].location == 1.0);
  }
  CHECK_THROWS_AS((void)canonical_linear_interpolator(make({0}, {0})), InputError);

  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const Dataset d = random_dataset(rng, 2 + t % 9);
    const auto f = canonical_linear_interpolator(d);
    CHECK(max_interpolation_error(d, f) <= 1e-12);
    for (const auto& k : f.kinks()) {
      bool interior = false;
      for (std::size_t i = 1; i + 1 < d.size(); ++i) interior |= k.location == d.x(i);
      CHECK(interior);
    }
  }
}

TEST_CASE("from_slopes examples") {
  {
    const Dataset d = make({-1, 0, 1}, {0, 0, 1});
    const std::vector<double> s{0, 0, 1};
    const auto f = from_slopes(d, s);
    CHECK(f.a0() == 0.0);
    CHECK(f.b0() == 0.0);
    REQUIRE(f.kink_count() == 1);
    CHECK(f.kinks()[0].amplitude == 1.0);
    CHECK(f.kinks()[0].location == 0.0);
  }
  {
    const Dataset d = make({0, 1, 2, 3}, {1, 3, 5, 7});
    const std::vector<double> s{2, 2, 2, 2};
    const auto f = from_slopes(d, s);
    CHECK(f.kink_count() == 0);
    CHECK(f.a0() == 2.0);
    CHECK(f.b0() == 1.0);
  }
  {
    const Dataset d = make({0, 1, 2}, {0, 1, 0});
    const std::vector<double> s{1, 1, -1};
    const auto f = from_slopes(d, s);
    REQUIRE(f.kink_count() == 1);
    CHECK(f.kinks()[0].amplitude == -2.0);
    CHECK(f.kinks()[0].location == 1.0);
  }
}

TEST_CASE("from_slopes rejects inadmissible sequences") {
  const Dataset d = make({0, 1, 2}, {0, 1, 0});
  // Both slopes on segment 0 above delta = 1.
  CHECK_THROWS_AS((void)from_slopes(d, std::vector<double>{2, 1.5, -1}), InputError);
  CHECK_THROWS_AS((void)from_slopes(d, std::vector<double>{1, 1}), InputError);
  CHECK_THROWS_AS((void)from_slopes(make({0}, {0}), std::vector<double>{0}), InputError);
  CHECK_FALSE(is_admissible(d, std::vector<double>{2, 1.5, -1}));
  CHECK(is_admissible(d, std::vector<double>{1, 1, -1}));
}

TEST_CASE("to_slopes examples") {
  const Dataset d = make({-1, 0, 1}, {0, 0, 1});
  const auto s = to_slopes(d, PiecewiseLinearFn(0, 0, {{1, 0}}));
  CHECK(s == SlopeSequence{0, 0, 1});
  const Dataset line = make({-2, 0.5, 3}, {-3, 2, 7});
  const auto a = to_slopes(line, PiecewiseLinearFn(2, 1, {}));
  CHECK(a == SlopeSequence{2, 2, 2});
  CHECK_THROWS_AS((void)to_slopes(d, PiecewiseLinearFn(0, 1, {})), InputError);
  // Two kinks on the same segment.
  const Dataset e = make({0, 1}, {0, 0});
  CHECK_THROWS_AS((void)to_slopes(e, PiecewiseLinearFn(0, 0, {{1, 0.25}, {-1, 0.5}})), InputError);
}

TEST_CASE("slope map round trip on random admissible sequences") {
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Dataset d = random_dataset(rng, 2 + t % 9);
    const SlopeSequence s = random_admissible(d, rng);
    REQUIRE(is_admissible(d, s));
    const auto f = from_slopes(d, s);
    CHECK(f.kink_count() <= d.size() - 1);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::fabs(f(d.x(i)) - d.y(i)) <= 1e-9 * (1 + std::fabs(d.y(i))));
    const auto back = to_slopes(d, f);
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) worst = std::max(worst, std::fabs(back[i] - s[i]) / (1 + std::fabs(s[i])));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("tolerance") {
  const Tolerance tol;
  CHECK(tol.equal(1.0, 1.0 + 1e-10));
  CHECK_FALSE(tol.equal(1.0, 1.0 + 1e-6));
  CHECK(tol.sign_near(1e-12, 1.0) == 0);
  CHECK(tol.sign_near(-1e-3, 1.0) == -1);
}
