#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "cllab/core.hpp"
#include "cllab/errors.hpp"
#include "cllab/exact.hpp"
#include "oracles.hpp"

using namespace cllab;

TEST_CASE("grid geometry") {
  const Grid1D g(-1.0, 1.0, 32);
  CHECK(g.dx() == 0.0625);
  CHECK(g.interface(0) == -1.0);
  CHECK(g.interface(32) == 1.0);
  CHECK(g.interface(4) == -0.75);
  CHECK(g.center(16) == 0.03125);
  CHECK(g.cell_of(-5.0) == 0);
  CHECK(g.cell_of(5.0) == 31);
  CHECK(g.cell_of(0.0) == 16);
  CHECK(g.interfaces().size() == 33);
  CHECK_THROWS_AS(Grid1D(1.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(Grid1D(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("interfaces are reproducible bit for bit") {
  const Grid1D a(-1.0, 1.0, 96), b(-1.0, 1.0, 96);
  CHECK(a.interfaces() == b.interfaces());
  CHECK(a == b);
}

TEST_CASE("piecewise-linear construction and evaluation") {
  const Point pts[] = {{0.0, 0.0}, {1.0, 2.0}, {1.0, 5.0}, {3.0, 5.0}};
  const auto f = PiecewiseLinearFn::from_points(pts);
  CHECK(f.breakpoints().size() == 3);
  CHECK(f(-1.0) == 0.0);
  CHECK(f(0.5) == doctest::Approx(1.0));
  CHECK(f(1.0) == 5.0);
  CHECK(f.left_limit(1.0) == doctest::Approx(2.0));
  CHECK(f(10.0) == 5.0);
  CHECK(f.slope(0) == doctest::Approx(2.0));
  CHECK(f.integral(0.0, 3.0) == doctest::Approx(1.0 + 10.0));
  CHECK(f.integral(-2.0, 0.0) == 0.0);
  CHECK(f.max_value() == 5.0);
  CHECK(f.min_value() == 0.0);
  CHECK(f.is_nondecreasing());
  CHECK_FALSE(f.is_piecewise_constant());
  CHECK(f.shifted(1.0)(0.5) == doctest::Approx(2.0));

  CHECK_THROWS(PiecewiseLinearFn({0.0, 0.0}, {{1.0, 1.0}}, 0.0, 0.0));
  CHECK_THROWS(PiecewiseLinearFn({0.0, 1.0}, {}, 0.0, 0.0));
  const Point bad[] = {{1.0, 0.0}, {0.0, 1.0}};
  CHECK_THROWS(PiecewiseLinearFn::from_points(bad));
}

TEST_CASE("canonical form merges collinear pieces without changing values") {
  const Point pts[] = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}, {3.0, 2.0}, {4.0, 2.0}};
  const auto f = PiecewiseLinearFn::from_points(pts);
  const auto c = f.canonical();
  // the last piece equals the right tail, so only 0 and 2 remain
  CHECK(c.breakpoints().size() == 2);
  for (double x = -0.5; x < 4.5; x += 0.125) CHECK(c(x) == doctest::Approx(f(x)));
}

TEST_CASE("projection examples") {
  const Grid1D g(-1.0, 1.0, 32);
  const auto c = project(PiecewiseLinearFn::constant(0.37), g);
  for (const auto& s : c.segments()) CHECK(s.left == 0.37);

  const auto bump = cell_averages(bump_datum(), g);
  CHECK(bump[4] == doctest::Approx(0.0625).epsilon(1e-14));
  CHECK(bump[4] == doctest::Approx(2.0 * -0.71875 + 1.5).epsilon(1e-14));

  const Grid1D straddle(-1.5, 1.5, 3);
  const auto st = cell_averages(step_datum(), straddle);
  CHECK(st[0] == 0.0);
  CHECK(st[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(st[2] == 1.0);
}

TEST_CASE("projection is idempotent, mass preserving and monotone") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    const auto f = oracle::random_nondecreasing(rng);
    const Grid1D g(-1.0, 1.0, 5 + k % 40);
    const auto p = project(f, g);
    CHECK(project(p, g).segments() == p.segments());
    const double m = f.integral(-1.0, 1.0);
    CHECK(std::abs(p.integral(-1.0, 1.0) - m) <= 1e-12 * std::max(1.0, std::abs(m)));

    // pointwise order carries over to the cell averages
    const Point hat[] = {{-0.5, 0.0}, {0.0, 0.3}, {0.2, 0.3}, {0.6, 0.0}};
    const auto d = PiecewiseLinearFn::from_points(hat);
    const auto lower = difference(f, d);  // f - d <= f
    const auto cl = cell_averages(lower, g);
    const auto cf = cell_averages(f, g);
    for (std::size_t i = 0; i < cl.size(); ++i) CHECK(cl[i] <= cf[i] + 1e-15);
  }
}

TEST_CASE("primitive difference examples") {
  const Point a[] = {{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}};
  const auto u = PiecewiseLinearFn::from_points(a);
  CHECK(primitive_difference(u, u).integral_abs() == 0.0);

  const double d = 0.25;
  const Point b[] = {{d, 0.0}, {d, 1.0}, {1.0 + d, 1.0}, {1.0 + d, 0.0}};
  const auto v = PiecewiseLinearFn::from_points(b);
  const auto e = primitive_difference(u, v);
  CHECK(e(0.1) == doctest::Approx(0.1));
  CHECK(e(0.5) == doctest::Approx(d));
  CHECK(e(1.1) == doctest::Approx(d - 0.1));
  CHECK(std::abs(e(2.0)) < 1e-15);
  CHECK(e.continuous());

  // straddling cell of width h around the jump: peak h/4 at the jump
  const double h = 0.2;
  const Grid1D g(-1.0 - h / 2, 1.0 + h / 2, 11);
  const auto p = project(step_datum(), g);
  const auto tri = primitive_difference(p, step_datum());
  CHECK(tri(0.0) == doctest::Approx(h / 4).epsilon(1e-12));
  CHECK(tri(-h / 4) == doctest::Approx(h / 8).epsilon(1e-12));
  CHECK(tri.max() == doctest::Approx(h / 4).epsilon(1e-12));
  CHECK(tri.min() >= -1e-15);
}

TEST_CASE("primitive difference rejects unequal mass and tails") {
  const Point a[] = {{0.0, 0.0}, {0.5, 1.0}, {1.0, 0.0}};
  const Point b[] = {{0.0, 0.0}, {0.5, 2.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(primitive_difference(PiecewiseLinearFn::from_points(a), PiecewiseLinearFn::from_points(b)),
                  UnequalMass);
  CHECK_THROWS_AS(primitive_difference(step_datum(), PiecewiseLinearFn::constant(0.0)), UnequalMass);
  // windowed version has no mass condition
  const auto e = primitive_difference_on(step_datum(), PiecewiseLinearFn::constant(0.0), -1.0, 1.0);
  CHECK(e(1.0) == doctest::Approx(1.0));
}

TEST_CASE("breakpoint merge") {
  const Point a[] = {{0.0, 0.0}, {1.0, 1.0}};
  const Point b[] = {{0.5, 0.0}, {2.0, 1.0}};
  const auto u = PiecewiseLinearFn::from_points(a);
  const auto v = PiecewiseLinearFn::from_points(b);
  {
    auto [ru, rv] = merge_breakpoints(u, u);
    CHECK(ru.breakpoints() == u.breakpoints());
  }
  auto [ru, rv] = merge_breakpoints(u, v);
  CHECK(ru.breakpoints() == std::vector<double>{0.0, 0.5, 1.0, 2.0});
  CHECK(rv.breakpoints() == ru.breakpoints());
  for (double x = -1.0; x < 3.0; x += 0.0625) {
    CHECK(ru(x) == doctest::Approx(u(x)));
    CHECK(rv(x) == doctest::Approx(v(x)));
  }

  // two grids that differ by rounding noise share their interfaces
  const Grid1D g1(-1.0, 1.0, 10);
  std::vector<double> noisy = g1.interfaces();
  for (auto& x : noisy) x = std::nextafter(x, 10.0);
  const auto merged = merged_breakpoints(g1.interfaces(), noisy);
  CHECK(merged.size() == g1.interfaces().size());
}

TEST_CASE("compensated summation") {
  std::vector<double> v{1.0, 1e100, 1.0, -1e100};
  CHECK(compensated_sum(v) == 2.0);
}
