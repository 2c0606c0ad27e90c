#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace cllab {

/// Uniform partition of [left, right] into n_cells cells.
///
/// Cell i is [left + i*dx, left + (i+1)*dx). Interfaces are always computed as
/// left + i*dx (the last one is `right` itself), so two grids built from the
/// same arguments produce bit-identical breakpoints.
class Grid1D {
public:
  Grid1D(double left, double right, int n_cells);

  double left() const { return left_; }
  double right() const { return right_; }
  int n_cells() const { return n_cells_; }
  double dx() const { return dx_; }
  double width() const { return right_ - left_; }

  /// x_{i-1/2} for i in [0, n_cells].
  double interface(int i) const;
  double center(int i) const;
  /// Index of the cell containing x, clamped to [0, n_cells - 1].
  int cell_of(double x) const;
  std::vector<double> interfaces() const;

  bool operator==(const Grid1D&) const = default;

private:
  double left_;
  double right_;
  int n_cells_;
  double dx_;
};

/// Affine piece stored by its end values: `left` is the right limit at the
/// segment's left breakpoint, `right` the left limit at its right breakpoint.
struct Segment {
  double left = 0.0;
  double right = 0.0;

  bool operator==(const Segment&) const = default;
};

/// A point of a piecewise-linear graph. Two consecutive points with the same x
/// describe a jump.
struct Point {
  double x;
  double y;
};

/// Piecewise-linear function on the real line with constant extension
/// outside its breakpoint range. Possibly discontinuous at breakpoints, where
/// it is right-continuous (matching half-open cells).
class PiecewiseLinearFn {
public:
  /// The zero function.
  PiecewiseLinearFn() = default;

  PiecewiseLinearFn(std::vector<double> breakpoints, std::vector<Segment> segments,
                    double left_value, double right_value);

  static PiecewiseLinearFn constant(double c);
  /// Builds from a polyline; tails take the first and last y.
  static PiecewiseLinearFn from_points(std::span<const Point> points);
  /// Cell values on the grid, tails equal to the boundary cells.
  static PiecewiseLinearFn piecewise_constant(const Grid1D& grid, std::span<const double> cells);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Segment>& segments() const { return segments_; }
  double left_value() const { return left_value_; }
  double right_value() const { return right_value_; }
  std::size_t segment_count() const { return segments_.size(); }

  double operator()(double x) const;
  double left_limit(double x) const;
  double slope(std::size_t k) const;
  /// Affine value of segment k at x, extrapolated if x lies outside it.
  double segment_value(std::size_t k, double x) const;

  double integral(double a, double b) const;
  double min_value() const;
  double max_value() const;
  bool is_piecewise_constant() const;
  bool is_nondecreasing(double tol = 0.0) const;

  /// Pointwise u + c.
  PiecewiseLinearFn shifted(double c) const;
  /// Merges adjacent pieces with identical affine data (within a relative
  /// tolerance) and drops breakpoints that do not change the function.
  PiecewiseLinearFn canonical(double rel_tol = 1e-13) const;

  /// Calls fn(x0, x1, v0, v1) for every affine piece of the restriction to
  /// [a, b], in increasing order, including the constant tails.
  template <class Fn>
  void for_each_piece(double a, double b, Fn&& fn) const;

private:
  std::vector<double> breakpoints_;
  std::vector<Segment> segments_;
  double left_value_ = 0.0;
  double right_value_ = 0.0;
};

/// Continuous piecewise-quadratic antiderivative of a piecewise-linear
/// integrand g, with E = 0 at the first breakpoint.
///
/// On [x_k, x_{k+1}] with s = x - x_k, w = x_{k+1} - x_k:
///   E(x) = e0 + g0*s + (g1 - g0)/(2w) * s^2
/// Left of the range E is 0; right of it E extends linearly with the
/// right tail of the integrand.
class Primitive {
public:
  struct Piece {
    double e0;  // E at the left breakpoint
    double g0;  // integrand at the left breakpoint (right limit)
    double g1;  // integrand at the right breakpoint (left limit)
  };

  Primitive() = default;
  Primitive(std::vector<double> breakpoints, std::vector<Piece> pieces, double right_slope = 0.0);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

  double operator()(double x) const;
  double derivative(double x) const;
  /// E at the last breakpoint.
  double end_value() const;
  double min() const;
  double max() const;
  /// Exact integral of |E| over the breakpoint range.
  double integral_abs() const;
  double integral() const;
  /// Each piece starts where the previous one ends, to `tol`.
  bool continuous(double tol = 1e-12) const;

private:
  std::vector<double> breakpoints_;
  std::vector<Piece> pieces_;
  double right_slope_ = 0.0;
};

/// Both functions re-expressed on the union of their breakpoints. Breakpoints
/// closer than 1e-14 of the merged range width are treated as one.
std::pair<PiecewiseLinearFn, PiecewiseLinearFn> merge_breakpoints(const PiecewiseLinearFn& u,
                                                                  const PiecewiseLinearFn& v);

/// Union of the breakpoint sets, deduplicated with the tolerance above.
std::vector<double> merged_breakpoints(std::span<const double> a, std::span<const double> b);

/// `f` re-expressed on a superset of its breakpoints.
PiecewiseLinearFn refine(const PiecewiseLinearFn& f, std::span<const double> breakpoints);

/// u - v on the merged breakpoints.
PiecewiseLinearFn difference(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v);

/// Exact cell averages of f on the grid.
std::vector<double> cell_averages(const PiecewiseLinearFn& f, const Grid1D& grid);

/// Piecewise-constant projection onto the grid (tails = boundary cells).
PiecewiseLinearFn project(const PiecewiseLinearFn& f, const Grid1D& grid);

/// E(x) = integral of (u - v) from -inf to x. Requires equal tails and zero
/// total mass difference; otherwise throws UnequalMass.
Primitive primitive_difference(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v);

/// E(x) = integral of (u - v) from a to x, for x in [a, b]. No mass condition.
Primitive primitive_difference_on(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v, double a,
                                  double b);

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

// ---------------------------------------------------------------------------

template <class Fn>
void PiecewiseLinearFn::for_each_piece(double a, double b, Fn&& fn) const {
  if (!(b > a)) return;
  if (breakpoints_.empty()) {
    fn(a, b, left_value_, left_value_);
    return;
  }
  const double first = breakpoints_.front();
  const double last = breakpoints_.back();
  if (a < first) {
    const double e = b < first ? b : first;
    fn(a, e, left_value_, left_value_);
    if (b <= first) return;
    a = first;
  }
  if (a < last) {
    // first segment whose right breakpoint is > a
    std::size_t k = 0;
    {
      std::size_t lo = 0, hi = segments_.size();
      while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (breakpoints_[mid + 1] <= a) lo = mid + 1;
        else hi = mid;
      }
      k = lo;
    }
    for (; k < segments_.size(); ++k) {
      const double x0 = breakpoints_[k];
      const double x1 = breakpoints_[k + 1];
      const double s = a > x0 ? a : x0;
      const double e = b < x1 ? b : x1;
      if (e > s) {
        const double v0 = s == x0 ? segments_[k].left : segment_value(k, s);
        const double v1 = e == x1 ? segments_[k].right : segment_value(k, e);
        fn(s, e, v0, v1);
      }
      if (x1 >= b) return;
    }
    a = last;
  }
  if (b > a) fn(a, b, right_value_, right_value_);
}

} // namespace cllab
