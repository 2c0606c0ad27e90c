#include "cllab/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cllab/errors.hpp"

namespace cllab {

// ----------------------------------------------------------------- Grid1D

Grid1D::Grid1D(double left, double right, int n_cells)
    : left_(left), right_(right), n_cells_(n_cells), dx_(0.0) {
  if (!(right > left) || !std::isfinite(left) || !std::isfinite(right))
    throw std::invalid_argument("Grid1D: need finite left < right");
  if (n_cells < 1) throw std::invalid_argument("Grid1D: n_cells must be >= 1");
  dx_ = (right - left) / n_cells;
}

double Grid1D::interface(int i) const {
  if (i >= n_cells_) return right_;
  return left_ + i * dx_;
}

double Grid1D::center(int i) const { return left_ + (i + 0.5) * dx_; }

int Grid1D::cell_of(double x) const {
  const double r = std::floor((x - left_) / dx_);
  if (!(r >= 0.0)) return 0;
  if (r >= n_cells_ - 1) return n_cells_ - 1;
  auto i = static_cast<int>(r);
  // floating-point floor can land one cell off next to an interface
  if (x < interface(i)) --i;
  else if (x >= interface(i + 1)) ++i;
  return std::clamp(i, 0, n_cells_ - 1);
}

std::vector<double> Grid1D::interfaces() const {
  std::vector<double> out(static_cast<std::size_t>(n_cells_) + 1);
  for (int i = 0; i <= n_cells_; ++i) out[static_cast<std::size_t>(i)] = interface(i);
  return out;
}

// --------------------------------------------------------- PiecewiseLinearFn

PiecewiseLinearFn::PiecewiseLinearFn(std::vector<double> breakpoints, std::vector<Segment> segments,
                                     double left_value, double right_value)
    : breakpoints_(std::move(breakpoints)),
      segments_(std::move(segments)),
      left_value_(left_value),
      right_value_(right_value) {
  const std::size_t expected = breakpoints_.empty() ? 0 : breakpoints_.size() - 1;
  if (segments_.size() != expected)
    throw std::invalid_argument("PiecewiseLinearFn: segment count must be breakpoint count - 1");
  for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
    if (!std::isfinite(breakpoints_[k]))
      throw std::invalid_argument("PiecewiseLinearFn: non-finite breakpoint");
    if (k > 0 && !(breakpoints_[k] > breakpoints_[k - 1]))
      throw std::invalid_argument("PiecewiseLinearFn: breakpoints must be strictly increasing");
  }
  if (breakpoints_.empty() && left_value_ != right_value_)
    throw std::invalid_argument("PiecewiseLinearFn: a function without breakpoints is constant");
}

PiecewiseLinearFn PiecewiseLinearFn::constant(double c) { return PiecewiseLinearFn({}, {}, c, c); }

PiecewiseLinearFn PiecewiseLinearFn::from_points(std::span<const Point> points) {
  if (points.empty()) return {};
  std::vector<double> bps;
  std::vector<Segment> segs;
  // Collapse runs of equal x into one breakpoint with left/right limits.
  struct Node {
    double x, ylo, yhi;
  };
  std::vector<Node> nodes;
  for (const auto& p : points) {
    if (!nodes.empty() && p.x == nodes.back().x) {
      nodes.back().yhi = p.y;
    } else {
      if (!nodes.empty() && !(p.x > nodes.back().x))
        throw std::invalid_argument("from_points: x must be nondecreasing");
      nodes.push_back({p.x, p.y, p.y});
    }
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    bps.push_back(nodes[k].x);
    if (k + 1 < nodes.size()) segs.push_back({nodes[k].yhi, nodes[k + 1].ylo});
  }
  return PiecewiseLinearFn(std::move(bps), std::move(segs), nodes.front().ylo, nodes.back().yhi);
}

PiecewiseLinearFn PiecewiseLinearFn::piecewise_constant(const Grid1D& grid,
                                                        std::span<const double> cells) {
  if (cells.size() != static_cast<std::size_t>(grid.n_cells()))
    throw std::invalid_argument("piecewise_constant: cell count does not match grid");
  std::vector<Segment> segs;
  segs.reserve(cells.size());
  for (double c : cells) segs.push_back({c, c});
  return PiecewiseLinearFn(grid.interfaces(), std::move(segs), cells.front(), cells.back());
}

double PiecewiseLinearFn::segment_value(std::size_t k, double x) const {
  const double x0 = breakpoints_[k];
  const double x1 = breakpoints_[k + 1];
  const Segment& s = segments_[k];
  if (s.left == s.right) return s.left;
  return std::lerp(s.left, s.right, (x - x0) / (x1 - x0));
}

double PiecewiseLinearFn::operator()(double x) const {
  if (breakpoints_.empty() || x < breakpoints_.front()) return left_value_;
  if (x >= breakpoints_.back()) return right_value_;
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const auto k = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  if (x == breakpoints_[k]) return segments_[k].left;
  return segment_value(k, x);
}

double PiecewiseLinearFn::left_limit(double x) const {
  if (breakpoints_.empty() || x <= breakpoints_.front()) return left_value_;
  if (x > breakpoints_.back()) return right_value_;
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const auto k = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  if (x == breakpoints_[k + 1]) return segments_[k].right;
  return segment_value(k, x);
}

double PiecewiseLinearFn::slope(std::size_t k) const {
  return (segments_[k].right - segments_[k].left) / (breakpoints_[k + 1] - breakpoints_[k]);
}

double PiecewiseLinearFn::integral(double a, double b) const {
  if (b < a) return -integral(b, a);
  double sum = 0.0, comp = 0.0;
  for_each_piece(a, b, [&](double x0, double x1, double v0, double v1) {
    const double term = (x1 - x0) * 0.5 * (v0 + v1);
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  });
  return sum + comp;
}

double PiecewiseLinearFn::min_value() const {
  double m = std::min(left_value_, right_value_);
  for (const auto& s : segments_) m = std::min({m, s.left, s.right});
  return m;
}

double PiecewiseLinearFn::max_value() const {
  double m = std::max(left_value_, right_value_);
  for (const auto& s : segments_) m = std::max({m, s.left, s.right});
  return m;
}

bool PiecewiseLinearFn::is_piecewise_constant() const {
  return std::all_of(segments_.begin(), segments_.end(),
                     [](const Segment& s) { return s.left == s.right; });
}

bool PiecewiseLinearFn::is_nondecreasing(double tol) const {
  double prev = left_value_;
  for (const auto& s : segments_) {
    if (s.left < prev - tol || s.right < s.left - tol) return false;
    prev = s.right;
  }
  return right_value_ >= prev - tol;
}

PiecewiseLinearFn PiecewiseLinearFn::shifted(double c) const {
  auto segs = segments_;
  for (auto& s : segs) {
    s.left += c;
    s.right += c;
  }
  return PiecewiseLinearFn(breakpoints_, std::move(segs), left_value_ + c, right_value_ + c);
}

PiecewiseLinearFn PiecewiseLinearFn::canonical(double rel_tol) const {
  if (breakpoints_.empty()) return *this;
  double scale = 0.0;
  for (const auto& s : segments_) scale = std::max({scale, std::abs(s.left), std::abs(s.right)});
  scale = std::max({scale, std::abs(left_value_), std::abs(right_value_)});
  const double tol = rel_tol * std::max(scale, std::numeric_limits<double>::min());
  auto same = [tol](double a, double b) { return std::abs(a - b) <= tol; };

  // Walk the pieces (tails included) and keep only breakpoints where the
  // affine data actually change.
  struct Run {
    double x0, x1, v0, v1;
  };
  std::vector<Run> runs;
  for (std::size_t k = 0; k < segments_.size(); ++k)
    runs.push_back({breakpoints_[k], breakpoints_[k + 1], segments_[k].left, segments_[k].right});

  std::vector<Run> merged;
  for (const auto& r : runs) {
    if (!merged.empty()) {
      Run& m = merged.back();
      const bool continuous = same(m.v1, r.v0);
      const double sm = (m.v1 - m.v0) / (m.x1 - m.x0);
      const double sr = (r.v1 - r.v0) / (r.x1 - r.x0);
      const double span = r.x1 - m.x0;
      if (continuous && std::abs(sm - sr) * span <= tol) {
        m.x1 = r.x1;
        m.v1 = r.v1;
        continue;
      }
    }
    merged.push_back(r);
  }
  // Constant pieces equal to the adjacent tail are absorbed by the tail.
  std::size_t lo = 0, hi = merged.size();
  while (lo < hi && same(merged[lo].v0, left_value_) && same(merged[lo].v1, left_value_)) ++lo;
  while (hi > lo && same(merged[hi - 1].v0, right_value_) && same(merged[hi - 1].v1, right_value_))
    --hi;

  std::vector<double> bps;
  std::vector<Segment> segs;
  if (lo == hi) {
    // Only the tails remain: a single jump or a constant.
    if (same(left_value_, right_value_)) return constant(left_value_);
    const double x = lo < merged.size() ? merged[lo].x0 : breakpoints_.back();
    return PiecewiseLinearFn({x}, {}, left_value_, right_value_);
  }
  for (std::size_t k = lo; k < hi; ++k) {
    bps.push_back(merged[k].x0);
    segs.push_back({merged[k].v0, merged[k].v1});
  }
  bps.push_back(merged[hi - 1].x1);
  return PiecewiseLinearFn(std::move(bps), std::move(segs), left_value_, right_value_);
}

// -------------------------------------------------------------- Primitive

Primitive::Primitive(std::vector<double> breakpoints, std::vector<Piece> pieces, double right_slope)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)), right_slope_(right_slope) {
  const std::size_t expected = breakpoints_.empty() ? 0 : breakpoints_.size() - 1;
  if (pieces_.size() != expected)
    throw std::invalid_argument("Primitive: piece count must be breakpoint count - 1");
}

namespace {

double piece_value(const Primitive::Piece& p, double w, double s) {
  return p.e0 + s * (p.g0 + 0.5 * s * (p.g1 - p.g0) / w);
}

// Integral of E over [0, s] for one piece.
double piece_antiderivative(const Primitive::Piece& p, double w, double s) {
  const double c = (p.g1 - p.g0) / w;
  return s * (p.e0 + s * (0.5 * p.g0 + s * c / 6.0));
}

// Exact integral of |E| over [0, w]: split at the real roots of the
// quadratic and sum the absolute values of the signed integrals.
double piece_abs_integral(const Primitive::Piece& p, double w) {
  const double a = 0.5 * (p.g1 - p.g0) / w;  // E = e0 + g0 s + a s^2
  const double b = p.g0;
  const double c = p.e0;
  double roots[2];
  int nroots = 0;
  const double scale_lin = std::abs(b) * w + std::abs(c);
  if (std::abs(a) * w * w <= 1e-15 * scale_lin || a == 0.0) {
    if (b != 0.0) roots[nroots++] = -c / b;
  } else {
    const double disc = b * b - 4.0 * a * c;
    const double disc_scale = b * b + std::abs(4.0 * a * c);
    if (disc > 1e-28 * disc_scale) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (b + std::copysign(sq, b));
      if (q != 0.0) {
        roots[nroots++] = q / a;
        roots[nroots++] = c / q;
      } else {
        roots[nroots++] = -b / (2.0 * a);
      }
    }
    // otherwise no sign change (complex roots or tangency)
  }
  double cuts[4];
  int n = 0;
  cuts[n++] = 0.0;
  if (nroots == 2 && roots[1] < roots[0]) std::swap(roots[0], roots[1]);
  for (int k = 0; k < nroots; ++k)
    if (roots[k] > 0.0 && roots[k] < w) cuts[n++] = roots[k];
  cuts[n++] = w;
  double total = 0.0;
  double prev = 0.0;
  for (int k = 1; k < n; ++k) {
    const double cur = piece_antiderivative(p, w, cuts[k]);
    total += std::abs(cur - prev);
    prev = cur;
  }
  return total;
}

} // namespace

double Primitive::operator()(double x) const {
  if (breakpoints_.empty() || x <= breakpoints_.front()) return 0.0;
  if (x >= breakpoints_.back()) return end_value() + right_slope_ * (x - breakpoints_.back());
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const auto k = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  return piece_value(pieces_[k], breakpoints_[k + 1] - breakpoints_[k], x - breakpoints_[k]);
}

double Primitive::derivative(double x) const {
  if (breakpoints_.empty() || x < breakpoints_.front()) return 0.0;
  if (x >= breakpoints_.back()) return right_slope_;
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const auto k = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  const double w = breakpoints_[k + 1] - breakpoints_[k];
  return std::lerp(pieces_[k].g0, pieces_[k].g1, (x - breakpoints_[k]) / w);
}

double Primitive::end_value() const {
  if (pieces_.empty()) return 0.0;
  const auto& p = pieces_.back();
  const double w = breakpoints_.back() - breakpoints_[breakpoints_.size() - 2];
  return piece_value(p, w, w);
}

double Primitive::min() const {
  double m = 0.0;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& p = pieces_[k];
    const double w = breakpoints_[k + 1] - breakpoints_[k];
    m = std::min({m, p.e0, piece_value(p, w, w)});
    const double c = (p.g1 - p.g0) / w;
    if (c > 0.0) {
      const double s = -p.g0 / c;
      if (s > 0.0 && s < w) m = std::min(m, piece_value(p, w, s));
    }
  }
  return m;
}

double Primitive::max() const {
  double m = 0.0;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& p = pieces_[k];
    const double w = breakpoints_[k + 1] - breakpoints_[k];
    m = std::max({m, p.e0, piece_value(p, w, w)});
    const double c = (p.g1 - p.g0) / w;
    if (c < 0.0) {
      const double s = -p.g0 / c;
      if (s > 0.0 && s < w) m = std::max(m, piece_value(p, w, s));
    }
  }
  return m;
}

double Primitive::integral_abs() const {
  std::vector<double> parts;
  parts.reserve(pieces_.size());
  for (std::size_t k = 0; k < pieces_.size(); ++k)
    parts.push_back(piece_abs_integral(pieces_[k], breakpoints_[k + 1] - breakpoints_[k]));
  return compensated_sum(parts);
}

double Primitive::integral() const {
  std::vector<double> parts;
  parts.reserve(pieces_.size());
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const double w = breakpoints_[k + 1] - breakpoints_[k];
    parts.push_back(piece_antiderivative(pieces_[k], w, w));
  }
  return compensated_sum(parts);
}

bool Primitive::continuous(double tol) const {
  double scale = 0.0;
  for (const auto& p : pieces_) scale = std::max(scale, std::abs(p.e0));
  for (std::size_t k = 0; k + 1 < pieces_.size(); ++k) {
    const double w = breakpoints_[k + 1] - breakpoints_[k];
    if (std::abs(piece_value(pieces_[k], w, w) - pieces_[k + 1].e0) > tol * std::max(1.0, scale))
      return false;
  }
  return true;
}

// ------------------------------------------------------------ operations

double compensated_sum(std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

std::vector<double> merged_breakpoints(std::span<const double> a, std::span<const double> b) {
  std::vector<double> all;
  all.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(all));
  if (all.empty()) return all;
  const double width = all.back() - all.front();
  const double tol =
      width > 0.0 ? 1e-14 * width : 1e-14 * std::max(1.0, std::abs(all.front()));
  std::vector<double> out;
  out.reserve(all.size());
  for (double x : all)
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  return out;
}

PiecewiseLinearFn refine(const PiecewiseLinearFn& f, std::span<const double> bps) {
  if (bps.empty()) return f;
  const auto& fb = f.breakpoints();
  std::vector<Segment> segs;
  segs.reserve(bps.size() - 1);
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    const double x0 = bps[k];
    const double x1 = bps[k + 1];
    const double mid = 0.5 * (x0 + x1);
    if (fb.empty() || mid < fb.front()) {
      segs.push_back({f.left_value(), f.left_value()});
    } else if (mid >= fb.back()) {
      segs.push_back({f.right_value(), f.right_value()});
    } else {
      const auto it = std::upper_bound(fb.begin(), fb.end(), mid);
      const auto j = static_cast<std::size_t>(it - fb.begin()) - 1;
      const auto& s = f.segments()[j];
      // exact end values when the refinement keeps the original breakpoint
      const double v0 = x0 == fb[j] ? s.left : f.segment_value(j, x0);
      const double v1 = x1 == fb[j + 1] ? s.right : f.segment_value(j, x1);
      segs.push_back({v0, v1});
    }
  }
  return PiecewiseLinearFn(std::vector<double>(bps.begin(), bps.end()), std::move(segs),
                           f.left_value(), f.right_value());
}

std::pair<PiecewiseLinearFn, PiecewiseLinearFn> merge_breakpoints(const PiecewiseLinearFn& u,
                                                                  const PiecewiseLinearFn& v) {
  if (u.breakpoints() == v.breakpoints()) return {u, v};
  const auto bps = merged_breakpoints(u.breakpoints(), v.breakpoints());
  return {refine(u, bps), refine(v, bps)};
}

PiecewiseLinearFn difference(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v) {
  auto [ru, rv] = merge_breakpoints(u, v);
  std::vector<Segment> segs = ru.segments();
  for (std::size_t k = 0; k < segs.size(); ++k) {
    segs[k].left -= rv.segments()[k].left;
    segs[k].right -= rv.segments()[k].right;
  }
  const double lt = ru.left_value() - rv.left_value();
  const double rt = ru.right_value() - rv.right_value();
  if (ru.breakpoints().empty()) return PiecewiseLinearFn::constant(lt);
  return PiecewiseLinearFn(ru.breakpoints(), std::move(segs), lt, rt);
}

std::vector<double> cell_averages(const PiecewiseLinearFn& f, const Grid1D& grid) {
  std::vector<double> cells(static_cast<std::size_t>(grid.n_cells()));
  for (int i = 0; i < grid.n_cells(); ++i) {
    const double a = grid.interface(i);
    const double b = grid.interface(i + 1);
    int count = 0;
    double only = 0.0;
    double sum = 0.0;
    double comp = 0.0;
    f.for_each_piece(a, b, [&](double x0, double x1, double v0, double v1) {
      ++count;
      only = v0 == v1 ? v0 : std::numeric_limits<double>::quiet_NaN();
      const double term = (x1 - x0) * 0.5 * (v0 + v1);
      const double t = sum + term;
      comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
      sum = t;
    });
    // a constant that fills the whole cell is its own average, exactly
    cells[static_cast<std::size_t>(i)] =
        (count == 1 && !std::isnan(only)) ? only : (sum + comp) / (b - a);
  }
  return cells;
}

PiecewiseLinearFn project(const PiecewiseLinearFn& f, const Grid1D& grid) {
  const auto cells = cell_averages(f, grid);
  return PiecewiseLinearFn::piecewise_constant(grid, cells);
}

namespace {

Primitive integrate_difference(const PiecewiseLinearFn& ru, const PiecewiseLinearFn& rv,
                               std::vector<double> bps, double right_slope) {
  std::vector<Primitive::Piece> pieces;
  if (bps.size() < 2) return Primitive(std::move(bps), {}, right_slope);
  pieces.reserve(bps.size() - 1);
  double e = 0.0, comp = 0.0;
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    const double x0 = bps[k];
    const double x1 = bps[k + 1];
    const double mid = 0.5 * (x0 + x1);
    double gu0, gu1, gv0, gv1;
    auto ends = [&](const PiecewiseLinearFn& f, double& g0, double& g1) {
      const auto& fb = f.breakpoints();
      if (fb.empty() || mid < fb.front()) {
        g0 = g1 = f.left_value();
      } else if (mid >= fb.back()) {
        g0 = g1 = f.right_value();
      } else {
        const auto it = std::upper_bound(fb.begin(), fb.end(), mid);
        const auto j = static_cast<std::size_t>(it - fb.begin()) - 1;
        g0 = x0 == fb[j] ? f.segments()[j].left : f.segment_value(j, x0);
        g1 = x1 == fb[j + 1] ? f.segments()[j].right : f.segment_value(j, x1);
      }
    };
    ends(ru, gu0, gu1);
    ends(rv, gv0, gv1);
    const double g0 = gu0 - gv0;
    const double g1 = gu1 - gv1;
    pieces.push_back({e + comp, g0, g1});
    const double term = (x1 - x0) * 0.5 * (g0 + g1);
    const double t = e + term;
    comp += std::abs(e) >= std::abs(term) ? (e - t) + term : (term - t) + e;
    e = t;
  }
  return Primitive(std::move(bps), std::move(pieces), right_slope);
}

double data_scale(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v) {
  return std::max({std::abs(u.min_value()), std::abs(u.max_value()), std::abs(v.min_value()),
                   std::abs(v.max_value())});
}

} // namespace

Primitive primitive_difference(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v) {
  const double scale = data_scale(u, v);
  const double tail_tol = 1e-10 * std::max(scale, std::numeric_limits<double>::min());
  if (std::abs(u.left_value() - v.left_value()) > tail_tol ||
      std::abs(u.right_value() - v.right_value()) > tail_tol)
    throw UnequalMass("primitive_difference: u - v is not compactly supported (tails differ)");
  auto bps = merged_breakpoints(u.breakpoints(), v.breakpoints());
  if (bps.size() < 2) return Primitive(std::move(bps), {});
  const double width = bps.back() - bps.front();
  Primitive e = integrate_difference(u, v, bps, 0.0);
  const double mass_tol = 1e-10 * width * std::max(scale, std::numeric_limits<double>::min());
  if (std::abs(e.end_value()) > mass_tol)
    throw UnequalMass("primitive_difference: integral of u - v is " + std::to_string(e.end_value()) +
                      ", W1 is undefined");
  return e;
}

Primitive primitive_difference_on(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v, double a,
                                  double b) {
  if (!(b > a)) throw std::invalid_argument("primitive_difference_on: need a < b");
  const auto all = merged_breakpoints(u.breakpoints(), v.breakpoints());
  std::vector<double> inner{a};
  for (double x : all)
    if (x > a && x < b) inner.push_back(x);
  inner.push_back(b);
  const double tol = 1e-14 * (b - a);
  // drop interior points that collide with the window ends
  std::vector<double> bps;
  for (double x : inner)
    if (bps.empty() || x - bps.back() > tol) bps.push_back(x);
  if (bps.back() != b) bps.back() = b;
  return integrate_difference(u, v, std::move(bps), u.right_value() - v.right_value());
}

} // namespace cllab
