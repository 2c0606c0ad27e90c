#include "cllab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "cllab/errors.hpp"

namespace cllab {

namespace {

const FluxModel::AffineDerivative& require_affine(const FluxModel& flux) {
  if (!flux.affine_derivative())
    throw MissingDerivInverse("flux '" + flux.name() + "' has no affine derivative");
  return *flux.affine_derivative();
}

double left_limit_at(const PiecewiseLinearFn& f, std::size_t k) {
  return k == 0 ? f.left_value() : f.segments()[k - 1].right;
}

double right_limit_at(const PiecewiseLinearFn& f, std::size_t k) {
  return k + 1 == f.breakpoints().size() ? f.right_value() : f.segments()[k].left;
}

// Appends p unless it repeats the previous point exactly.
void push_point(std::vector<Point>& pts, Point p) {
  if (!pts.empty() && pts.back().x == p.x && pts.back().y == p.y) return;
  pts.push_back(p);
}

} // namespace

PiecewiseLinearFn bump_datum() {
  const Point pts[] = {{-0.75, 0.0}, {-0.25, 1.0}, {0.25, 1.0}, {0.5, 0.0}};
  return PiecewiseLinearFn::from_points(pts);
}

PiecewiseLinearFn step_datum() {
  const Point pts[] = {{0.0, 0.0}, {0.0, 1.0}};
  return PiecewiseLinearFn::from_points(pts);
}

double first_shock_time(const PiecewiseLinearFn& datum, const FluxModel& flux) {
  const auto& aff = require_affine(flux);
  double t = std::numeric_limits<double>::infinity();
  const auto& bps = datum.breakpoints();
  for (std::size_t k = 0; k < bps.size(); ++k)
    if (right_limit_at(datum, k) < left_limit_at(datum, k)) return 0.0;
  for (std::size_t k = 0; k < datum.segment_count(); ++k) {
    const auto& s = datum.segments()[k];
    if (s.right < s.left) {
      const double w = bps[k + 1] - bps[k];
      t = std::min(t, w / (aff.a * (s.left - s.right)));
    }
  }
  return t;
}

PiecewiseLinearFn evolve_pw_linear(const PiecewiseLinearFn& datum, const FluxModel& flux, double t) {
  if (t < 0.0) throw std::invalid_argument("evolve_pw_linear: negative time");
  if (t == 0.0) return datum;
  const auto& aff = require_affine(flux);
  const double ts = first_shock_time(datum, flux);
  if (t >= ts) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "t = %.6g is not below the first shock time %.6g", t, ts);
    throw PastShockTime(buf);
  }
  const auto& bps = datum.breakpoints();
  if (bps.empty()) return datum;
  auto speed = [&](double u) { return aff.a * u + aff.b; };
  std::vector<Point> pts;
  pts.reserve(2 * bps.size());
  for (std::size_t k = 0; k < bps.size(); ++k) {
    const double ul = left_limit_at(datum, k);
    const double ur = right_limit_at(datum, k);
    push_point(pts, {bps[k] + speed(ul) * t, ul});
    // An increasing jump opens an affine fan between the two images.
    if (ur != ul) push_point(pts, {bps[k] + speed(ur) * t, ur});
  }
  return PiecewiseLinearFn::from_points(pts);
}

double rarefaction(double t, double x) {
  if (!(t > 0.0)) throw std::invalid_argument("rarefaction: t must be positive");
  if (x < 0.0) return 0.0;
  if (x < t) return x / t;
  return 1.0;
}

PiecewiseLinearFn rarefaction_solution(double t) {
  if (t < 0.0) throw std::invalid_argument("rarefaction_solution: negative time");
  const Point pts[] = {{0.0, 0.0}, {t, 1.0}};
  return PiecewiseLinearFn::from_points(pts);
}

PiecewiseLinearFn exact_step(const PiecewiseLinearFn& v, const FluxModel& flux, double tau) {
  if (!v.is_piecewise_constant())
    throw std::invalid_argument("exact_step: state must be piecewise constant");
  if (tau < 0.0) throw std::invalid_argument("exact_step: negative time");
  if (tau == 0.0) return v;
  const auto& bps = v.breakpoints();

  struct Wave {
    double lo, hi;  // occupied interval at time tau
    double ul, ur;
  };
  std::vector<Wave> waves;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < bps.size(); ++k) {
    const double ul = left_limit_at(v, k);
    const double ur = right_limit_at(v, k);
    if (k + 1 < bps.size()) min_gap = std::min(min_gap, bps[k + 1] - bps[k]);
    if (ul == ur) continue;
    if (ul < ur) {
      const auto& aff = require_affine(flux);
      waves.push_back({bps[k] + (aff.a * ul + aff.b) * tau, bps[k] + (aff.a * ur + aff.b) * tau, ul, ur});
    } else {
      const double sigma = (flux.value(ur) - flux.value(ul)) / (ur - ul);
      const double s = bps[k] + sigma * tau;
      waves.push_back({s, s, ul, ur});
    }
  }
  if (waves.empty()) return v;

  const double tol = 1e-12 * (std::isfinite(min_gap) ? min_gap : 1.0);
  for (std::size_t k = 0; k + 1 < waves.size(); ++k) {
    Wave& a = waves[k];
    Wave& b = waves[k + 1];
    if (a.hi <= b.lo) continue;
    if (a.hi - b.lo > tol) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "waves from neighbouring interfaces meet within tau = %.6g", tau);
      throw WaveInteraction(buf);
    }
    // rounding-level overlap of touching waves
    const double m = 0.5 * (a.hi + b.lo);
    a.hi = std::max(a.lo, m);
    b.lo = std::min(b.hi, m);
    if (a.hi > b.lo) a.hi = b.lo;
  }

  std::vector<Point> pts;
  pts.reserve(2 * waves.size());
  for (const auto& w : waves) {
    push_point(pts, {w.lo, w.ul});
    push_point(pts, {w.hi, w.ur});
  }
  return PiecewiseLinearFn::from_points(pts);
}

PiecewiseLinearFn godunov_composition(const PiecewiseLinearFn& u0, const Grid1D& grid,
                                      const FluxModel& flux, double lambda, int n_steps) {
  if (n_steps < 0) throw std::invalid_argument("godunov_composition: negative step count");
  const double dt = lambda * grid.dx();
  PiecewiseLinearFn v = project(u0, grid);
  for (int n = 0; n < n_steps; ++n) v = project(exact_step(v, flux, dt), grid);
  return v;
}

ExactSolution::ExactSolution(ExactKind kind, PiecewiseLinearFn datum, FluxModel flux)
    : kind_(kind), datum_(std::move(datum)), flux_(std::move(flux)) {
  shock_time_ = first_shock_time(datum_, flux_);
}

ExactSolution ExactSolution::bump() {
  return ExactSolution(ExactKind::Bump, bump_datum(), FluxModel::burgers());
}

ExactSolution ExactSolution::rarefaction_step() {
  return ExactSolution(ExactKind::RarefactionStep, step_datum(), FluxModel::burgers());
}

ExactSolution ExactSolution::custom(PiecewiseLinearFn datum, FluxModel flux) {
  return ExactSolution(ExactKind::Custom, std::move(datum), std::move(flux));
}

PiecewiseLinearFn ExactSolution::at(double t) const {
  if (kind_ == ExactKind::RarefactionStep) return rarefaction_solution(t);
  return evolve_pw_linear(datum_, flux_, t);
}

} // namespace cllab
