#include "cllab/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "cllab/errors.hpp"
#include "cllab/exact.hpp"
#include "cllab/metrics.hpp"

namespace cllab {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

struct Node {
  double x, ylo, yhi;
};

std::vector<Node> nodes_of(const PiecewiseLinearFn& u) {
  std::vector<Node> nodes;
  const auto& bps = u.breakpoints();
  const auto& segs = u.segments();
  for (std::size_t k = 0; k < bps.size(); ++k)
    nodes.push_back({bps[k], k == 0 ? u.left_value() : segs[k - 1].right,
                     k + 1 == bps.size() ? u.right_value() : segs[k].left});
  return nodes;
}

} // namespace

PiecewiseLinearFn truncate_tilde(const PiecewiseLinearFn& u, const TildeTruncation& trunc, double t) {
  const double xc = trunc.cut(t);
  const double M = trunc.plateau_value;
  const double at_cut = u(xc);
  if (std::abs(at_cut - M) > 1e-12 * std::max(1.0, std::abs(M))) {
    throw PlateauViolated(fmt("value %.12g at the cut x = %.12g differs from the plateau value %.12g",
                              at_cut, xc, M));
  }
  std::vector<Point> pts;
  for (const auto& n : nodes_of(u)) {
    if (!(n.x < xc)) break;
    pts.push_back({n.x, n.ylo});
    if (n.yhi != n.ylo) pts.push_back({n.x, n.yhi});
  }
  pts.push_back({xc, u.left_limit(xc)});
  pts.push_back({xc, M});
  return PiecewiseLinearFn::from_points(pts);
}

double per_step_projection_error(const PiecewiseLinearFn& v, const Grid1D& grid) {
  return w1_distance(project(v, grid), v);
}

double prop32_formula(double beta1, double beta2, double lambda, double dx, double dt, double tv) {
  return 0.5 * dx * dt * (1.0 - beta1 * lambda) * beta2 * tv;
}

double prop32_bound(double beta1, double beta2, double lambda, double dx, double dt, double tv) {
  if (beta2 < 0.0) throw std::invalid_argument("prop32_bound: beta2 must be nonnegative");
  if (2.0 * beta1 * lambda > 1.0 + 1e-12)
    throw CflViolation(fmt("lambda = %.6g exceeds 1/(2 beta1) = %.6g", lambda, 0.5 / beta1));
  return prop32_formula(beta1, beta2, lambda, dx, dt, tv);
}

PlateauShape analyze_plateau_shape(const PiecewiseLinearFn& u) {
  const double M = u.max_value();
  const double m = u.min_value();
  const double tol = 1e-12 * std::max(1.0, std::abs(M));
  if (!(M - m > tol)) throw ShapeError("datum is constant");
  if (std::abs(u.right_value() - M) <= tol)
    throw ShapeError("datum keeps its maximum up to +infinity; no finite plateau to cut");
  if (std::abs(u.left_value() - M) <= tol) throw ShapeError("datum starts at its maximum");
  const auto nodes = nodes_of(u);
  auto is_max = [&](double y) { return std::abs(y - M) <= tol; };
  std::size_t first = nodes.size(), last = 0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (is_max(nodes[k].ylo) || is_max(nodes[k].yhi)) {
      if (first == nodes.size()) first = k;
      last = k;
    }
  }
  if (first == nodes.size() || first == last)
    throw ShapeError("datum has no plateau of positive width at its maximum");
  const auto& segs = u.segments();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& n = nodes[k];
    if (k < first || (k == first && !is_max(n.ylo))) {
      if (n.yhi < n.ylo - tol) throw ShapeError("datum decreases before its plateau");
    }
    if (k < first && segs[k].right < segs[k].left - tol)
      throw ShapeError("datum decreases before its plateau");
    if (k >= first && k < last && !(is_max(segs[k].left) && is_max(segs[k].right)))
      throw ShapeError("datum leaves its maximum inside the plateau");
    if (k > last && n.yhi > n.ylo + tol) throw ShapeError("datum increases after its plateau");
    if (k >= last && k < segs.size() && segs[k].right > segs[k].left + tol)
      throw ShapeError("datum increases after its plateau");
  }
  return {m, M, nodes[first].x, nodes[last].x};
}

double default_x_star(const PlateauShape& shape, double speed, double lambda, double t_final,
                      double dx) {
  const double lo = shape.x0 + t_final * (1.0 / lambda - speed);
  const double hi = shape.xM - speed * t_final;
  if (hi - lo > 2.0 * dx) return 0.5 * (lo + hi);
  return 0.5 * (shape.x0 + shape.xM);
}

Certificate build_certificate(const PiecewiseLinearFn& u0, const Grid1D& grid, const FluxModel& flux,
                              double lambda, double t_final, const CertificateOptions& options) {
  if (options.scheme != FluxKind::Godunov)
    throw SchemeUnsupported("certificates need the Godunov scheme, got '" +
                            std::string(to_string(options.scheme)) + "'");
  if (t_final < 0.0) throw ConfigError("certificate: negative final time");

  const PiecewiseLinearFn u = u0.shifted(options.shift);
  const PlateauShape shape = analyze_plateau_shape(u);
  const Range range{shape.min_value, shape.plateau_value};
  const DerivBounds bounds = flux.deriv_bounds(range);
  if (2.0 * bounds.beta1 * lambda > 1.0 + 1e-12)
    throw CflViolation(fmt("lambda = %.6g exceeds 1/(2 beta1) = %.6g", lambda, 0.5 / bounds.beta1));

  Certificate c;
  c.n_cells = grid.n_cells();
  c.dx = grid.dx();
  c.lambda = lambda;
  c.dt = lambda * grid.dx();
  c.t_final = t_final;
  c.shift = options.shift;
  c.beta1 = bounds.beta1;
  c.beta2 = bounds.beta2;

  const double speed = flux.derivative(shape.plateau_value);
  c.x_star = options.x_star ? *options.x_star
                            : default_x_star(shape, speed, lambda, t_final, grid.dx());
  if (!(c.x_star > shape.x0 && c.x_star < shape.xM))
    throw ConfigError(fmt("x_star = %.12g must lie strictly inside the plateau (%.12g, %.12g)",
                          c.x_star, shape.x0, shape.xM));
  const TildeTruncation trunc{c.x_star, shape.plateau_value, speed};
  if (trunc.cut(t_final) > grid.right() - grid.dx())
    throw ConfigError("certificate: the cut leaves the grid before the final time");

  const double scale = std::max(std::abs(shape.min_value), std::abs(shape.plateau_value));
  c.slack = 1e-10 * std::max(scale, 1.0) * grid.width() * grid.width();

  const PiecewiseLinearFn tilde0 = truncate_tilde(u, trunc, 0.0);
  c.tv = total_variation(tilde0);
  c.prop32_per_step = c.beta2 > 0.0
                          ? prop32_bound(c.beta1, c.beta2, lambda, c.dx, c.dt, c.tv)
                          : 0.0;

  c.projection_min = std::numeric_limits<double>::infinity();
  c.ordering_min = std::numeric_limits<double>::infinity();
  auto check_projection = [&](const PiecewiseLinearFn& vt, const PiecewiseLinearFn& exact_t) {
    const PiecewiseLinearFn pv = project(vt, grid);
    const Primitive e_proj = primitive_difference(pv, vt);
    c.projection_min = std::min(c.projection_min, e_proj.min());
    const Primitive e_pre = primitive_difference(vt, exact_t);
    const Primitive e_post = primitive_difference(pv, exact_t);
    if (e_pre.min() >= -c.slack) c.ordering_min = std::min(c.ordering_min, e_post.min());
    c.per_step.push_back(e_proj.integral_abs());
  };

  // n = 0: projection of the truncated datum
  check_projection(tilde0, tilde0);

  const long full = static_cast<long>(std::floor(t_final / c.dt * (1.0 + 1e-12)));
  PiecewiseLinearFn w = project(u, grid);
  double t = 0.0;
  for (long n = 1; n <= full; ++n) {
    const PiecewiseLinearFn v = exact_step(w, flux, c.dt);
    t = static_cast<double>(n) * c.dt;
    const PiecewiseLinearFn vt = truncate_tilde(v, trunc, t);
    const PiecewiseLinearFn exact_t = truncate_tilde(evolve_pw_linear(u, flux, t), trunc, t);
    check_projection(vt, exact_t);
    w = project(v, grid);
  }
  c.steps = static_cast<int>(full);
  c.t_last_projection = t;

  PiecewiseLinearFn numeric_T = w;
  const double rest = t_final - t;
  if (rest > 1e-10 * c.dt) {
    numeric_T = exact_step(w, flux, rest);
    c.final_tau = rest;
  }
  (void)truncate_tilde(numeric_T, trunc, t_final);

  c.sum = compensated_sum(c.per_step);
  c.thm31_bound =
      c.beta2 > 0.0
          ? thm31_bound_value(c.beta1, c.beta2, lambda, c.t_last_projection, c.tv, c.dx)
          : 0.0;

  const PiecewiseLinearFn exact_T = evolve_pw_linear(u, flux, t_final);
  c.measured_w1 = w1_distance_on(exact_T, numeric_T, grid.left(), grid.right());
  const double unshifted = w1_distance_on(exact_T.shifted(-options.shift),
                                          numeric_T.shifted(-options.shift), grid.left(), grid.right());
  c.shift_invariance_error = std::abs(unshifted - c.measured_w1);

  if (c.measured_w1 < c.sum - c.slack)
    c.failures.push_back(fmt("measured W1 %.12g is below the projection-error sum %.12g",
                             c.measured_w1, c.sum));
  if (c.beta2 > 0.0) {
    for (std::size_t n = 1; n < c.per_step.size(); ++n)
      if (c.per_step[n] < c.prop32_per_step - c.slack)
        c.failures.push_back(fmt("step %.0f: projection error %.12g below the per-step bound %.12g",
                                 static_cast<double>(n), c.per_step[n], c.prop32_per_step));
    const double chain = static_cast<double>(c.per_step.size()) * c.prop32_per_step;
    if (c.sum < chain - c.slack)
      c.failures.push_back(fmt("sum %.12g below (N+1) times the per-step bound %.12g", c.sum, chain));
  }
  if (c.projection_min < -c.slack)
    c.failures.push_back(fmt("projection primitive reaches %.3g < 0", c.projection_min));
  if (c.ordering_min < -c.slack)
    c.failures.push_back(fmt("primitive difference turns negative after projection (%.3g)",
                             c.ordering_min));
  if (c.shift_invariance_error > c.slack)
    c.failures.push_back(fmt("W1 changes by %.3g under a common shift", c.shift_invariance_error));
  if (!std::isfinite(c.ordering_min)) c.ordering_min = 0.0;
  return c;
}

std::string to_json(const Certificate& c, const std::optional<std::string>& timestamp) {
  nlohmann::ordered_json j;
  j["n"] = c.n_cells;
  j["lambda"] = c.lambda;
  j["T"] = c.t_final;
  j["x_star"] = c.x_star;
  j["shift"] = c.shift;
  j["per_step"] = c.per_step;
  j["sum"] = c.sum;
  j["prop32_per_step"] = c.prop32_per_step;
  j["thm31_bound"] = c.thm31_bound;
  j["measured_w1"] = c.measured_w1;
  j["verdict"] = c.pass() ? "pass" : "fail";
  j["dx"] = c.dx;
  j["dt"] = c.dt;
  j["steps"] = c.steps;
  j["final_tau"] = c.final_tau;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["tv"] = c.tv;
  j["projection_min"] = c.projection_min;
  j["ordering_min"] = c.ordering_min;
  j["failures"] = c.failures;
  if (timestamp) j["timestamp"] = *timestamp;
  return j.dump(2) + "\n";
}

} // namespace cllab
