#include "cllab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "cllab/errors.hpp"

namespace cllab {

double w1_distance(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v) {
  return primitive_difference(u, v).integral_abs();
}

double w1_distance_on(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v, double a, double b) {
  return primitive_difference_on(u, v, a, b).integral_abs();
}

double abs_integral(const PiecewiseLinearFn& f, double a, double b) {
  std::vector<double> terms;
  f.for_each_piece(a, b, [&](double x0, double x1, double v0, double v1) {
    const double w = x1 - x0;
    if ((v0 >= 0.0 && v1 >= 0.0) || (v0 <= 0.0 && v1 <= 0.0)) {
      terms.push_back(0.5 * w * std::abs(v0 + v1));
    } else {
      // sign change: two triangles meeting at the root
      const double a0 = std::abs(v0), a1 = std::abs(v1);
      terms.push_back(0.5 * w * (a0 * a0 + a1 * a1) / (a0 + a1));
    }
  });
  return compensated_sum(terms);
}

double l1_distance(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v) {
  const auto d = difference(u, v);
  const double scale = std::max({std::abs(u.min_value()), std::abs(u.max_value()),
                                 std::abs(v.min_value()), std::abs(v.max_value()), 1e-300});
  if (std::abs(d.left_value()) > 1e-10 * scale || std::abs(d.right_value()) > 1e-10 * scale)
    throw std::domain_error("l1_distance: u - v does not vanish at infinity");
  if (d.breakpoints().size() < 2) return 0.0;
  return abs_integral(d, d.breakpoints().front(), d.breakpoints().back());
}

double l1_distance_on(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v, double a, double b) {
  if (!(b > a)) throw std::invalid_argument("l1_distance_on: need a < b");
  return abs_integral(difference(u, v), a, b);
}

double total_variation(const PiecewiseLinearFn& u) {
  const auto& bps = u.breakpoints();
  const auto& segs = u.segments();
  std::vector<double> terms;
  for (std::size_t k = 0; k < bps.size(); ++k) {
    const double ul = k == 0 ? u.left_value() : segs[k - 1].right;
    const double ur = k + 1 == bps.size() ? u.right_value() : segs[k].left;
    terms.push_back(std::abs(ur - ul));
    if (k < segs.size()) terms.push_back(std::abs(segs[k].right - segs[k].left));
  }
  return compensated_sum(terms);
}

double ooc(double e_coarse, double e_fine) { return std::log2(e_coarse / e_fine); }

std::vector<double> ooc_table(std::span<const std::pair<int, double>> errors) {
  std::vector<double> rates;
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (errors[k].first != 2 * errors[k - 1].first)
      throw NonDyadicRefinement("ooc_table: n = " + std::to_string(errors[k].first) +
                                " does not double n = " + std::to_string(errors[k - 1].first));
    rates.push_back(ooc(errors[k - 1].second, errors[k].second));
  }
  return rates;
}

double thm31_bound_value(double beta1, double beta2, double lambda, double t, double tv, double dx) {
  return 0.5 * beta2 * (1.0 - beta1 * lambda) * t * tv * dx;
}

double thm31_lower_bound(double beta1, double beta2, double lambda, double t, double tv, double dx) {
  if (beta2 < 0.0) throw std::invalid_argument("thm31_lower_bound: beta2 must be nonnegative");
  if (lambda * 2.0 * beta1 > 1.0 + 1e-12) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "lambda = %.6g exceeds 1/(2 beta1) = %.6g", lambda, 0.5 / beta1);
    throw CflViolation(buf);
  }
  return thm31_bound_value(beta1, beta2, lambda, t, tv, dx);
}

double interpolation_ratio(double l1, double w1, double tv) {
  if (w1 == 0.0) throw DivisionByZero("interpolation_ratio: W1 distance is zero");
  if (tv == 0.0) throw DivisionByZero("interpolation_ratio: total variation is zero");
  return l1 / (std::sqrt(tv) * std::sqrt(w1));
}

double interpolation_ratio(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v) {
  return interpolation_ratio(l1_distance(u, v), w1_distance(u, v), total_variation(u));
}

void fill_ooc(std::vector<ErrorReport>& reports) {
  for (std::size_t k = 0; k < reports.size(); ++k) {
    reports[k].l1_ooc.reset();
    reports[k].w1_ooc.reset();
    if (k == 0) continue;
    if (reports[k].n_cells != 2 * reports[k - 1].n_cells)
      throw NonDyadicRefinement("fill_ooc: resolutions must double");
    reports[k].l1_ooc = ooc(reports[k - 1].l1_error, reports[k].l1_error);
    reports[k].w1_ooc = ooc(reports[k - 1].w1_error, reports[k].w1_error);
  }
}

} // namespace cllab
