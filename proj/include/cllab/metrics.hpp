#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cllab/core.hpp"

namespace cllab {

/// W1(u, v) = integral over the line of |E|, E the primitive of u - v.
/// Throws UnequalMass unless u - v is compactly supported with zero mass.
double w1_distance(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v);

/// integral over [a, b] of |integral from a to x of (u - v)|. Used when the
/// functions only agree on the window, as with a numerical solution whose
/// tails differ from the exact ones.
double w1_distance_on(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v, double a, double b);

/// Exact L1 norm of u - v over the line; u - v must have zero tails.
double l1_distance(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v);
double l1_distance_on(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v, double a, double b);

/// Integral of |f| over [a, b], affine pieces split at their roots.
double abs_integral(const PiecewiseLinearFn& f, double a, double b);

/// Sum of |slope| * width over the pieces plus all jump sizes.
double total_variation(const PiecewiseLinearFn& u);

/// log2(e_{k-1} / e_k) for each consecutive pair. Each n must double the
/// previous one, otherwise NonDyadicRefinement.
std::vector<double> ooc_table(std::span<const std::pair<int, double>> errors);
double ooc(double e_coarse, double e_fine);

/// (beta2 / 2) (1 - beta1 lambda) t tv dx, without checking hypotheses.
double thm31_bound_value(double beta1, double beta2, double lambda, double t, double tv, double dx);
/// Same, but throws CflViolation unless lambda <= 1 / (2 beta1).
double thm31_lower_bound(double beta1, double beta2, double lambda, double t, double tv, double dx);

/// l1 / (sqrt(tv) sqrt(w1)); throws DivisionByZero when w1 or tv is 0.
double interpolation_ratio(double l1, double w1, double tv);
/// Same with l1, w1 between u and v and tv = TV(u).
double interpolation_ratio(const PiecewiseLinearFn& u, const PiecewiseLinearFn& v);

struct ErrorReport {
  int n_cells = 0;
  double dx = 0.0;
  double l1_error = 0.0;
  double w1_error = 0.0;
  std::optional<double> l1_ooc;
  std::optional<double> w1_ooc;
  /// Absent when lambda > 1/(2 beta1).
  std::optional<double> lower_bound_thm31;
  std::optional<double> certificate_sum;
};

/// Fills the OOC fields of consecutive reports.
void fill_ooc(std::vector<ErrorReport>& reports);

} // namespace cllab
