#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cllab/core.hpp"
#include "cllab/flux.hpp"

namespace cllab {

/// Cut location of the increasing auxiliary functions: at time t the cut sits
/// at x_star + speed * t and everything right of it is replaced by M.
struct TildeTruncation {
  double x_star = 0.0;
  double plateau_value = 0.0;
  double speed = 0.0;

  double cut(double t) const { return x_star + speed * t; }
};

/// u left of the cut, M right of it. Throws PlateauViolated unless u equals M
/// at the cut to 1e-12 (relative to max(1, |M|)).
PiecewiseLinearFn truncate_tilde(const PiecewiseLinearFn& u, const TildeTruncation& trunc, double t);

/// W1(project(v), v).
double per_step_projection_error(const PiecewiseLinearFn& v, const Grid1D& grid);

/// (dx dt / 2) (1 - beta1 lambda) beta2 tv, unchecked.
double prop32_formula(double beta1, double beta2, double lambda, double dx, double dt, double tv);
/// Same, throws CflViolation unless lambda <= 1/(2 beta1); beta2 must be >= 0.
double prop32_bound(double beta1, double beta2, double lambda, double dx, double dt, double tv);

/// Location of the plateau of a datum that rises to M, stays there on
/// [x0, xM] and then falls.
struct PlateauShape {
  double min_value;
  double plateau_value;
  double x0;
  double xM;
};

/// Throws ShapeError when u does not have that shape (including a plateau
/// that extends to infinity).
PlateauShape analyze_plateau_shape(const PiecewiseLinearFn& u);

struct Certificate {
  int n_cells = 0;
  double dx = 0.0;
  double lambda = 0.0;
  double dt = 0.0;
  double t_final = 0.0;
  double x_star = 0.0;
  double shift = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  /// TV of the truncated datum (the increasing part).
  double tv = 0.0;
  /// Completed projections after t = 0 (terms n = 1..N).
  int steps = 0;
  double t_last_projection = 0.0;
  /// Exact evolution time after the last projection (0 when T = t^N).
  double final_tau = 0.0;

  std::vector<double> per_step;  // n = 0..N
  double sum = 0.0;
  double prop32_per_step = 0.0;
  double thm31_bound = 0.0;
  double measured_w1 = 0.0;

  /// min over n of the primitive of A v~ - v~ (nonnegative by projection
  /// positivity).
  double projection_min = 0.0;
  /// min over n of the primitive of v~ - u~ after projection, where it held
  /// before projection.
  double ordering_min = 0.0;
  double shift_invariance_error = 0.0;
  double slack = 0.0;

  std::vector<std::string> failures;
  bool pass() const { return failures.empty(); }
};

struct CertificateOptions {
  std::optional<double> x_star;
  /// Constant added to u0 before certifying, so that f' > 0 on the range.
  double shift = 1.0;
  FluxKind scheme = FluxKind::Godunov;
};

/// Runs the Godunov composition on u0 + shift, truncates each pre-projection
/// state, and checks measured W1 >= sum of projection errors >= (N+1) times
/// the per-step bound. Throws SchemeUnsupported, ShapeError, CflViolation,
/// PlateauViolated, ConfigError.
Certificate build_certificate(const PiecewiseLinearFn& u0, const Grid1D& grid, const FluxModel& flux,
                              double lambda, double t_final, const CertificateOptions& options = {});

/// Default cut origin: midpoint of the admissible interval
/// [x0 + T (1/lambda - f'(M)) + dx, xM - f'(M) T - dx], falling back to the
/// plateau midpoint when that interval is empty.
double default_x_star(const PlateauShape& shape, double speed, double lambda, double t_final,
                      double dx);

/// JSON text of the certificate. The timestamp is only written when given.
std::string to_json(const Certificate& c, const std::optional<std::string>& timestamp = std::nullopt);

} // namespace cllab
