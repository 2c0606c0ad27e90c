#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace cllab {

struct Range {
  double lo;
  double hi;
};

/// Bounds of f' on a data range: beta2 = min f', beta1 = max f'.
struct DerivBounds {
  double beta2;
  double beta1;
};

/// A strictly convex flux f with its derivative and optional closed-form
/// capabilities.
///
/// If f' is affine (f' = a*u + b, e.g. Burgers) the flux carries that affine
/// map, which gives (f')^-1 in closed form and makes rarefaction fans and
/// characteristic images affine. Fans and exact evolution need this.
class FluxModel {
public:
  struct AffineDerivative {
    double a;  // f'' (> 0)
    double b;  // f'(0)
  };

  /// f(u) = u^2 / 2.
  static FluxModel burgers();
  /// f(u) = a u^2 / 2 + b u, a > 0.
  static FluxModel quadratic(double a, double b);
  /// Generic strictly convex flux. `alpha` must satisfy f'' >= alpha > 0.
  static FluxModel custom(std::string name, std::function<double(double)> f,
                          std::function<double(double)> fprime, double alpha,
                          std::optional<double> sonic_point = std::nullopt);

  double value(double u) const { return f_(u); }
  double derivative(double u) const { return fprime_(u); }
  double convexity_floor() const { return alpha_; }
  std::optional<double> sonic_point() const { return sonic_; }
  const std::optional<AffineDerivative>& affine_derivative() const { return affine_; }
  bool is_burgers() const { return burgers_; }
  const std::string& name() const { return name_; }

  /// (f')^-1(xi); throws MissingDerivInverse without the affine capability.
  double derivative_inverse(double xi) const;
  /// Closed-form integral over [a, b] of (f')^-1((x - x0) / tau).
  double fan_integral(double a, double b, double x0, double tau) const;

  /// min/max of f' over [lo, hi] (f' is nondecreasing).
  DerivBounds deriv_bounds(Range r) const;
  /// max |f'| over the range.
  double max_speed(Range r) const;
  /// Samples f' at 1000 points of the range and checks monotonicity and that
  /// the samples stay inside deriv_bounds.
  bool validate(Range r) const;

  /// min of f over [lo, hi] (convexity: attained at an end or the sonic point).
  double min_on(double lo, double hi) const;
  double max_on(double lo, double hi) const;

private:
  FluxModel() = default;

  std::string name_;
  std::function<double(double)> f_;
  std::function<double(double)> fprime_;
  double alpha_ = 0.0;
  std::optional<double> sonic_;
  std::optional<AffineDerivative> affine_;
  bool burgers_ = false;
};

enum class FluxKind { Godunov, LaxFriedrichs, EngquistOsher };

std::string_view to_string(FluxKind kind);
/// Accepts "godunov", "lxf"/"lax-friedrichs", "eo"/"engquist-osher".
std::optional<FluxKind> parse_flux_kind(std::string_view name);

/// Godunov flux for Burgers: F(a,b) = 1/2 max(max(a,0)^2, min(b,0)^2).
double godunov_burgers(double a, double b);
/// min over [a,b] of f when a <= b, max over [b,a] otherwise.
double godunov_flux(const FluxModel& f, double a, double b);
/// (f(a) + f(b))/2 - (b - a)/(2 lambda).
double lax_friedrichs_flux(const FluxModel& f, double a, double b, double lambda);
/// f(max(a,w)) + f(min(b,w)) - f(w), w the sonic point.
double engquist_osher_flux(const FluxModel& f, double a, double b);

/// A two-point numerical flux bound to a flux model and a mesh ratio.
class NumericalFlux {
public:
  NumericalFlux(FluxKind kind, FluxModel flux, double lambda,
                std::optional<Range> range = std::nullopt);

  double operator()(double a, double b) const;

  FluxKind kind() const { return kind_; }
  const FluxModel& flux() const { return flux_; }
  double lambda() const { return lambda_; }
  const std::optional<Range>& range() const { return range_; }

private:
  double clamp(double u) const;

  FluxKind kind_;
  FluxModel flux_;
  double lambda_;
  std::optional<Range> range_;
};

struct MonotonicityReport {
  bool monotone = true;
  /// Largest violation of: F nondecreasing in a, F nonincreasing in b, and
  /// the update u - lambda(F(u,c) - F(b,u)) nondecreasing in u.
  double worst_violation = 0.0;
  double worst_a = 0.0;
  double worst_b = 0.0;
};

/// Finite-difference scan over a 100 x 100 sample of range^2.
MonotonicityReport check_monotone(const NumericalFlux& nf, Range range, double lambda);

/// Emits a warning through the library log sink (stderr by default).
void log_warning(const std::string& message);
/// Replaces the sink; pass an empty function to silence warnings.
void set_log_sink(std::function<void(const std::string&)> sink);

} // namespace cllab
