#pragma once

#include <limits>

#include "cllab/core.hpp"
#include "cllab/flux.hpp"

namespace cllab {

/// Ramp 0 -> 1 on [-0.75, -0.25], plateau 1 on [-0.25, 0.25], ramp 1 -> 0 on
/// [0.25, 0.5], zero elsewhere.
PiecewiseLinearFn bump_datum();
/// 0 for x < 0, 1 for x >= 0.
PiecewiseLinearFn step_datum();

/// First time a characteristic crossing occurs (0 for a decreasing jump,
/// +inf for nondecreasing data). Needs an affine f'.
double first_shock_time(const PiecewiseLinearFn& datum, const FluxModel& flux);

/// Exact entropy solution at time t by characteristics, for t below the first
/// shock time. Increasing jumps open fans. Throws PastShockTime,
/// MissingDerivInverse.
PiecewiseLinearFn evolve_pw_linear(const PiecewiseLinearFn& datum, const FluxModel& flux, double t);

/// Centered Burgers rarefaction of the 0/1 step at time t > 0.
double rarefaction(double t, double x);
PiecewiseLinearFn rarefaction_solution(double t);

/// Exact evolution of a piecewise-constant state over time tau: a fan at each
/// increasing jump, a Rankine-Hugoniot shock at each decreasing one. Throws
/// WaveInteraction when neighbouring waves meet, MissingDerivInverse when a
/// fan is needed and f' has no affine form.
PiecewiseLinearFn exact_step(const PiecewiseLinearFn& v, const FluxModel& flux, double tau);

/// A (S_dt A)^n u0 with dt = lambda * dx.
PiecewiseLinearFn godunov_composition(const PiecewiseLinearFn& u0, const Grid1D& grid,
                                      const FluxModel& flux, double lambda, int n_steps);

enum class ExactKind { Bump, RarefactionStep, Custom };

class ExactSolution {
public:
  /// Bump datum under Burgers (shock time 0.25).
  static ExactSolution bump();
  /// Step datum under Burgers (never shocks).
  static ExactSolution rarefaction_step();
  static ExactSolution custom(PiecewiseLinearFn datum, FluxModel flux);

  ExactKind kind() const { return kind_; }
  const PiecewiseLinearFn& datum() const { return datum_; }
  const FluxModel& flux() const { return flux_; }
  double shock_time() const { return shock_time_; }

  /// u(., t); throws PastShockTime for t >= shock_time().
  PiecewiseLinearFn at(double t) const;
  double operator()(double x, double t) const { return at(t)(x); }

private:
  ExactSolution(ExactKind kind, PiecewiseLinearFn datum, FluxModel flux);

  ExactKind kind_;
  PiecewiseLinearFn datum_;
  FluxModel flux_;
  double shock_time_ = std::numeric_limits<double>::infinity();
};

} // namespace cllab
