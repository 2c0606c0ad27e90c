#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cllab/core.hpp"
#include "cllab/flux.hpp"

namespace cllab {

/// How run_to reaches the final time.
enum class FinalStepPolicy {
  /// Steps of lambda*dx, the last one shortened to land on T.
  Truncate,
  /// Steps of lambda*dx until the first t^n >= T.
  Overshoot,
  /// floor(T / (lambda*dx)) + 1 equal steps of T / N, so dt < lambda*dx.
  Uniform,
};

std::string_view to_string(FinalStepPolicy policy);
std::optional<FinalStepPolicy> parse_final_step_policy(std::string_view name);

struct StepDiagnostics {
  double dt = 0.0;
  /// dt * F at the left and right domain boundary.
  double mass_flux_left = 0.0;
  double mass_flux_right = 0.0;
  double dlip_plus = 0.0;
  double total_mass = 0.0;
};

/// Cell averages u_i^n on a grid, with the time and the scheme that produced
/// them.
struct NumericalSolution {
  Grid1D grid;
  std::vector<double> cells;
  double time = 0.0;
  double lambda = 0.0;
  long step_count = 0;
  NumericalFlux flux;

  FluxKind flux_kind() const { return flux.kind(); }
  PiecewiseLinearFn as_function() const;
  /// dx * sum(cells), compensated.
  double total_mass() const;
};

/// Projects u0 onto the grid. Throws CflViolation unless
/// lambda * max|f'| <= 1 on [min u0, max u0].
NumericalSolution init(const PiecewiseLinearFn& u0, const Grid1D& grid, const FluxModel& flux,
                       FluxKind kind, double lambda);

/// One explicit conservative update with dt = lambda * dx.
NumericalSolution step(const NumericalSolution& s);
/// One update with an explicit dt (dt <= lambda * dx). Ghost cells copy the
/// boundary cells.
NumericalSolution step(const NumericalSolution& s, double dt, StepDiagnostics* diag = nullptr);

using StepObserver = std::function<void(const NumericalSolution&, const StepDiagnostics&)>;

NumericalSolution run_to(const NumericalSolution& s, double t_final,
                         FinalStepPolicy policy = FinalStepPolicy::Truncate,
                         const StepObserver& observer = {});

/// Number of equal steps the Uniform policy takes over `duration`.
long uniform_step_count(double duration, double dt_max);

/// max_i (u_{i+1} - u_i) / dx.
double dlip_plus(std::span<const double> cells, double dx);
double dlip_plus(const NumericalSolution& s);

} // namespace cllab
