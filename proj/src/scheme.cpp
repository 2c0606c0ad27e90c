#include "cllab/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "cllab/errors.hpp"

namespace cllab {

std::string_view to_string(FinalStepPolicy policy) {
  switch (policy) {
  case FinalStepPolicy::Truncate:
    return "truncate";
  case FinalStepPolicy::Overshoot:
    return "overshoot";
  case FinalStepPolicy::Uniform:
    return "uniform";
  }
  return "unknown";
}

std::optional<FinalStepPolicy> parse_final_step_policy(std::string_view name) {
  if (name == "truncate") return FinalStepPolicy::Truncate;
  if (name == "overshoot") return FinalStepPolicy::Overshoot;
  if (name == "uniform") return FinalStepPolicy::Uniform;
  return std::nullopt;
}

PiecewiseLinearFn NumericalSolution::as_function() const {
  return PiecewiseLinearFn::piecewise_constant(grid, cells);
}

double NumericalSolution::total_mass() const { return grid.dx() * compensated_sum(cells); }

NumericalSolution init(const PiecewiseLinearFn& u0, const Grid1D& grid, const FluxModel& flux,
                       FluxKind kind, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  const Range range{u0.min_value(), u0.max_value()};
  const double cfl = lambda * flux.max_speed(range);
  if (cfl > 1.0 + 1e-12) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "lambda * max|f'| = %.6g exceeds 1 on [%.6g, %.6g]", cfl,
                  range.lo, range.hi);
    throw CflViolation(buf);
  }
  return NumericalSolution{grid, cell_averages(u0, grid), 0.0, lambda, 0,
                           NumericalFlux(kind, flux, lambda, range)};
}

NumericalSolution step(const NumericalSolution& s) { return step(s, s.lambda * s.grid.dx()); }

NumericalSolution step(const NumericalSolution& s, double dt, StepDiagnostics* diag) {
  const double dx = s.grid.dx();
  if (!(dt > 0.0) || dt > s.lambda * dx * (1.0 + 1e-12))
    throw std::invalid_argument("step: dt must lie in (0, lambda*dx]");
  const std::size_t n = s.cells.size();
  const auto& u = s.cells;
  // F[i] is the flux through x_{i-1/2}; F[0] and F[n] use constant ghosts.
  std::vector<double> F(n + 1);
  F[0] = s.flux(u[0], u[0]);
  for (std::size_t i = 1; i < n; ++i) F[i] = s.flux(u[i - 1], u[i]);
  F[n] = s.flux(u[n - 1], u[n - 1]);

  const double mu = dt / dx;
  NumericalSolution out = s;
  for (std::size_t i = 0; i < n; ++i) out.cells[i] = u[i] - mu * (F[i + 1] - F[i]);
  out.time = s.time + dt;
  out.step_count = s.step_count + 1;
  if (diag) {
    diag->dt = dt;
    diag->mass_flux_left = dt * F[0];
    diag->mass_flux_right = dt * F[n];
    diag->dlip_plus = dlip_plus(out);
    diag->total_mass = out.total_mass();
  }
  return out;
}

long uniform_step_count(double duration, double dt_max) {
  if (!(duration > 0.0)) return 0;
  return static_cast<long>(std::floor(duration / dt_max + 1e-9)) + 1;
}

NumericalSolution run_to(const NumericalSolution& s, double t_final, FinalStepPolicy policy,
                         const StepObserver& observer) {
  const double dt = s.lambda * s.grid.dx();
  const double duration = t_final - s.time;
  if (duration < -1e-12 * std::max(1.0, std::abs(t_final)))
    throw std::invalid_argument("run_to: final time lies before the current time");
  NumericalSolution cur = s;
  StepDiagnostics diag;
  auto advance = [&](double h) {
    cur = step(cur, h, observer ? &diag : nullptr);
    if (observer) observer(cur, diag);
  };
  if (duration <= 0.0) return cur;

  switch (policy) {
  case FinalStepPolicy::Truncate: {
    const long full = static_cast<long>(std::floor(duration / dt * (1.0 + 1e-12)));
    long k = 0;
    for (; k < full; ++k) advance(dt);
    const double remaining = t_final - (s.time + static_cast<double>(full) * dt);
    if (remaining > 1e-10 * dt) advance(std::min(remaining, dt));
    cur.time = t_final;
    break;
  }
  case FinalStepPolicy::Overshoot: {
    const long steps = static_cast<long>(std::ceil(duration / dt * (1.0 - 1e-12)));
    for (long k = 0; k < steps; ++k) advance(dt);
    cur.time = s.time + static_cast<double>(steps) * dt;
    break;
  }
  case FinalStepPolicy::Uniform: {
    const long steps = uniform_step_count(duration, dt);
    const double h = duration / static_cast<double>(steps);
    for (long k = 0; k < steps; ++k) advance(h);
    cur.time = t_final;
    break;
  }
  }
  return cur;
}

double dlip_plus(std::span<const double> cells, double dx) {
  if (cells.size() < 2) throw std::invalid_argument("dlip_plus needs at least two cells");
  double best = -INFINITY;
  for (std::size_t i = 0; i + 1 < cells.size(); ++i)
    best = std::max(best, (cells[i + 1] - cells[i]) / dx);
  return best;
}

double dlip_plus(const NumericalSolution& s) { return dlip_plus(s.cells, s.grid.dx()); }

} // namespace cllab
