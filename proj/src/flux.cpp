#include "cllab/flux.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cllab/errors.hpp"

namespace cllab {

namespace {

std::mutex g_log_mutex;
std::function<void(const std::string&)> g_log_sink = [](const std::string& m) {
  std::clog << "cllab: warning: " << m << '\n';
};

} // namespace

void log_warning(const std::string& message) {
  std::lock_guard lock(g_log_mutex);
  if (g_log_sink) g_log_sink(message);
}

void set_log_sink(std::function<void(const std::string&)> sink) {
  std::lock_guard lock(g_log_mutex);
  g_log_sink = std::move(sink);
}

// --------------------------------------------------------------- FluxModel

FluxModel FluxModel::burgers() {
  FluxModel m = quadratic(1.0, 0.0);
  m.name_ = "burgers";
  m.burgers_ = true;
  return m;
}

FluxModel FluxModel::quadratic(double a, double b) {
  if (!(a > 0.0)) throw std::invalid_argument("quadratic flux needs a > 0");
  FluxModel m;
  m.name_ = "quadratic";
  m.f_ = [a, b](double u) { return 0.5 * a * u * u + b * u; };
  m.fprime_ = [a, b](double u) { return a * u + b; };
  m.alpha_ = a;
  m.sonic_ = -b / a;
  m.affine_ = AffineDerivative{a, b};
  return m;
}

FluxModel FluxModel::custom(std::string name, std::function<double(double)> f,
                            std::function<double(double)> fprime, double alpha,
                            std::optional<double> sonic_point) {
  if (!f || !fprime) throw std::invalid_argument("custom flux needs f and f'");
  if (!(alpha > 0.0)) throw std::invalid_argument("custom flux needs alpha > 0");
  FluxModel m;
  m.name_ = std::move(name);
  m.f_ = std::move(f);
  m.fprime_ = std::move(fprime);
  m.alpha_ = alpha;
  m.sonic_ = sonic_point;
  return m;
}

double FluxModel::derivative_inverse(double xi) const {
  if (!affine_) throw MissingDerivInverse("flux '" + name_ + "' has no closed-form (f')^-1");
  return (xi - affine_->b) / affine_->a;
}

double FluxModel::fan_integral(double a, double b, double x0, double tau) const {
  if (!affine_) throw MissingDerivInverse("flux '" + name_ + "' has no closed-form fan average");
  auto prim = [&](double x) {
    const double s = x - x0;
    return (s * s / (2.0 * tau) - affine_->b * x) / affine_->a;
  };
  return prim(b) - prim(a);
}

DerivBounds FluxModel::deriv_bounds(Range r) const {
  return {derivative(r.lo), derivative(r.hi)};
}

double FluxModel::max_speed(Range r) const {
  const auto b = deriv_bounds(r);
  return std::max(std::abs(b.beta1), std::abs(b.beta2));
}

bool FluxModel::validate(Range r) const {
  constexpr int samples = 1000;
  const auto bounds = deriv_bounds(r);
  const double scale = std::max({1.0, std::abs(bounds.beta1), std::abs(bounds.beta2)});
  const double tol = 1e-12 * scale;
  double prev = derivative(r.lo);
  for (int k = 0; k < samples; ++k) {
    const double u = r.lo + (r.hi - r.lo) * k / (samples - 1);
    const double d = derivative(u);
    if (d < prev - tol) return false;
    if (d < bounds.beta2 - tol || d > bounds.beta1 + tol) return false;
    prev = d;
  }
  return true;
}

double FluxModel::min_on(double lo, double hi) const {
  if (lo > hi) std::swap(lo, hi);
  if (derivative(lo) >= 0.0) return value(lo);
  if (derivative(hi) <= 0.0) return value(hi);
  if (affine_) return value(std::clamp(derivative_inverse(0.0), lo, hi));
  if (sonic_) return value(std::clamp(*sonic_, lo, hi));
  // bisection on f'
  double a = lo, b = hi;
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    (derivative(m) < 0.0 ? a : b) = m;
  }
  return value(0.5 * (a + b));
}

double FluxModel::max_on(double lo, double hi) const { return std::max(value(lo), value(hi)); }

// ---------------------------------------------------------- numerical fluxes

std::string_view to_string(FluxKind kind) {
  switch (kind) {
  case FluxKind::Godunov:
    return "godunov";
  case FluxKind::LaxFriedrichs:
    return "lxf";
  case FluxKind::EngquistOsher:
    return "eo";
  }
  return "unknown";
}

std::optional<FluxKind> parse_flux_kind(std::string_view name) {
  if (name == "godunov") return FluxKind::Godunov;
  if (name == "lxf" || name == "lax-friedrichs") return FluxKind::LaxFriedrichs;
  if (name == "eo" || name == "engquist-osher") return FluxKind::EngquistOsher;
  return std::nullopt;
}

double godunov_burgers(double a, double b) {
  const double l = std::max(a, 0.0);
  const double r = std::min(b, 0.0);
  return 0.5 * std::max(l * l, r * r);
}

double godunov_flux(const FluxModel& f, double a, double b) {
  if (f.is_burgers()) return godunov_burgers(a, b);
  return a <= b ? f.min_on(a, b) : f.max_on(b, a);
}

double lax_friedrichs_flux(const FluxModel& f, double a, double b, double lambda) {
  return 0.5 * (f.value(a) + f.value(b)) - (b - a) / (2.0 * lambda);
}

double engquist_osher_flux(const FluxModel& f, double a, double b) {
  const auto w = f.sonic_point();
  if (!w) throw MissingSonicPoint("Engquist-Osher flux needs the sonic point of '" + f.name() + "'");
  return f.value(std::max(a, *w)) + f.value(std::min(b, *w)) - f.value(*w);
}

NumericalFlux::NumericalFlux(FluxKind kind, FluxModel flux, double lambda, std::optional<Range> range)
    : kind_(kind), flux_(std::move(flux)), lambda_(lambda), range_(range) {
  if (!(lambda > 0.0)) throw std::invalid_argument("NumericalFlux: lambda must be positive");
  if (kind_ == FluxKind::EngquistOsher && !flux_.sonic_point())
    throw MissingSonicPoint("Engquist-Osher flux needs the sonic point of '" + flux_.name() + "'");
}

double NumericalFlux::clamp(double u) const {
  if (!range_) return u;
  if (u >= range_->lo && u <= range_->hi) return u;
  // Rounding pushes values marginally out of range; anything larger is
  // reported so it is not mistaken for a silent clamp.
  const double width = std::max(range_->hi - range_->lo, 1.0);
  const double excess = u < range_->lo ? range_->lo - u : u - range_->hi;
  if (excess > 1e-12 * width) {
    static std::once_flag once;
    std::call_once(once, [&] {
      log_warning("flux argument " + std::to_string(u) + " outside data range [" +
                  std::to_string(range_->lo) + ", " + std::to_string(range_->hi) + "], clamped");
    });
  }
  return std::clamp(u, range_->lo, range_->hi);
}

double NumericalFlux::operator()(double a, double b) const {
  a = clamp(a);
  b = clamp(b);
  switch (kind_) {
  case FluxKind::Godunov:
    return godunov_flux(flux_, a, b);
  case FluxKind::LaxFriedrichs:
    return lax_friedrichs_flux(flux_, a, b, lambda_);
  case FluxKind::EngquistOsher:
    return engquist_osher_flux(flux_, a, b);
  }
  return 0.0;
}

MonotonicityReport check_monotone(const NumericalFlux& nf, Range range, double lambda) {
  constexpr int samples = 100;
  MonotonicityReport report;
  const double h = (range.hi - range.lo) / (samples - 1);
  std::vector<double> u(samples);
  for (int i = 0; i < samples; ++i) u[static_cast<std::size_t>(i)] = range.lo + i * h;
  std::vector<double> table(static_cast<std::size_t>(samples * samples));
  auto F = [&](int i, int j) -> double& {
    return table[static_cast<std::size_t>(i * samples + j)];
  };
  for (int i = 0; i < samples; ++i)
    for (int j = 0; j < samples; ++j) F(i, j) = nf(u[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(j)]);

  const double tol = 1e-9;
  auto record = [&](double violation, int i, int j) {
    if (violation > report.worst_violation) {
      report.worst_violation = violation;
      report.worst_a = u[static_cast<std::size_t>(i)];
      report.worst_b = u[static_cast<std::size_t>(j)];
    }
  };
  for (int i = 0; i + 1 < samples; ++i) {
    for (int j = 0; j < samples; ++j) {
      record(-(F(i + 1, j) - F(i, j)) / h, i, j);  // nondecreasing in a
      record((F(j, i + 1) - F(j, i)) / h, j, i);   // nonincreasing in b
    }
    // update H(l, u, r) = u - lambda (F(u, r) - F(l, u)) nondecreasing in u
    double max_d1 = -INFINITY, min_d2 = INFINITY;
    int arg_r = 0, arg_l = 0;
    for (int j = 0; j < samples; ++j) {
      const double d1 = (F(i + 1, j) - F(i, j)) / h;
      const double d2 = (F(j, i + 1) - F(j, i)) / h;
      if (d1 > max_d1) {
        max_d1 = d1;
        arg_r = j;
      }
      if (d2 < min_d2) {
        min_d2 = d2;
        arg_l = j;
      }
    }
    record(-(1.0 - lambda * (max_d1 - min_d2)), arg_l, arg_r);
  }
  report.monotone = report.worst_violation <= tol;
  return report;
}

} // namespace cllab
