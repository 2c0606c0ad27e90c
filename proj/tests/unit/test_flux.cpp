#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "cllab/errors.hpp"
#include "cllab/flux.hpp"

using namespace cllab;

namespace {

FluxModel quartic_with_sonic() {
  return FluxModel::custom(
      "quartic", [](double u) { return u * u * u * u / 4 + u * u / 2; },
      [](double u) { return u * u * u + u; }, 1.0, 0.0);
}

FluxModel shifted_quartic_without_sonic() {
  // f' = (u - 0.3)^3 + (u - 0.3), zero at 0.3, not announced
  return FluxModel::custom(
      "quartic-shifted",
      [](double u) {
        const double w = u - 0.3;
        return w * w * w * w / 4 + w * w / 2;
      },
      [](double u) {
        const double w = u - 0.3;
        return w * w * w + w;
      },
      1.0);
}

double brute_min(const FluxModel& f, double a, double b) {
  double m = INFINITY;
  for (int k = 0; k <= 1000; ++k) m = std::min(m, f.value(a + (b - a) * k / 1000.0));
  return m;
}

double brute_max(const FluxModel& f, double a, double b) {
  double m = -INFINITY;
  for (int k = 0; k <= 1000; ++k) m = std::max(m, f.value(a + (b - a) * k / 1000.0));
  return m;
}

} // namespace

TEST_CASE("Burgers model") {
  const auto f = FluxModel::burgers();
  CHECK(f.value(2.0) == 2.0);
  CHECK(f.derivative(-3.0) == -3.0);
  CHECK(f.convexity_floor() == 1.0);
  CHECK(*f.sonic_point() == 0.0);
  CHECK(f.derivative_inverse(0.7) == 0.7);
  CHECK(f.deriv_bounds({1.0, 2.0}).beta2 == 1.0);
  CHECK(f.deriv_bounds({1.0, 2.0}).beta1 == 2.0);
  CHECK(f.max_speed({-3.0, 2.0}) == 3.0);
  CHECK(f.validate({-1.0, 1.0}));
  CHECK(f.fan_integral(0.0, 1.0, 0.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("custom flux without a closed-form inverse") {
  const auto f = quartic_with_sonic();
  CHECK_THROWS_AS(f.derivative_inverse(1.0), MissingDerivInverse);
  CHECK_THROWS_AS(f.fan_integral(0.0, 1.0, 0.0, 1.0), MissingDerivInverse);
  CHECK(f.validate({-1.0, 1.0}));
  const auto bad = FluxModel::custom(
      "concave-part", [](double u) { return u * u * u; }, [](double u) { return 3 * u * u; }, 1.0);
  CHECK_FALSE(bad.validate({-1.0, 1.0}));
}

TEST_CASE("Godunov flux examples") {
  CHECK(godunov_burgers(1.0, 1.0) == 0.5);
  CHECK(godunov_burgers(0.0, 1.0) == 0.0);
  CHECK(godunov_burgers(1.0, -1.0) == 0.5);
  CHECK(godunov_burgers(-1.0, 0.5) == 0.0);
  CHECK(godunov_burgers(-2.0, -1.0) == 0.5);
}

TEST_CASE("Lax-Friedrichs flux examples") {
  const auto f = FluxModel::burgers();
  CHECK(lax_friedrichs_flux(f, 1.0, 1.0, 0.5) == 0.5);
  CHECK(lax_friedrichs_flux(f, 0.0, 1.0, 0.5) == -0.75);
  CHECK(lax_friedrichs_flux(f, 1.0, 0.0, 0.5) == 1.25);
}

TEST_CASE("Engquist-Osher flux examples") {
  const auto f = FluxModel::burgers();
  CHECK(engquist_osher_flux(f, 1.0, 1.0) == 0.5);
  CHECK(engquist_osher_flux(f, 0.0, 1.0) == 0.0);
  CHECK(engquist_osher_flux(f, 1.0, 0.0) == 0.5);
  CHECK_THROWS_AS(engquist_osher_flux(shifted_quartic_without_sonic(), 0.0, 1.0), MissingSonicPoint);
  CHECK_THROWS_AS(NumericalFlux(FluxKind::EngquistOsher, shifted_quartic_without_sonic(), 0.5),
                  MissingSonicPoint);
}

TEST_CASE("all numerical fluxes are consistent") {
  for (const auto& f : {FluxModel::burgers(), FluxModel::quadratic(2.0, -0.5), quartic_with_sonic()})
    for (auto kind : {FluxKind::Godunov, FluxKind::LaxFriedrichs, FluxKind::EngquistOsher}) {
      const NumericalFlux nf(kind, f, 0.3);
      for (int k = 0; k <= 200; ++k) {
        const double u = -2.0 + 4.0 * k / 200.0;
        CHECK(std::abs(nf(u, u) - f.value(u)) <= 1e-12 * std::max(1.0, std::abs(f.value(u))));
      }
    }
}

TEST_CASE("Godunov flux equals the min/max characterization") {
  for (const auto& f : {FluxModel::burgers(), FluxModel::quadratic(0.5, 0.3), quartic_with_sonic(),
                        shifted_quartic_without_sonic()}) {
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; j <= 20; ++j) {
        const double a = -1.0 + 0.1 * i, b = -1.0 + 0.1 * j;
        const double g = godunov_flux(f, a, b);
        const double ref = a <= b ? brute_min(f, a, b) : brute_max(f, b, a);
        // the sampled minimum can only overestimate the true one
        if (a <= b) {
          CHECK(g <= ref + 1e-14);
          CHECK(g >= ref - 1e-5);
        } else {
          CHECK(g == doctest::Approx(ref).epsilon(1e-14));
        }
      }
  }
}

TEST_CASE("monotonicity scan") {
  const auto f = FluxModel::burgers();
  CHECK(check_monotone(NumericalFlux(FluxKind::Godunov, f, 0.5), {0.0, 1.0}, 0.5).monotone);
  CHECK(check_monotone(NumericalFlux(FluxKind::EngquistOsher, f, 0.5), {-1.0, 1.0}, 0.5).monotone);
  for (auto kind : {FluxKind::Godunov, FluxKind::LaxFriedrichs, FluxKind::EngquistOsher})
    CHECK(check_monotone(NumericalFlux(kind, f, 0.5), {0.0, 1.0}, 0.5).monotone);
  const auto bad = check_monotone(NumericalFlux(FluxKind::LaxFriedrichs, f, 2.0), {0.0, 1.0}, 2.0);
  CHECK_FALSE(bad.monotone);
  CHECK(bad.worst_violation > 0.0);
}

TEST_CASE("out-of-range arguments are clamped with one warning") {
  std::vector<std::string> messages;
  set_log_sink([&](const std::string& m) { messages.push_back(m); });
  const NumericalFlux nf(FluxKind::Godunov, FluxModel::burgers(), 0.5, Range{0.0, 1.0});
  CHECK(nf(1.0 + 1e-15, 1.0) == doctest::Approx(0.5));
  CHECK(messages.empty());
  CHECK(nf(3.0, 3.0) == 0.5);
  CHECK(nf(4.0, 4.0) == 0.5);
  CHECK(messages.size() <= 1);
  set_log_sink({});
  CHECK(parse_flux_kind("lxf") == FluxKind::LaxFriedrichs);
  CHECK_FALSE(parse_flux_kind("roe").has_value());
  CHECK(to_string(FluxKind::EngquistOsher) == "eo");
}
