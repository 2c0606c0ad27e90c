#include <doctest.h>

#include <cmath>
#include <random>

#include "cllab/errors.hpp"
#include "cllab/exact.hpp"
#include "cllab/scheme.hpp"
#include "oracles.hpp"
#include "reference_values.hpp"

using namespace cllab;

namespace {

const FluxModel kBurgers = FluxModel::burgers();

NumericalSolution from_cells(const Grid1D& g, const std::vector<double>& cells, double lambda,
                             FluxKind kind = FluxKind::Godunov) {
  return init(PiecewiseLinearFn::piecewise_constant(g, cells), g, kBurgers, kind, lambda);
}

} // namespace

TEST_CASE("initial averaging") {
  const Grid1D g(-1.0, 1.0, 32);
  const auto s = init(bump_datum(), g, kBurgers, FluxKind::Godunov, 0.5);
  CHECK(s.cells.size() == 32);
  CHECK(s.cells[4] == doctest::Approx(0.0625).epsilon(1e-14));
  CHECK(s.time == 0.0);
  CHECK(s.step_count == 0);

  const auto st = init(step_datum(), g, kBurgers, FluxKind::Godunov, 0.5);
  for (int i = 0; i < 32; ++i) CHECK(st.cells[static_cast<std::size_t>(i)] == (i < 16 ? 0.0 : 1.0));

  const auto c = init(PiecewiseLinearFn::constant(-0.3), g, kBurgers, FluxKind::LaxFriedrichs, 0.5);
  for (double v : c.cells) CHECK(v == -0.3);

  CHECK_THROWS_AS(init(step_datum(), g, kBurgers, FluxKind::Godunov, 1.5), CflViolation);
  CHECK_NOTHROW(init(step_datum(), g, kBurgers, FluxKind::Godunov, 1.0));
}

TEST_CASE("single step examples") {
  const Grid1D g(0.0, 1.0, 6);
  const auto s = from_cells(g, {0, 0, 0, 1, 1, 1}, 0.5);
  const auto s1 = step(s);
  CHECK(s1.cells == std::vector<double>{0, 0, 0, 0.75, 1, 1});
  CHECK(s1.time == doctest::Approx(0.5 / 6));
  CHECK(s1.step_count == 1);

  for (auto kind : {FluxKind::Godunov, FluxKind::LaxFriedrichs, FluxKind::EngquistOsher}) {
    const auto c = from_cells(g, std::vector<double>(6, 0.4), 0.5, kind);
    CHECK(step(c).cells == c.cells);
  }
}

TEST_CASE("flux-form update matches a hand-written Godunov step") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const Grid1D g(-1.0, 1.0, 10 + k);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> cells(static_cast<std::size_t>(g.n_cells()));
    for (auto& c : cells) c = d(rng);
    const auto s = from_cells(g, cells, 0.45);
    const auto ref = oracle::hand_godunov_burgers(cells, 0.45);
    const auto s1 = step(s);
    for (std::size_t i = 0; i < cells.size(); ++i) CHECK(s1.cells[i] == doctest::Approx(ref[i]).epsilon(1e-15));
  }
}

TEST_CASE("mass balance through the boundary fluxes") {
  const Grid1D g(-1.0, 1.0, 40);
  const Point pts[] = {{-1.5, 0.8}, {-0.2, 0.1}, {0.5, 0.9}};
  auto s = init(PiecewiseLinearFn::from_points(pts), g, kBurgers, FluxKind::LaxFriedrichs, 0.5);
  for (int n = 0; n < 30; ++n) {
    StepDiagnostics d;
    const double before = s.total_mass();
    s = step(s, 0.5 * g.dx(), &d);
    const double change = d.total_mass - before;
    const double expected = -(d.mass_flux_right - d.mass_flux_left);
    CHECK(std::abs(change - expected) <= 1e-12 * std::max(1.0, std::abs(before)));
  }
}

TEST_CASE("run_to policies") {
  const Grid1D g(-1.0, 1.0, 32);
  const auto s0 = init(step_datum(), g, kBurgers, FluxKind::Godunov, 0.5);
  auto manual = s0;
  for (int n = 0; n < 16; ++n) manual = step(manual);
  const auto exact = run_to(s0, 16 * 0.5 * g.dx(), FinalStepPolicy::Truncate);
  CHECK(exact.step_count == 16);
  CHECK(exact.cells == manual.cells);
  CHECK(run_to(s0, 16 * 0.5 * g.dx(), FinalStepPolicy::Overshoot).cells == manual.cells);
  CHECK(run_to(s0, 0.0).cells == s0.cells);
  CHECK(run_to(s0, 0.0).step_count == 0);

  const auto tr = run_to(s0, 0.2, FinalStepPolicy::Truncate);
  CHECK(tr.time == 0.2);
  CHECK(tr.step_count == 7);  // 6 full steps of 1/32 and a partial one
  const auto ov = run_to(s0, 0.2, FinalStepPolicy::Overshoot);
  CHECK(ov.step_count == 7);
  CHECK(ov.time == doctest::Approx(7.0 / 32.0));
  const auto un = run_to(s0, 0.2, FinalStepPolicy::Uniform);
  CHECK(un.step_count == 7);
  CHECK(un.time == 0.2);

  CHECK(uniform_step_count(0.5, 0.2 * 0.0625) == 41);
  CHECK(uniform_step_count(0.5, 0.5 * 0.0625) == 17);
  CHECK(uniform_step_count(0.0, 0.1) == 0);
  CHECK(parse_final_step_policy("uniform") == FinalStepPolicy::Uniform);
  CHECK_FALSE(parse_final_step_policy("adaptive").has_value());
}

TEST_CASE("literal step-experiment configuration takes 16 steps") {
  const Grid1D g(-1.0, 1.0, 32);
  const auto s = run_to(init(step_datum(), g, kBurgers, FluxKind::Godunov, 0.5), 0.5);
  CHECK(s.step_count == 16);
  CHECK(s.time == 0.5);
}

TEST_CASE("plotted step-experiment cells are reproduced with 41 equal steps at ratio 0.2") {
  const Grid1D g(-1.0, 1.0, reference::kSnapshotCells);
  const auto s = run_to(init(step_datum(), g, kBurgers, FluxKind::Godunov, 0.2), 0.5, FinalStepPolicy::Uniform);
  CHECK(s.step_count == 41);
  for (int i = 0; i < reference::kSnapshotCells; ++i) {
    CHECK(g.center(i) == reference::snapshot_center(i));
    CHECK(std::abs(s.cells[static_cast<std::size_t>(i)] - reference::kStepCells[static_cast<std::size_t>(i)]) <= 1e-9);
  }
}

TEST_CASE("plotted bump cells correspond to t = 0.1 with 4 equal steps at ratio 0.5") {
  const Grid1D g(-1.0, 1.0, reference::kSnapshotCells);
  const auto s = run_to(init(bump_datum(), g, kBurgers, FluxKind::Godunov, 0.5), 0.1, FinalStepPolicy::Uniform);
  CHECK(s.step_count == 4);
  for (int i = 0; i < reference::kSnapshotCells; ++i)
    CHECK(std::abs(s.cells[static_cast<std::size_t>(i)] - reference::kBumpCells[static_cast<std::size_t>(i)]) <= 1e-9);
}

TEST_CASE("discrete Lip+ seminorm") {
  CHECK(dlip_plus(std::vector<double>{0.0, 0.5, 1.0}, 0.1) == doctest::Approx(5.0));
  CHECK(dlip_plus(std::vector<double>{2.0, 2.0, 2.0}, 0.1) == 0.0);
  CHECK(dlip_plus(std::vector<double>{1.0, 0.0}, 0.5) == -2.0);
  CHECK_THROWS(dlip_plus(std::vector<double>{1.0}, 0.5));
  const Grid1D g(-1.0, 1.0, 32);
  CHECK(dlip_plus(init(step_datum(), g, kBurgers, FluxKind::Godunov, 0.5)) == doctest::Approx(16.0));
}

TEST_CASE("runs are deterministic") {
  const Grid1D g(-1.0, 1.0, 100);
  for (auto kind : {FluxKind::Godunov, FluxKind::LaxFriedrichs, FluxKind::EngquistOsher}) {
    const auto a = run_to(init(bump_datum(), g, kBurgers, kind, 0.5), 0.2);
    const auto b = run_to(init(bump_datum(), g, kBurgers, kind, 0.5), 0.2);
    CHECK(a.cells == b.cells);
  }
}

TEST_CASE("observer sees every step") {
  const Grid1D g(-1.0, 1.0, 32);
  int calls = 0;
  double last_time = 0.0;
  run_to(init(bump_datum(), g, kBurgers, FluxKind::Godunov, 0.5), 0.2, FinalStepPolicy::Truncate,
         [&](const NumericalSolution& s, const StepDiagnostics& d) {
           ++calls;
           CHECK(d.dt > 0.0);
           last_time = s.time;
         });
  CHECK(calls == 7);
  CHECK(last_time == doctest::Approx(0.2));
}
