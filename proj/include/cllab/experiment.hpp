#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cllab/core.hpp"
#include "cllab/exact.hpp"
#include "cllab/flux.hpp"
#include "cllab/metrics.hpp"
#include "cllab/scheme.hpp"

namespace cllab {

enum class Experiment { Bump, Step, Custom };

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

struct ExperimentConfig {
  Experiment experiment = Experiment::Bump;
  /// Polyline "x:y,x:y,..." for the custom experiment; a repeated x is a jump.
  std::string datum;
  double domain_left = -1.0;
  double domain_right = 1.0;
  FluxKind scheme = FluxKind::Godunov;
  std::vector<int> cells{32};
  double lambda = 0.5;
  /// Defaults: 0.2 for bump and custom, 0.5 for step.
  std::optional<double> t_final;
  FinalStepPolicy final_step = FinalStepPolicy::Truncate;
  double shift = 1.0;
  std::optional<double> x_star;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  bool timestamp = false;

  double final_time() const;
  /// Throws ConfigError. With `dyadic`, each resolution must double the last.
  void validate(bool dyadic) const;
};

PiecewiseLinearFn parse_datum(std::string_view text);
PiecewiseLinearFn initial_datum(const ExperimentConfig& config);
ExactSolution exact_solution(const ExperimentConfig& config);

struct RunResult {
  NumericalSolution solution;
  /// Exact solution at solution.time.
  PiecewiseLinearFn exact;
  double l1_error = 0.0;
  double w1_error = 0.0;
};

/// Runs the configured scheme at one resolution. Errors are measured on the
/// computational domain.
RunResult run_single(const ExperimentConfig& config, int n_cells);

/// One report per configured resolution, computed concurrently and returned
/// in resolution order.
std::vector<ErrorReport> convergence_table(const ExperimentConfig& config);

/// "x,u,u_exact" rows at the cell centers.
std::string run_csv(const RunResult& result);
/// Header n,dx,l1_error,l1_ooc,w1_error,w1_ooc,thm31_bound. OOC values are
/// recomputed from the printed errors so the file is self-consistent.
std::string table_csv(const std::vector<ErrorReport>& reports);
std::vector<ErrorReport> parse_table_csv(std::string_view text);

/// %.12g
std::string format_number(double v);

struct PlotReferences {
  bool dx = true;
  bool dx_log = true;
};

/// Log-log plot of the error columns against dx with reference curves
/// anchored at the coarsest W1 point. Throws ConfigError on an empty table.
std::string plot_svg(const std::vector<ErrorReport>& reports, PlotReferences refs);

/// Least-squares residual in log space of the model e ~ c g(dx), with c
/// fitted: sum of (log e - log c - log g(dx))^2.
double log_fit_residual(std::span<const double> dx, std::span<const double> errors,
                        double (*g)(double));
double model_dx(double dx);
double model_dx_log(double dx);

} // namespace cllab
