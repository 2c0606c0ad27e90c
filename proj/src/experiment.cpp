#include "cllab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>
#include <stdexcept>

#include "cllab/errors.hpp"

namespace cllab {

std::string_view to_string(Experiment e) {
  switch (e) {
  case Experiment::Bump:
    return "bump";
  case Experiment::Step:
    return "step";
  case Experiment::Custom:
    return "custom";
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  if (name == "bump") return Experiment::Bump;
  if (name == "step") return Experiment::Step;
  if (name == "custom") return Experiment::Custom;
  return std::nullopt;
}

double ExperimentConfig::final_time() const {
  if (t_final) return *t_final;
  return experiment == Experiment::Step ? 0.5 : 0.2;
}

void ExperimentConfig::validate(bool dyadic) const {
  if (!(domain_right > domain_left)) throw ConfigError("domain must satisfy left < right");
  if (cells.empty()) throw ConfigError("at least one resolution is required");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (cells[k] < 2) throw ConfigError("resolutions must be at least 2 cells");
    if (k > 0 && cells[k] <= cells[k - 1]) throw ConfigError("resolutions must be strictly increasing");
    if (dyadic && k > 0 && cells[k] != 2 * cells[k - 1])
      throw ConfigError("each resolution must double the previous one");
  }
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (final_time() < 0.0) throw ConfigError("final time must be nonnegative");
  if (experiment == Experiment::Custom && datum.empty())
    throw ConfigError("the custom experiment needs --datum");
}

namespace {

double parse_double(std::string_view s, std::string_view what) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

double round_printed(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

} // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

PiecewiseLinearFn parse_datum(std::string_view text) {
  std::vector<Point> pts;
  for (auto item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) throw ConfigError("datum points must look like x:y");
    pts.push_back({parse_double(item.substr(0, colon), "datum x"),
                   parse_double(item.substr(colon + 1), "datum y")});
  }
  if (pts.empty()) throw ConfigError("empty datum");
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (pts[k].x < pts[k - 1].x) throw ConfigError("datum x coordinates must be nondecreasing");
  return PiecewiseLinearFn::from_points(pts);
}

PiecewiseLinearFn initial_datum(const ExperimentConfig& config) {
  switch (config.experiment) {
  case Experiment::Bump:
    return bump_datum();
  case Experiment::Step:
    return step_datum();
  case Experiment::Custom:
    return parse_datum(config.datum);
  }
  throw ConfigError("unknown experiment");
}

ExactSolution exact_solution(const ExperimentConfig& config) {
  switch (config.experiment) {
  case Experiment::Bump:
    return ExactSolution::bump();
  case Experiment::Step:
    return ExactSolution::rarefaction_step();
  case Experiment::Custom:
    return ExactSolution::custom(parse_datum(config.datum), FluxModel::burgers());
  }
  throw ConfigError("unknown experiment");
}

RunResult run_single(const ExperimentConfig& config, int n_cells) {
  const Grid1D grid(config.domain_left, config.domain_right, n_cells);
  const ExactSolution exact = exact_solution(config);
  const auto s0 = init(exact.datum(), grid, exact.flux(), config.scheme, config.lambda);
  auto s = run_to(s0, config.final_time(), config.final_step);
  RunResult r{std::move(s), {}, 0.0, 0.0};
  r.exact = exact.at(r.solution.time);
  const auto num = r.solution.as_function();
  r.l1_error = l1_distance_on(num, r.exact, grid.left(), grid.right());
  r.w1_error = w1_distance_on(num, r.exact, grid.left(), grid.right());
  return r;
}

std::vector<ErrorReport> convergence_table(const ExperimentConfig& config) {
  config.validate(true);
  const auto datum = initial_datum(config);
  const auto flux = FluxModel::burgers();
  const auto bounds = flux.deriv_bounds({datum.min_value(), datum.max_value()});
  const double tv = total_variation(datum);

  std::vector<std::future<RunResult>> jobs;
  for (int n : config.cells)
    jobs.push_back(std::async(std::launch::async, [&config, n] { return run_single(config, n); }));
  std::vector<ErrorReport> rows;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const RunResult r = jobs[k].get();
    ErrorReport e;
    e.n_cells = config.cells[k];
    e.dx = r.solution.grid.dx();
    e.l1_error = r.l1_error;
    e.w1_error = r.w1_error;
    if (2.0 * bounds.beta1 * config.lambda <= 1.0 + 1e-12)
      e.lower_bound_thm31 =
          thm31_bound_value(bounds.beta1, bounds.beta2, config.lambda, r.solution.time, tv, e.dx);
    rows.push_back(e);
  }
  fill_ooc(rows);
  return rows;
}

std::string run_csv(const RunResult& result) {
  std::string out = "x,u,u_exact\n";
  const auto& g = result.solution.grid;
  for (int i = 0; i < g.n_cells(); ++i) {
    const double x = g.center(i);
    out += format_number(x) + "," + format_number(result.solution.cells[static_cast<std::size_t>(i)]) +
           "," + format_number(result.exact(x)) + "\n";
  }
  return out;
}

std::string table_csv(const std::vector<ErrorReport>& reports) {
  std::string out = "n,dx,l1_error,l1_ooc,w1_error,w1_ooc,thm31_bound\n";
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    std::string l1_ooc, w1_ooc;
    if (k > 0) {
      l1_ooc = format_number(ooc(round_printed(reports[k - 1].l1_error), round_printed(r.l1_error)));
      w1_ooc = format_number(ooc(round_printed(reports[k - 1].w1_error), round_printed(r.w1_error)));
    }
    out += std::to_string(r.n_cells) + "," + format_number(r.dx) + "," + format_number(r.l1_error) +
           "," + l1_ooc + "," + format_number(r.w1_error) + "," + w1_ooc + "," +
           (r.lower_bound_thm31 ? format_number(*r.lower_bound_thm31) : std::string()) + "\n";
  }
  return out;
}

std::vector<ErrorReport> parse_table_csv(std::string_view text) {
  auto lines = split(text, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ConfigError("table is empty");
  auto strip_cr = [](std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
  };
  if (strip_cr(lines[0]) != "n,dx,l1_error,l1_ooc,w1_error,w1_ooc,thm31_bound")
    throw ConfigError("unexpected table header");
  std::vector<ErrorReport> rows;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto f = split(strip_cr(lines[k]), ',');
    if (f.size() != 7) throw ConfigError("table row " + std::to_string(k) + " needs 7 fields");
    auto opt = [](std::string_view s, std::string_view what) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return parse_double(s, what);
    };
    ErrorReport r;
    r.n_cells = static_cast<int>(parse_double(f[0], "n"));
    r.dx = parse_double(f[1], "dx");
    r.l1_error = parse_double(f[2], "l1_error");
    r.l1_ooc = opt(f[3], "l1_ooc");
    r.w1_error = parse_double(f[4], "w1_error");
    r.w1_ooc = opt(f[5], "w1_ooc");
    r.lower_bound_thm31 = opt(f[6], "thm31_bound");
    rows.push_back(r);
  }
  if (rows.empty()) throw ConfigError("table has no rows");
  return rows;
}

double model_dx(double dx) { return dx; }
double model_dx_log(double dx) { return dx * std::abs(std::log2(dx)); }

double log_fit_residual(std::span<const double> dx, std::span<const double> errors,
                        double (*g)(double)) {
  if (dx.size() != errors.size() || dx.empty())
    throw std::invalid_argument("log_fit_residual: size mismatch");
  std::vector<double> r(dx.size());
  double mean = 0.0;
  for (std::size_t k = 0; k < dx.size(); ++k) {
    r[k] = std::log(errors[k]) - std::log(g(dx[k]));
    mean += r[k];
  }
  mean /= static_cast<double>(r.size());
  double sum = 0.0;
  for (double v : r) sum += (v - mean) * (v - mean);
  return sum;
}

std::string plot_svg(const std::vector<ErrorReport>& reports, PlotReferences refs) {
  if (reports.empty()) throw ConfigError("cannot plot an empty table");
  constexpr double W = 640, H = 480, L = 70, R = 20, T = 20, B = 60;

  struct Series {
    std::string name, color, dash;
    std::vector<double> y;
    bool markers;
  };
  std::vector<double> xs;
  for (const auto& r : reports) xs.push_back(r.dx);
  std::vector<Series> series;
  {
    Series l1{"L1 error", "#1f77b4", "", {}, true}, w1{"W1 error", "#d62728", "", {}, true};
    for (const auto& r : reports) {
      l1.y.push_back(r.l1_error);
      w1.y.push_back(r.w1_error);
    }
    series.push_back(std::move(l1));
    series.push_back(std::move(w1));
  }
  const double anchor = reports.front().w1_error;
  if (refs.dx) {
    Series s{"O(dx)", "#555555", "6,4", {}, false};
    for (double x : xs) s.y.push_back(anchor * model_dx(x) / model_dx(xs.front()));
    series.push_back(std::move(s));
  }
  if (refs.dx_log) {
    Series s{"O(dx|log dx|)", "#2ca02c", "2,3", {}, false};
    for (double x : xs) s.y.push_back(anchor * model_dx_log(x) / model_dx_log(xs.front()));
    series.push_back(std::move(s));
  }

  double xmin = *std::min_element(xs.begin(), xs.end());
  double xmax = *std::max_element(xs.begin(), xs.end());
  double ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series)
    for (double y : s.y)
      if (y > 0.0) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
  if (!std::isfinite(ymin)) throw ConfigError("table has no positive errors to plot");
  auto decade_floor = [](double v) { return std::pow(10.0, std::floor(std::log10(v))); };
  auto decade_ceil = [](double v) { return std::pow(10.0, std::ceil(std::log10(v))); };
  xmin = decade_floor(xmin), xmax = decade_ceil(xmax * 1.0000001);
  ymin = decade_floor(ymin), ymax = decade_ceil(ymax * 1.0000001);
  auto px = [&](double x) { return L + (W - L - R) * std::log10(x / xmin) / std::log10(xmax / xmin); };
  auto py = [&](double y) {
    return H - B - (H - T - B) * std::log10(y / ymin) / std::log10(ymax / ymin);
  };

  std::ostringstream svg;
  char buf[256];
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                L, T, W - L - R, H - T - B);
  svg << buf;
  for (double d = xmin; d <= xmax * 1.0001; d *= 10.0) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" text-anchor=\"middle\">%g</text>\n",
                  px(d), H - B + 18, d);
    svg << buf;
  }
  for (double d = ymin; d <= ymax * 1.0001; d *= 10.0) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" text-anchor=\"end\">%g</text>\n",
                  L - 6, py(d) + 4, d);
    svg << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"14\" text-anchor=\"middle\">dx</text>\n",
                L + (W - L - R) / 2, H - 15);
  svg << buf;

  double legend_y = T + 18;
  for (const auto& s : series) {
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
    if (!s.dash.empty()) svg << " stroke-dasharray=\"" << s.dash << "\"";
    svg << " points=\"";
    for (std::size_t k = 0; k < xs.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", k ? " " : "", px(xs[k]), py(s.y[k]));
      svg << buf;
    }
    svg << "\"/>\n";
    if (s.markers)
      for (std::size_t k = 0; k < xs.size(); ++k) {
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n",
                      px(xs[k]), py(s.y[k]), s.color.c_str());
        svg << buf;
      }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" fill=\"%s\">%s</text>\n", L + 12,
                  legend_y, s.color.c_str(), s.name.c_str());
    svg << buf;
    legend_y += 16;
  }
  svg << "</svg>\n";
  return svg.str();
}

} // namespace cllab
