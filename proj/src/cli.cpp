#include "cllab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cllab/certificate.hpp"
#include "cllab/errors.hpp"
#include "cllab/experiment.hpp"

namespace cllab {

namespace {

namespace fs = std::filesystem;

struct Flags {
  std::optional<std::string> experiment, datum, scheme, cells, final_step, out, config, domain;
  std::optional<double> lambda, tfinal, shift, xstar;
  std::optional<std::uint64_t> seed;
  bool timestamp = false;
  // plot
  std::string table;
  std::string references = "dx,dxlog";
};

void add_common(CLI::App* sc, Flags& f) {
  sc->add_option("--experiment", f.experiment, "bump, step or custom");
  sc->add_option("--datum", f.datum, "custom datum as x:y,x:y,... (repeat x for a jump)");
  sc->add_option("--scheme", f.scheme, "godunov, lxf or eo");
  sc->add_option("--cells", f.cells, "comma-separated resolutions");
  sc->add_option("--lambda", f.lambda, "mesh ratio dt/dx");
  sc->add_option("--tfinal", f.tfinal, "final time");
  sc->add_option("--final-step", f.final_step, "truncate, overshoot or uniform");
  sc->add_option("--shift", f.shift, "constant added to the datum before certifying");
  sc->add_option("--xstar", f.xstar, "cut origin of the truncation");
  sc->add_option("--domain", f.domain, "computational interval as left,right");
  sc->add_option("--out", f.out, "output directory");
  sc->add_option("--config", f.config, "JSON config file; flags override it");
  sc->add_option("--seed", f.seed, "random seed for selftest");
  sc->add_flag("--timestamp", f.timestamp, "write a timestamp into certificate JSON");
}

std::vector<int> parse_cells(const std::string& text) {
  std::vector<int> cells;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int n = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      cells.push_back(n);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse resolution '" + item + "'");
    }
  }
  return cells;
}

void set_scheme(ExperimentConfig& c, const std::string& name) {
  const auto k = parse_flux_kind(name);
  if (!k) throw ConfigError("unknown scheme '" + name + "'; valid schemes: godunov, lxf, eo");
  c.scheme = *k;
}

void set_experiment(ExperimentConfig& c, const std::string& name) {
  const auto e = parse_experiment(name);
  if (!e) throw ConfigError("unknown experiment '" + name + "'; valid experiments: bump, step, custom");
  c.experiment = *e;
}

void set_final_step(ExperimentConfig& c, const std::string& name) {
  const auto p = parse_final_step_policy(name);
  if (!p)
    throw ConfigError("unknown final-step policy '" + name +
                      "'; valid policies: truncate, overshoot, uniform");
  c.final_step = *p;
}

void set_domain(ExperimentConfig& c, const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("--domain needs left,right");
  try {
    c.domain_left = std::stod(text.substr(0, comma));
    c.domain_right = std::stod(text.substr(comma + 1));
  } catch (const std::exception&) {
    throw ConfigError("cannot parse domain '" + text + "'");
  }
}

void apply_json(ExperimentConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "experiment") set_experiment(c, v.get<std::string>());
      else if (key == "datum") c.datum = v.get<std::string>();
      else if (key == "scheme") set_scheme(c, v.get<std::string>());
      else if (key == "cells")
        c.cells = v.is_string() ? parse_cells(v.get<std::string>()) : v.get<std::vector<int>>();
      else if (key == "lambda") c.lambda = v.get<double>();
      else if (key == "tfinal") c.t_final = v.get<double>();
      else if (key == "final_step" || key == "final-step") set_final_step(c, v.get<std::string>());
      else if (key == "shift") c.shift = v.get<double>();
      else if (key == "xstar") c.x_star = v.get<double>();
      else if (key == "domain") {
        const auto d = v.get<std::vector<double>>();
        if (d.size() != 2) throw ConfigError("domain needs two numbers");
        c.domain_left = d[0];
        c.domain_right = d[1];
      } else if (key == "out") c.out_dir = v.get<std::string>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "timestamp") c.timestamp = v.get<bool>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
}

struct Resolved {
  ExperimentConfig config;
  bool lambda_given = false;
};

Resolved resolve(const Flags& f) {
  Resolved r;
  ExperimentConfig& c = r.config;
  if (f.config) {
    apply_json(c, *f.config);
    std::ifstream in(*f.config);
    nlohmann::json j;
    in >> j;
    r.lambda_given = j.contains("lambda");
  }
  if (f.experiment) set_experiment(c, *f.experiment);
  if (f.datum) c.datum = *f.datum;
  if (f.scheme) set_scheme(c, *f.scheme);
  if (f.cells) c.cells = parse_cells(*f.cells);
  if (f.lambda) {
    c.lambda = *f.lambda;
    r.lambda_given = true;
  }
  if (f.tfinal) c.t_final = *f.tfinal;
  if (f.final_step) set_final_step(c, *f.final_step);
  if (f.shift) c.shift = *f.shift;
  if (f.xstar) c.x_star = *f.xstar;
  if (f.domain) set_domain(c, *f.domain);
  if (f.out) c.out_dir = *f.out;
  if (f.seed) c.seed = *f.seed;
  if (f.timestamp) c.timestamp = true;
  return r;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int cmd_run(const ExperimentConfig& c, std::ostream& out) {
  c.validate(false);
  for (int n : c.cells) {
    const RunResult r = run_single(c, n);
    const fs::path path = fs::path(c.out_dir) / ("run_" + std::string(to_string(c.experiment)) + "_" +
                                                 std::string(to_string(c.scheme)) + "_n" +
                                                 std::to_string(n) + ".csv");
    write_file(path, run_csv(r));
    out << path.string() << ": n=" << n << " t=" << format_number(r.solution.time)
        << " steps=" << r.solution.step_count << " l1=" << format_number(r.l1_error)
        << " w1=" << format_number(r.w1_error) << "\n";
  }
  return kExitOk;
}

int cmd_table(const ExperimentConfig& c, std::ostream& out) {
  const auto rows = convergence_table(c);
  const std::string csv = table_csv(rows);
  const fs::path path = fs::path(c.out_dir) / ("table_" + std::string(to_string(c.experiment)) + "_" +
                                               std::string(to_string(c.scheme)) + ".csv");
  write_file(path, csv);
  out << csv << "written to " << path.string() << "\n";
  return kExitOk;
}

int cmd_certificate(Resolved r, std::ostream& out, std::ostream& err) {
  ExperimentConfig& c = r.config;
  c.validate(false);
  const auto datum = initial_datum(c);
  const auto flux = FluxModel::burgers();
  const double t_final = c.t_final.value_or(0.1);
  if (!r.lambda_given) c.lambda = 0.5 / flux.derivative(datum.max_value() + c.shift);
  CertificateOptions opt;
  opt.x_star = c.x_star;
  opt.shift = c.shift;
  opt.scheme = c.scheme;
  bool all_pass = true;
  for (int n : c.cells) {
    const Grid1D grid(c.domain_left, c.domain_right, n);
    const Certificate cert = build_certificate(datum, grid, flux, c.lambda, t_final, opt);
    const fs::path path = fs::path(c.out_dir) / ("certificate_" + std::string(to_string(c.experiment)) +
                                                 "_n" + std::to_string(n) + ".json");
    write_file(path, to_json(cert, c.timestamp ? std::optional<std::string>(utc_now()) : std::nullopt));
    out << path.string() << ": n=" << n << " measured_w1=" << format_number(cert.measured_w1)
        << " sum=" << format_number(cert.sum)
        << " (N+1)*bound=" << format_number(cert.prop32_per_step * static_cast<double>(cert.per_step.size()))
        << " verdict=" << (cert.pass() ? "pass" : "fail") << "\n";
    for (const auto& f : cert.failures) err << "  " << f << "\n";
    all_pass = all_pass && cert.pass();
  }
  return all_pass ? kExitOk : kExitCertificateFailed;
}

int cmd_plot(const Flags& f, const ExperimentConfig& c, std::ostream& out) {
  if (f.table.empty()) throw ConfigError("plot needs --table <csv>");
  const auto rows = parse_table_csv(read_file(f.table));
  PlotReferences refs{false, false};
  std::stringstream ss(f.references);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "dx") refs.dx = true;
    else if (item == "dxlog") refs.dx_log = true;
    else if (!item.empty()) throw ConfigError("unknown reference '" + item + "'; valid: dx, dxlog");
  }
  const fs::path path = fs::path(c.out_dir) / (fs::path(f.table).stem().string() + ".svg");
  write_file(path, plot_svg(rows, refs));
  std::vector<double> dx, w1;
  for (const auto& r : rows) {
    dx.push_back(r.dx);
    w1.push_back(r.w1_error);
  }
  out << path.string() << "\n";
  if (rows.size() >= 2)
    out << "log residual of W1 vs c*dx: " << format_number(log_fit_residual(dx, w1, model_dx))
        << ", vs c*dx|log2 dx|: " << format_number(log_fit_residual(dx, w1, model_dx_log)) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- selftest

PiecewiseLinearFn random_nondecreasing(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 8);
  const int k = count(rng);
  std::vector<double> xs;
  for (int i = 0; i < k; ++i) xs.push_back(-0.9 + 1.8 * unit(rng));
  std::sort(xs.begin(), xs.end());
  std::vector<Point> pts;
  double y = unit(rng) - 0.5;
  for (double x : xs) {
    pts.push_back({x, y});
    if (unit(rng) < 0.3) {
      y += unit(rng);
      pts.push_back({x, y});
    }
    y += 0.5 * unit(rng);
  }
  pts.back().y = std::max(pts.back().y, y);
  return PiecewiseLinearFn::from_points(pts);
}

int cmd_selftest(const ExperimentConfig& c, std::ostream& out) {
  std::mt19937_64 rng(c.seed);
  const Grid1D grid(-1.0, 1.0, 32);
  const auto burgers = FluxModel::burgers();
  bool ok = true;
  auto report = [&](const char* name, bool pass, double worst) {
    out << "selftest " << name << ": " << (pass ? "pass" : "FAIL") << " (worst " << format_number(worst)
        << ")\n";
    ok = ok && pass;
  };

  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const auto v = random_nondecreasing(rng);
    worst = std::min(worst, primitive_difference(project(v, grid), v).min());
  }
  report("projection positivity", worst >= -1e-12, worst);

  double worst_mono = 0.0, worst_range = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto v = random_nondecreasing(rng);
    const double scale = std::max(std::abs(v.min_value()), std::abs(v.max_value()));
    if (scale == 0.0) continue;
    for (FluxKind kind : {FluxKind::Godunov, FluxKind::LaxFriedrichs, FluxKind::EngquistOsher}) {
      const double lambda = 0.5 / scale;
      auto s = init(v, grid, burgers, kind, lambda);
      const double lo = v.min_value(), hi = v.max_value();
      for (int n = 0; n < 10; ++n) {
        s = step(s);
        for (std::size_t i = 0; i + 1 < s.cells.size(); ++i)
          worst_mono = std::min(worst_mono, s.cells[i + 1] - s.cells[i]);
        for (double u : s.cells) worst_range = std::max({worst_range, lo - u, u - hi});
      }
    }
  }
  report("monotonicity preservation", worst_mono >= -1e-12, worst_mono);
  report("maximum principle", worst_range <= 1e-12, worst_range);

  double worst_tri = 0.0;
  for (int k = 0; k < 100; ++k) {
    auto a = project(random_nondecreasing(rng), grid);
    auto b = project(random_nondecreasing(rng), grid);
    auto d = project(random_nondecreasing(rng), grid);
    const double ab = w1_distance_on(a, b, -1, 1), bd = w1_distance_on(b, d, -1, 1),
                 ad = w1_distance_on(a, d, -1, 1), ba = w1_distance_on(b, a, -1, 1);
    worst_tri = std::max({worst_tri, ad - ab - bd, std::abs(ab - ba)});
  }
  report("W1 triangle inequality and symmetry", worst_tri <= 1e-12, worst_tri);
  return ok ? kExitOk : kExitFailure;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-volume schemes for scalar conservation laws with exact W1 error analysis",
               args.empty() ? "cllab" : args.front()};
  app.require_subcommand(1);
  Flags flags;
  auto* run = app.add_subcommand("run", "write per-resolution solution snapshots");
  auto* table = app.add_subcommand("table", "write an L1/W1 convergence table");
  auto* cert = app.add_subcommand("certificate", "build the W1 lower-bound certificate");
  auto* plot = app.add_subcommand("plot", "log-log SVG plot of a convergence table");
  auto* self = app.add_subcommand("selftest", "randomized property checks");
  for (auto* sc : {run, table, cert, plot, self}) add_common(sc, flags);
  plot->add_option("--table", flags.table, "convergence table CSV")->required();
  plot->add_option("--references", flags.references, "reference curves: dx, dxlog");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    Resolved r = resolve(flags);
    if (*run) return cmd_run(r.config, out);
    if (*table) return cmd_table(r.config, out);
    if (*cert) return cmd_certificate(r, out, err);
    if (*plot) return cmd_plot(flags, r.config, out);
    if (*self) return cmd_selftest(r.config, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

} // namespace cllab
