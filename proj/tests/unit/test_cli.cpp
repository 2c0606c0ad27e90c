#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cllab/cli.hpp"

#if defined(__unix__) || defined(__APPLE__)
#include <sys/wait.h>
#endif

namespace fs = std::filesystem;
using namespace cllab;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("cllab_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cllab");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("run writes the step snapshot") {
  TempDir dir;
  const auto r = cli({"run", "--experiment", "step", "--cells", "32", "--lambda", "0.2", "--final-step",
                      "uniform", "--out", dir.str()});
  REQUIRE(r.code == kExitOk);
  const auto csv = slurp(dir.path / "run_step_godunov_n32.csv");
  CHECK(csv.rfind("x,u,u_exact\n", 0) == 0);
  CHECK(csv.find("\n0.03125,0.193635350086,") != std::string::npos);
}

TEST_CASE("run at T = 0 is the projected datum") {
  TempDir dir;
  const auto r = cli({"run", "--experiment", "bump", "--cells", "32", "--tfinal", "0", "--out", dir.str()});
  REQUIRE(r.code == kExitOk);
  const auto csv = slurp(dir.path / "run_bump_godunov_n32.csv");
  // cell [-0.75, -0.6875] holds the ramp average 0.0625
  CHECK(csv.find("\n-0.71875,0.0625,") != std::string::npos);
}

TEST_CASE("invalid input returns exit code 2") {
  TempDir dir;
  auto r = cli({"run", "--scheme", "upwind", "--out", dir.str()});
  CHECK(r.code == kExitConfigError);
  CHECK(r.err.find("valid schemes: godunov, lxf, eo") != std::string::npos);
  CHECK(cli({"table", "--cells", "16,48", "--out", dir.str()}).code == kExitConfigError);
  CHECK(cli({"run", "--lambda", "1.5", "--out", dir.str()}).code == kExitConfigError);
  CHECK(cli({"run", "--bogus"}).code == kExitConfigError);
  CHECK(cli({"frobnicate"}).code == kExitConfigError);
}

TEST_CASE("certificate subcommand") {
  TempDir dir;
  auto r = cli({"certificate", "--experiment", "bump", "--cells", "64", "--out", dir.str()});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir.path / "certificate_bump_n64.json"));
  CHECK(j["verdict"] == "pass");
  CHECK(j["lambda"].get<double>() == doctest::Approx(0.25));
  CHECK_FALSE(j.contains("timestamp"));

  CHECK(cli({"certificate", "--experiment", "step", "--cells", "64", "--out", dir.str()}).code ==
        kExitConfigError);
  CHECK(cli({"certificate", "--lambda", "0.6", "--cells", "64", "--out", dir.str()}).code == kExitConfigError);
  CHECK(cli({"certificate", "--scheme", "lxf", "--cells", "64", "--out", dir.str()}).code == kExitConfigError);

  REQUIRE(cli({"certificate", "--cells", "32", "--timestamp", "--out", dir.str()}).code == kExitOk);
  CHECK(nlohmann::json::parse(slurp(dir.path / "certificate_bump_n32.json")).contains("timestamp"));
}

TEST_CASE("config file with flag overrides") {
  TempDir dir;
  const auto cfg = dir.path / "cfg.json";
  std::ofstream(cfg) << R"({"experiment": "step", "cells": [16, 32], "lambda": 0.2, "final_step": "uniform"})";
  auto r = cli({"table", "--config", cfg.string(), "--cells", "16,32,64", "--out", dir.str()});
  REQUIRE(r.code == kExitOk);
  const auto table = slurp(dir.path / "table_step_godunov.csv");
  int lines = 0;
  for (char ch : table) lines += ch == '\n';
  CHECK(lines == 4);
  CHECK(table.find("\n16,0.125,0.0924631083") != std::string::npos);

  std::ofstream(dir.path / "bad.json") << R"({"lamda": 0.2})";
  CHECK(cli({"run", "--config", (dir.path / "bad.json").string()}).code == kExitConfigError);
  CHECK(cli({"run", "--config", (dir.path / "missing.json").string()}).code == kExitConfigError);
}

TEST_CASE("reruns are byte-identical") {
  TempDir a, b;
  for (const auto* d : {&a, &b})
    REQUIRE(cli({"table", "--experiment", "bump", "--cells", "16,32,64", "--out", d->str()}).code == kExitOk);
  CHECK(slurp(a.path / "table_bump_godunov.csv") == slurp(b.path / "table_bump_godunov.csv"));
}

TEST_CASE("plot writes an SVG next to the table") {
  TempDir dir;
  REQUIRE(cli({"table", "--cells", "16,32,64", "--out", dir.str()}).code == kExitOk);
  const auto table = (dir.path / "table_bump_godunov.csv").string();
  auto r = cli({"plot", "--table", table, "--out", dir.str()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("log residual") != std::string::npos);
  CHECK(slurp(dir.path / "table_bump_godunov.svg").rfind("<svg", 0) == 0);
  CHECK(cli({"plot", "--out", dir.str()}).code == kExitConfigError);
  CHECK(cli({"plot", "--table", table, "--references", "dx2"}).code == kExitConfigError);
}

TEST_CASE("selftest passes") {
  const auto r = cli({"selftest", "--seed", "7"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("the installed binary maps errors to exit codes") {
  TempDir dir;
  const std::string tool = CLLAB_TOOL_PATH;
  const std::string quiet = " > " + (dir.path / "log.txt").string() + " 2>&1";
  auto status = [](int raw) {
#ifdef WEXITSTATUS
    return WEXITSTATUS(raw);
#else
    return raw;
#endif
  };
  CHECK(status(std::system(("\"" + tool + "\" selftest" + quiet).c_str())) == 0);
  CHECK(status(std::system(("\"" + tool + "\" run --scheme nope" + quiet).c_str())) == 2);
}
