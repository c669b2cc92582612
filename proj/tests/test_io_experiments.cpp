#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fpml/experiments.hpp"
#include "fpml/io.hpp"
#include "fpml/reference.hpp"

using namespace fpml;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / tag) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};
}  // namespace

TEST_SUITE_BEGIN("experiment_cli");

TEST_CASE("field snapshots round trip through the binary format") {
  TempDir tmp("fpml-io-test");
  Grid g = Grid::make(2, 3.0, 16, Boundary::PeriodicTorus);
  Field u = make_initial_datum(g, json{{"kind", "random"}, {"seed", 4}});
  std::string path = (tmp.path / "snap.bin").string();
  write_field_binary(u, path);
  Field v = read_field_binary(path);
  CHECK(v.grid() == g);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] == v[i]);
  write_field_csv(u, (tmp.path / "snap.csv").string());
  std::string text = slurp(tmp.path / "snap.csv");
  CHECK(text.rfind("x0,x1,value", 0) == 0);
}

TEST_CASE("initial datum generators") {
  Grid g = Grid::make(1, 10.0, 128, Boundary::PeriodicTorus);
  Field b = make_initial_datum(g, json{{"kind", "bump"}, {"center", 1.0}, {"width", 0.5}, {"mass", 2.0}});
  CHECK(mass(b) == doctest::Approx(2.0).epsilon(1e-13));
  Field h = make_initial_datum(g, json{{"kind", "heat_kernel"}, {"t0", 0.5}}, 1.0);
  CHECK(mass(h) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(make_initial_datum(g, json{{"kind", "wobble"}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_initial_datum(g, json{{"kind", "heat_kernel"}}),
                  std::invalid_argument);
}

TEST_CASE("registry lists the required experiments in stable order") {
  json a = list_experiments();
  json b = list_experiments();
  CHECK(a == b);
  bool has_mass = false, has_ext = false;
  for (const auto& e : a) {
    if (e.at("name") == "mass-conservation") has_mass = true;
    if (e.at("name") == "extinction-separated") has_ext = true;
  }
  CHECK(has_mass);
  CHECK(has_ext);
  CHECK_THROWS_AS(default_config("no-such-thing"), std::invalid_argument);
  CHECK(default_config("smoothing-rate").contains("porous"));
}

TEST_CASE("config validation rejects malformed schedules before writing") {
  TempDir tmp("fpml-validate-test");
  json cfg = default_config("linear-kernel-check");
  cfg["schedule"]["final_time"] = -0.5;  // negative tau
  CHECK_THROWS_AS(run_experiment(cfg, tmp.path.string()), std::invalid_argument);
  CHECK(fs::is_empty(tmp.path));
  // partial grids merge into the defaults, so an in-range patch is fine but
  // an invalid value must still be rejected
  json bad = json{{"experiment", "linear-kernel-check"},
                  {"grid", {{"points_per_dim", 7}}}};
  CHECK_THROWS_AS(run_experiment(bad, tmp.path.string()), std::invalid_argument);
}

TEST_CASE("experiment bundles are bit-reproducible") {
  TempDir tmp1("fpml-repro-1");
  TempDir tmp2("fpml-repro-2");
  json cfg = default_config("linear-kernel-check");
  cfg["grid"]["points_per_dim"] = 32;
  cfg["sigmas"] = {1.0};
  cfg["ladder"] = {4, 8};
  cfg["schedule"]["steps"] = 8;
  ExperimentResult r1 = run_experiment(cfg, tmp1.path.string());
  ExperimentResult r2 = run_experiment(cfg, tmp2.path.string());
  CHECK(slurp(fs::path(r1.outdir) / "series.csv") ==
        slurp(fs::path(r2.outdir) / "series.csv"));
  CHECK(slurp(fs::path(r1.outdir) / "verdicts.csv") ==
        slurp(fs::path(r2.outdir) / "verdicts.csv"));
  CHECK(fs::exists(fs::path(r1.outdir) / "manifest.json"));
  CHECK(fs::exists(fs::path(r1.outdir) / "plot.csv"));
  // csv floats carry 17 significant digits
  std::string series = slurp(fs::path(r1.outdir) / "series.csv");
  CHECK(series.rfind("t,mass,l1,l2,lmp1,linf,min,energy", 0) == 0);
}

TEST_CASE("sweep fans out and aggregates the exit state") {
  TempDir tmp("fpml-sweep-test");
  json cfg = default_config("linear-kernel-check");
  cfg["grid"]["points_per_dim"] = 32;
  cfg["sigmas"] = {1.0};
  cfg["ladder"] = {4, 8};
  cfg["schedule"]["steps"] = 8;
  ExperimentResult res =
      run_sweep(cfg, "schedule.final_time", {json(0.25), json(0.5)}, tmp.path.string());
  CHECK(res.all_passed);
  CHECK(fs::exists(fs::path(res.outdir) / "sweep_summary.json"));
}

TEST_CASE("compare verb measures errors and tau order against the oracle") {
  TempDir tmp("fpml-compare-test");
  json cfg = {{"experiment", "linear-kernel-check"},  // any registered name validates
              {"grid", {{"dim", 1}, {"half_length", 10.0}, {"points_per_dim", 64}, {"boundary", "torus"}}},
              {"sigma", 1.0},
              {"m", 1.0},
              {"operator_mode", "symbol"},
              {"initial", {{"kind", "heat_kernel"}, {"t0", 1.0}}},
              {"schedule", {{"final_time", 0.5}, {"steps", 32}, {"snapshots", 4}}},
              {"reference", {{"kind", "linear"}}}};
  ExperimentResult res = compare_reference(cfg, tmp.path.string());
  double order = res.summary.at("ladder").at("order").get<double>();
  CHECK(order > 0.7);
  CHECK(order < 1.3);
  CHECK(fs::exists(fs::path(res.outdir) / "errors.csv"));
  json bad = cfg;
  bad["m"] = 2.0;
  CHECK_THROWS_AS(compare_reference(bad, tmp.path.string()), std::invalid_argument);
  json zero = cfg;
  zero["initial"] = {{"kind", "zero"}};
  ExperimentResult zr = compare_reference(zero, tmp.path.string());
  for (const auto& row : zr.summary.at("errors")) CHECK(row.at("l1").get<double>() == 0.0);
}

TEST_CASE("resolvent debug verb writes a converged report") {
  TempDir tmp("fpml-resdebug-test");
  json cfg = {{"experiment", "linear-kernel-check"},
              {"grid", {{"dim", 1}, {"half_length", 5.0}, {"points_per_dim", 64}, {"boundary", "torus"}}},
              {"sigma", 1.0},
              {"m", 2.0},
              {"tau", 0.1},
              {"operator_mode", "kernel-torus"},
              {"initial", {{"kind", "bump"}, {"center", 0.0}, {"width", 1.0}, {"mass", 1.0}}}};
  ExperimentResult res = resolvent_debug(cfg, tmp.path.string());
  CHECK(res.all_passed);
  CHECK(fs::exists(fs::path(res.outdir) / "solution.csv"));
  CHECK(res.summary.at("final_residual").get<double>() <= 1e-9);
}

TEST_CASE("solver failures flag the bundle and keep partial data") {
  TempDir tmp("fpml-failed-test");
  json cfg = default_config("linear-kernel-check");
  cfg["grid"]["points_per_dim"] = 32;
  cfg["sigmas"] = {1.0};
  cfg["ladder"] = {4};
  cfg["schedule"]["steps"] = 4;
  cfg["solver"] = {{"residual_tol_abs", 1e-30}, {"max_newton_iters", 2}};
  ExperimentResult res = run_experiment(cfg, tmp.path.string());
  CHECK(res.failed_run);
  CHECK_FALSE(res.all_passed);
  json manifest = json::parse(slurp(fs::path(res.outdir) / "manifest.json"));
  CHECK(manifest.at("status") == "failed");
  CHECK(fs::exists(fs::path(res.outdir) / "series.csv"));  // partial data kept
}

TEST_CASE("kernel sigma guard rejects extremes unless overridden") {
  json cfg = {{"experiment", "linear-kernel-check"},
              {"grid", {{"dim", 1}, {"half_length", 5.0}, {"points_per_dim", 32}, {"boundary", "torus"}}},
              {"sigma", 1.99},
              {"m", 2.0},
              {"tau", 0.1},
              {"operator_mode", "kernel-torus"},
              {"initial", {{"kind", "bump"}}}};
  TempDir tmp("fpml-guard-test");
  CHECK_THROWS_AS(resolvent_debug(cfg, tmp.path.string()), std::invalid_argument);
  cfg["allow_full_sigma"] = true;
  ExperimentResult res = resolvent_debug(cfg, tmp.path.string());
  CHECK(res.all_passed);
  json sym = cfg;
  sym.erase("allow_full_sigma");
  sym["operator_mode"] = "symbol";
  CHECK(resolvent_debug(sym, tmp.path.string()).all_passed);
}

TEST_SUITE_END();
