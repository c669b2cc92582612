#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpmlab.h"

using nlohmann::json;

namespace {
std::string with_buffer(fpml_status (*probe)(char*, uint64_t, uint64_t*)) {
  uint64_t needed = 0;
  REQUIRE(probe(nullptr, 0, &needed) == FPML_OK);
  std::string buf(needed, '\0');
  REQUIRE(probe(buf.data(), needed, &needed) == FPML_OK);
  buf.pop_back();
  return buf;
}
}  // namespace

TEST_SUITE_BEGIN("capi");

TEST_CASE("version and error text") {
  CHECK(std::strcmp(fpml_version(), "0.1.0") == 0);
  fpml_grid* g = nullptr;
  CHECK(fpml_grid_create(1, 1.0, 7, FPML_BOUNDARY_TORUS, &g) ==
        FPML_ERROR_INVALID_ARGUMENT);
  CHECK(std::strlen(fpml_last_error()) > 0);
}

TEST_CASE("grid and field lifecycle") {
  fpml_grid* g = nullptr;
  REQUIRE(fpml_grid_create(1, 10.0, 64, FPML_BOUNDARY_TORUS, &g) == FPML_OK);
  int dim = 0, m = 0, boundary = -1;
  double l = 0.0;
  uint64_t nodes = 0;
  REQUIRE(fpml_grid_info(g, &dim, &l, &m, &boundary, &nodes) == FPML_OK);
  CHECK(dim == 1);
  CHECK(l == 10.0);
  CHECK(m == 64);
  CHECK(boundary == 0);
  CHECK(nodes == 64);

  fpml_field* f = nullptr;
  REQUIRE(fpml_field_create(g, &f) == FPML_OK);
  REQUIRE(fpml_field_fill_bump(f, 0.0, 0.0, 1.0, 2.5) == FPML_OK);
  double total = 0.0;
  REQUIRE(fpml_mass(f, &total) == FPML_OK);
  CHECK(total == doctest::Approx(2.5).epsilon(1e-12));

  std::vector<double> values(nodes);
  REQUIRE(fpml_field_get_values(f, values.data(), nodes) == FPML_OK);
  values[0] += 1.0;
  REQUIRE(fpml_field_set_values(f, values.data(), nodes) == FPML_OK);
  double norm = 0.0;
  REQUIRE(fpml_norm_lp(f, 1.0, &norm) == FPML_OK);
  CHECK(norm > 0.0);
  CHECK(fpml_norm_lp(f, 0.5, &norm) == FPML_ERROR_INVALID_ARGUMENT);

  fpml_field_destroy(f);
  fpml_grid_destroy(g);
}

TEST_CASE("operator application and heat kernel through the c surface") {
  fpml_grid* g = nullptr;
  REQUIRE(fpml_grid_create(1, 10.0, 64, FPML_BOUNDARY_TORUS, &g) == FPML_OK);
  fpml_field* k = nullptr;
  REQUIRE(fpml_heat_kernel(g, 1.3, 0.5, &k) == FPML_OK);
  double total = 0.0;
  REQUIRE(fpml_mass(k, &total) == FPML_OK);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

  fpml_field* a = nullptr;
  REQUIRE(fpml_apply_operator(k, 1.0, FPML_MODE_SYMBOL, &a) == FPML_OK);
  REQUIRE(fpml_mass(a, &total) == FPML_OK);
  CHECK(std::abs(total) < 1e-12);

  fpml_field_destroy(a);
  fpml_field_destroy(k);
  fpml_grid_destroy(g);
}

TEST_CASE("resolvent solve returns a parsable report") {
  fpml_grid* g = nullptr;
  REQUIRE(fpml_grid_create(1, 5.0, 64, FPML_BOUNDARY_TORUS, &g) == FPML_OK);
  fpml_field* f = nullptr;
  REQUIRE(fpml_field_create(g, &f) == FPML_OK);
  REQUIRE(fpml_field_fill_bump(f, 0.0, 0.0, 1.0, 1.0) == FPML_OK);

  fpml_field* u = nullptr;
  char report[512];
  uint64_t needed = 0;
  REQUIRE(fpml_resolvent_solve(f, 0.1, 1.0, 2.0, FPML_MODE_KERNEL_TORUS, nullptr, &u,
                               report, sizeof(report), &needed) == FPML_OK);
  json rep = json::parse(report);
  CHECK(rep.at("converged").get<bool>());
  CHECK(rep.at("final_residual").get<double>() <= 1e-9);
  double mf = 0.0, mu = 0.0;
  fpml_mass(f, &mf);
  fpml_mass(u, &mu);
  CHECK(mu == doctest::Approx(mf).epsilon(1e-12));

  fpml_field_destroy(u);
  fpml_field_destroy(f);
  fpml_grid_destroy(g);
}

TEST_CASE("experiment registry surface") {
  std::string listing = with_buffer(fpml_experiments_list);
  json arr = json::parse(listing);
  bool has_mass = false;
  for (const auto& e : arr)
    if (e.at("name") == "mass-conservation") has_mass = true;
  CHECK(has_mass);

  uint64_t needed = 0;
  REQUIRE(fpml_experiment_default_config("extinction-separated", nullptr, 0, &needed) ==
          FPML_OK);
  std::string cfg(needed, '\0');
  REQUIRE(fpml_experiment_default_config("extinction-separated", cfg.data(), needed,
                                         &needed) == FPML_OK);
  CHECK(json::parse(cfg.c_str()).at("sigma").get<double>() == 0.5);

  CHECK(fpml_experiment_default_config("nope", nullptr, 0, &needed) ==
        FPML_ERROR_INVALID_ARGUMENT);

  // buffer-too-small path
  char tiny[4];
  CHECK(fpml_experiment_default_config("extinction-separated", tiny, sizeof(tiny),
                                       &needed) == FPML_ERROR_BUFFER_TOO_SMALL);
}

TEST_CASE("calibration error propagates with a message") {
  json cfg = {{"grid", {{"dim", 1}, {"half_length", 10.0}, {"points_per_dim", 16}, {"boundary", "freespace"}}},
              {"sigma", 0.5},
              {"c", 0.25},
              {"center", 0.0}};
  uint64_t needed = 0;
  fpml_status st =
      fpml_calibrate_extinction(cfg.dump().c_str(), nullptr, 0, &needed);
  CHECK(st == FPML_ERROR_RUNTIME);
  CHECK(std::string(fpml_last_error()).find("calibration") != std::string::npos);
}

TEST_SUITE_END();
