// Acceptance suite: runs every gate criterion end to end at its pinned
// tolerance and prints one PASS/FAIL line per criterion.  Exit code 0 iff
// everything passed.  Criteria map onto registry experiments; the claim key
// of every verdict is checked against the pinned list in claims.txt.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "fpml/experiments.hpp"

using namespace fpml;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  std::string id;
  std::string experiment;
  json overrides;  // optional config adjustments
};

std::set<std::string> load_claims() {
  std::set<std::string> claims;
  std::ifstream is(FPML_CLAIMS_FILE);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    claims.insert(line);
  }
  return claims;
}

int g_checked_claims = 0;

bool run_criterion(const Criterion& c, const std::string& out_root,
                   const std::set<std::string>& claims, bool verbose) {
  auto start = std::chrono::steady_clock::now();
  bool pass = false;
  std::string note;
  std::vector<Verdict> verdicts;
  try {
    json cfg = default_config(c.experiment);
    if (!c.overrides.is_null()) cfg.merge_patch(c.overrides);
    ExperimentResult res = run_experiment(cfg, out_root);
    pass = res.all_passed;
    verdicts = res.verdicts;
    for (const auto& v : verdicts) {
      ++g_checked_claims;
      if (!claims.count(v.claim)) {
        pass = false;
        note += " [unpinned claim: " + v.claim + "]";
      }
    }
  } catch (const std::exception& e) {
    pass = false;
    note = std::string(" [exception: ") + e.what() + "]";
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
  std::printf("[%s] %-28s (%s, %.1fs)%s\n", pass ? "PASS" : "FAIL", c.id.c_str(),
              c.experiment.c_str(), secs, note.c_str());
  for (const auto& v : verdicts) {
    if (verbose || !v.pass)
      std::printf("    %s %-46s measured=% .6g tol=% .6g %s\n", v.pass ? "ok  " : "FAIL",
                  v.name.c_str(), v.measured, v.tolerance,
                  v.detail.empty() ? "" : ("| " + v.detail).c_str());
  }
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::string only = argc > 1 ? argv[1] : "";
  bool verbose = false;
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "-v") verbose = true;
  if (only == "-v") only.clear();

  std::string out_root = (fs::temp_directory_path() / "fpmlab-acceptance").string();
  fs::remove_all(out_root);

  const std::vector<Criterion> criteria = {
      {"criterion-01-linear-fidelity", "linear-kernel-check", {}},
      {"criterion-02-explicit-kernel", "heat-kernel-explicit", {}},
      {"criterion-03-operator-crossval", "operator-cross-validation", {}},
      {"criterion-04-contraction", "resolvent-contraction", {}},
      {"criterion-05-mass", "mass-conservation", {}},
      {"criterion-06-extinction", "extinction-separated", {}},
      {"criterion-07-smoothing", "smoothing-rate", {}},
      {"criterion-08-property-suite", "property-suite", {}},
      {"criterion-09-energy-identity", "energy-identity", {}},
      {"criterion-10-inequality-lab", "inequality-lab", {}},
      {"criterion-11-dirichlet", "dirichlet-suite", {}},
      {"criterion-12-continuity", "parameter-continuity", {}},
      {"criterion-13-ode-limit", "ode-limit", {}},
      {"supplementary-critical-mass", "critical-mass", {}},
  };

  std::set<std::string> claims = load_claims();
  auto t0 = std::chrono::steady_clock::now();
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && c.id.find(only) == std::string::npos) continue;
    if (!run_criterion(c, out_root, claims, verbose)) ++failures;
  }
  double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                     .count();
  std::printf("----\n%s: %d failure(s), %d claim checks, %.1fs total, bundles in %s\n",
              failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", failures,
              g_checked_claims, total, out_root.c_str());
  return failures == 0 ? 0 : 1;
}
