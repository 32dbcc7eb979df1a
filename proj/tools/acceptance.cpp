// One PASS/FAIL line per acceptance criterion; exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "ddcalc/verify.hpp"

namespace {

using ddcalc::verify::RunConfig;
using ddcalc::verify::SuiteReport;

struct Criterion {
  int id;
  std::string title;
  std::vector<std::string> checks;
  double time_limit;  // seconds, 0 for none
};

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool run_criterion(const Criterion& c, const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string error;
  SuiteReport rep;
  try {
    rep = ddcalc::verify::run_checks("criterion", c.checks, cfg);
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double secs = elapsed(t0);
  const bool in_time = c.time_limit <= 0.0 || secs < c.time_limit;
  const bool ok = error.empty() && rep.passed() && !rep.cases.empty() && in_time;
  std::printf("criterion %2d %s  %-44s cases=%zu failures=%zu max_delta/tol=%.3g time=%.2fs",
              c.id, ok ? "PASS" : "FAIL", c.title.c_str(), rep.cases.size(), rep.failures(),
              rep.worst_ratio(), secs);
  if (c.time_limit > 0.0) std::printf(" (limit %.0fs)", c.time_limit);
  if (!error.empty()) std::printf(" error: %s", error.c_str());
  std::printf("\n");
  return ok;
}

// Full CLI run of every suite, twice; both must exit 0 with identical output.
bool run_determinism(const RunConfig& cfg) {
  const double limit = 300.0;
  const std::vector<std::string> args = {"verify", "all", "--seed", std::to_string(cfg.seed)};
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream out1, out2, err;
  const int code1 = ddcalc::cli::run(args, out1, err);
  const double secs = elapsed(t0);
  const int code2 = ddcalc::cli::run(args, out2, err);
  const bool same = out1.str() == out2.str();
  const bool ok = code1 == 0 && code2 == 0 && same && secs < limit;
  std::printf("criterion 12 %s  %-44s exit=%d,%d identical=%s time=%.2fs (limit %.0fs)\n",
              ok ? "PASS" : "FAIL", "verify all: exit 0, deterministic, timed", code1, code2,
              same ? "yes" : "no", secs, limit);
  return ok;
}

}  // namespace

int main() {
  RunConfig cfg;
  cfg.seed = ddcalc::verify::default_seed();

  const std::vector<Criterion> criteria = {
      {1, "divided differences vs simplex and contour", {"dd_genocchi", "dd_contour"}, 30.0},
      {2, "Leibniz and substitution rules", {"leibniz", "substitution"}, 0.0},
      {3, "H/M closed form vs quadrature, homogeneity",
       {"h_integral", "integral_forms", "homogeneity"}, 60.0},
      {4, "Euler-operator form of H", {"euler_form"}, 0.0},
      {5, "H^CM closed forms and relations", {"hcm_grid", "hcm_relations"}, 0.0},
      {6, "Mellin transforms, non-integer z and limit",
       {"mellin", "general_z", "general_z_limit"}, 0.0},
      {7, "operator substitution (commuting family)", {"osl"}, 0.0},
      {8, "rearrangement lhs vs modular contraction", {"rearrangement"}, 120.0},
      {9, "expansional formula: paths and remainder",
       {"exp_paths", "exp_simplex", "exp_remainder"}, 0.0},
      {10, "derivatives, nabla expansion, trace, doubled",
       {"magnus_order", "daleckii_krein", "parametric", "nabla_cubic", "trace_identity",
        "trace_fd", "doubled_contract"},
       0.0},
      {11, "even-K identity", {"even_k"}, 0.0},
  };

  std::printf("acceptance run, seed %llu\n", static_cast<unsigned long long>(cfg.seed));
  int failed = 0;
  for (const auto& c : criteria) failed += run_criterion(c, cfg) ? 0 : 1;
  failed += run_determinism(cfg) ? 0 : 1;
  std::printf("%s: %d of 12 criteria failed\n", failed == 0 ? "PASS" : "FAIL", failed);
  return failed == 0 ? 0 : 1;
}
