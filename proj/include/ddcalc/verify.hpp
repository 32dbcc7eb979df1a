#pragma once

// Seeded fuzz suites that check the library's identities against
// independent evaluation routes (quadrature, finite differences, brute
// force in a doubled algebra). Every case is recorded with both sides.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ddcalc/matcalc.hpp"

namespace ddcalc::verify {

// Deterministic generator: mt19937_64 with uniforms built from the top 53
// bits, so results do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  double uniform();                     // [0, 1)
  double uniform(double lo, double hi);
  int integer(int lo, int hi);          // inclusive
  double normal();
  bool coin() { return (next() >> 63) != 0; }

  matcalc::Matrix general(int dim, double scale = 1.0);
  matcalc::Matrix hermitian(int dim, double scale = 1.0);
  matcalc::Matrix unitary(int dim);

 private:
  std::mt19937_64 engine_;
};

struct CaseRecord {
  std::string check;
  int index = 0;
  std::string inputs;
  double lhs = 0.0;
  double rhs = 0.0;
  double delta = 0.0;      // |lhs - rhs| (or the quantity the check bounds)
  double tolerance = 0.0;  // absolute threshold applied to delta
  bool pass = false;
  std::string error;       // set when the case raised
};

struct SuiteReport {
  std::string suite;
  std::vector<CaseRecord> cases;
  double seconds = 0.0;  // wall clock, not part of machine-readable output

  bool passed() const;
  std::size_t failures() const;
  // max delta / tolerance over all cases (0 if empty).
  double worst_ratio() const;
};

struct RunConfig {
  std::uint64_t seed = 1;
  int dim = 0;      // 0: each case draws its own dimension
  int cases = 0;    // 0: per-check default counts
  double tol_scale = 1.0;
};

// DDCALC_SEED if set and numeric, else 1.
std::uint64_t default_seed();

const std::vector<std::string>& suite_names();
const std::vector<std::string>& check_names(const std::string& suite);
bool is_suite(const std::string& name);

// Runs one suite, or every suite for "all" (cases concatenated in suite
// order). Throws PreconditionError for unknown names.
SuiteReport run_suite(const std::string& name, const RunConfig& config);

// Runs the named checks only.
SuiteReport run_checks(const std::string& label, const std::vector<std::string>& checks,
                       const RunConfig& config);

}  // namespace ddcalc::verify
