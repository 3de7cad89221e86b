#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "afem/oracle.hpp"

namespace afem {

struct SuiteResult {
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::vector<std::string> lines;  // bands, counts, observed constants
};

struct VerifyOptions {
  std::int64_t n = -1;           // sample count override, suite default when < 0
  std::uint64_t seed = 1234567;  // base seed for the randomized protocols
  std::int64_t max_dofs = 100000;
  int threads = 1;
};

std::vector<std::string> suite_names();

/// Runs one named suite. Unknown names raise a usage error.
SuiteResult run_suite(const std::string& name, const VerifyOptions& opt);

/// Runs the complete acceptance protocol; long adaptive runs are shared
/// between the marking-guarantee, complexity and convergence checks.
std::vector<SuiteResult> run_acceptance(const VerifyOptions& opt);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace afem
