// Acceptance harness: runs every verification suite at full scale and
// prints one PASS/FAIL line per criterion. Exit code 0 only when all pass.

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "afem/verify.hpp"

int main(int argc, char** argv) {
  afem::VerifyOptions opt;
  opt.seed = 1234567;
  opt.max_dofs = 100000;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--max-dofs") == 0 && i + 1 < argc)
      opt.max_dofs = std::atoll(argv[++i]);
    if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
      opt.seed = static_cast<std::uint64_t>(std::atoll(argv[++i]));
  }

  const std::vector<afem::SuiteResult> results = afem::run_acceptance(opt);
  bool ok = true;
  int idx = 1;
  for (const auto& r : results) {
    std::printf("criterion %2d %-13s %s  (%.2fs)\n", idx++, r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.seconds);
    for (const auto& line : r.lines) std::printf("      %s\n", line.c_str());
    std::fflush(stdout);
    ok = ok && r.pass;
  }
  std::printf("acceptance: %s\n", ok ? "ALL PASS" : "FAILURES");
  return ok ? 0 : 1;
}
