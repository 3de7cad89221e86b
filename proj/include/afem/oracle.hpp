#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "afem/driver.hpp"

namespace afem {

/// All populations grouped by the number of added persons.
struct EnumerationIndex {
  std::vector<std::vector<Population>> by_size;  // by_size[m]
  std::int64_t total = 0;
};

struct OptimalRecord {
  std::int64_t m = 0;
  std::int64_t count = 0;  // populations in the size class
  double gopt = 0.0;
  Population popt;  // lexicographically smallest minimizer
  std::uint64_t digest = 0;
};

class OracleLab {
 public:
  OracleLab(Forest& forest, Genealogy& gen)
      : forest_(&forest), gen_(&gen), ops_(forest, gen), fem_(forest, gen) {}

  /// Breadth-first closure over one-person extensions with set-level
  /// de-duplication; aborts when the projected count exceeds the budget.
  EnumerationIndex enumerate_populations(std::int32_t m_max,
                                         std::int64_t budget = 10'000'000) const;

  /// Independent recursive backtracking counter (canonical-order insertion,
  /// no de-duplication needed) for completeness cross-checks.
  std::int64_t count_populations_backtracking(std::int32_t m) const;

  /// Minimal total energies over the size classes; G_opt is non-increasing.
  std::vector<OptimalRecord> g_opt_table(const EnumerationIndex& index, const SourceField& f,
                                         double cg_tol) const;

  /// Smallest integer C such that #(P_k \ P_bot) >= C m implies
  /// G(P_k) <= G_opt[m] over the whole trace and all 1 <= m <= m_max.
  std::int64_t observed_energy_optimality_constant(
      const std::vector<std::pair<std::int64_t, double>>& trace_added_g,
      const std::vector<OptimalRecord>& gopt) const;

  /// Lower diamond below `top` of size m: picks m seed persons whose
  /// descendant closures inside `top` are pairwise disjoint; flanks remove
  /// one closure each. CannotPlace when the seeds cannot be found.
  Diamond random_lower_diamond(const Population& top, int m, std::mt19937_64& rng) const;

  std::uint64_t digest(const Population& p) const;

 private:
  std::vector<VertexId> extensions(const Population& p) const;

  Forest* forest_;
  Genealogy* gen_;
  mutable TriangulationOps ops_;
  mutable Fem fem_;
};

}  // namespace afem
