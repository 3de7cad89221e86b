#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "afem/marking.hpp"

namespace afem {

struct AfemConfig {
  std::string problem = "square-ones";
  double mu = 0.5;
  Marker marker = Marker::reference;
  std::int64_t max_dofs = -1;   // stop when the interior node count reaches this
  std::int64_t max_iters = -1;  // stop after this many SOLVE..REFINE rounds
  double est_tol = -1.0;        // stop when the total squared estimator drops below
  double cg_tol = 1e-12;
  int threads = 1;
  std::uint64_t seed = 0;  // consumed by randomized verification only

  /// mu in (0,1], exactly one stopping rule set.
  void validate() const;
};

struct IterationRecord {
  std::int64_t k = 0;
  std::int64_t leaves = 0;
  std::int64_t persons = 0;
  std::int64_t dofs = 0;
  std::int64_t marked = 0;
  std::int64_t closure = 0;
  double J = 0.0, H = 0.0, G = 0.0, osc2 = 0.0, est2 = 0.0;
  double h1err = std::numeric_limits<double>::quiet_NaN();
  double max_indicator = 0.0;
  double solve_s = 0.0, estimate_s = 0.0, mark_s = 0.0, refine_s = 0.0;
};

struct RunResult {
  std::vector<IterationRecord> records;
  bool converged = false;  // MARK found all indicators zero
  std::string stop_reason;
};

/// One AFEM session: forest, genealogy and the loop state for one problem.
class Driver {
 public:
  explicit Driver(const Problem& problem);

  /// SOLVE - ESTIMATE - MARK - REFINE until the configured stopping rule.
  /// `check_guarantees` asserts the marked-set lower bound each iteration.
  RunResult run(const AfemConfig& cfg, bool check_guarantees = false);

  /// Per-iteration hook, called after each completed record.
  std::function<void(const IterationRecord&)> on_record;

  /// Diagnostic hook, called after MARK and before REFINE with the solved
  /// triangulation, its edges and indicators; the outcome is null on the
  /// final (stopping) iteration.
  std::function<void(const IterationRecord&, const Triangulation&, const EdgeSet&,
                     const IndicatorField&, const MarkOutcome*)>
      on_iteration;

  /// Fills MarkOutcome::trace on every iteration (costs memory on big runs).
  bool collect_mark_traces = false;

  Forest& forest() { return forest_; }
  Genealogy& genealogy() { return gen_; }
  TriangulationOps& ops() { return ops_; }
  Fem& fem() { return fem_; }
  Estimator& estimator() { return est_; }
  Marking& marking() { return marking_; }
  const Triangulation& current() const { return tri_; }
  const SourceField& field() const { return field_; }

 private:
  Forest forest_;
  Genealogy gen_;
  TriangulationOps ops_;
  Fem fem_;
  Estimator est_;
  Marking marking_;
  SourceField field_;
  Triangulation tri_;
};

/// Running ratios (#T_k - #T_bot) / sum_{i<k} #M_i, k >= 1, plus the max.
struct ComplexityAudit {
  std::vector<double> ratios;
  double running_max = 0.0;
};
ComplexityAudit complexity_audit(const std::vector<IterationRecord>& records);

/// Exact CSV columns:
/// k,leaves,persons,marked,closure,J,H,G,osc2,est2,h1err,solve_s,estimate_s,mark_s,refine_s
std::string records_to_csv(const std::vector<IterationRecord>& records);
std::string records_to_json(const std::vector<IterationRecord>& records);
void write_file(const std::string& path, const std::string& content);

}  // namespace afem
