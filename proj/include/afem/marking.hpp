#pragma once

#include <span>
#include <vector>

#include "afem/estimator.hpp"

namespace afem {

enum class Marker { reference, linear, min_single };
Marker marker_from_string(const std::string& s);
std::string to_string(Marker m);

/// One visit of the marking routine: the person looked at, the accumulated
/// indicator value it saw, and whether it marked.
struct MarkVisit {
  VertexId person = kNone;
  double value = 0.0;
  bool marked = false;
};

/// Result of one MARK call. `closure` is exactly (P (+) M) \ P, so
/// refinement may take P cup closure directly.
struct MarkOutcome {
  std::vector<std::int32_t> marked_edges;  // edge indices into the EdgeSet
  std::vector<VertexId> marked;            // M_k, sorted person ids
  std::vector<VertexId> closure;           // tildeM_k, sorted person ids
  double max_indicator = 0.0;              // reference max or its linear-pass surrogate
  bool converged = false;                  // all indicators were zero
  std::vector<MarkVisit> trace;
};

class Marking {
 public:
  Marking(Forest& forest, Genealogy& gen) : forest_(&forest), gen_(&gen), ops_(forest, gen) {}

  /// While-loop formulation. Candidates are visited in ascending
  /// (generation, x, y) order unless an explicit order is given; the
  /// candidate pool shrinks by the conforming closure of each visited person
  /// whether or not it marks.
  MarkOutcome mark_reference(const EdgeSet& es, const IndicatorField& ind, double mu,
                             const std::vector<std::int32_t>* order_override = nullptr,
                             bool collect_trace = false) const;

  /// Two depth-first passes over the candidate in-forest: max-ind computes
  /// the accumulated-maximum surrogate, accum-est marks with reset-on-mark
  /// and propagates markings to ancestors. Linear in the candidate count.
  MarkOutcome mark_linear(const EdgeSet& es, const IndicatorField& ind, double mu,
                          bool collect_trace = false) const;

  /// Negative control: marks only the candidate with the smallest positive
  /// accumulated indicator.
  MarkOutcome mark_min_single(const EdgeSet& es, const IndicatorField& ind) const;

  MarkOutcome mark(Marker m, const EdgeSet& es, const IndicatorField& ind, double mu,
                   bool collect_trace = false) const;

  /// Accumulated indicator over the conforming closure of each candidate;
  /// the maximum is the reference threshold base. Memoized along
  /// single-parent chains, exact de-duplication at two-parent joins.
  std::vector<double> closure_sums(const EdgeSet& es, const IndicatorField& ind) const;

  /// Asserts the marked-set lower bound: est^2((P (+) M) \ P) >= mu #M Emax
  /// for the reference strategy and >= mu #M Emax / 2 for the linear one.
  /// Throws GuaranteeViolated. Returns the achieved ratio.
  double guarantee_check(const EdgeSet& es, const IndicatorField& ind, const MarkOutcome& out,
                         double mu, Marker which) const;

  /// Candidate order ascending (gen, x, y), exact comparison.
  std::vector<std::int32_t> canonical_order(const EdgeSet& es) const;

 private:
  Forest* forest_;
  Genealogy* gen_;
  mutable TriangulationOps ops_;
};

/// Trace dump: one row per visit with the person's coordinates, the
/// accumulated squared indicator it saw, and the marking decision.
std::string mark_trace_to_csv(const Forest& forest, const MarkOutcome& out);

}  // namespace afem
