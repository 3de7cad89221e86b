#pragma once

#include <span>
#include <vector>

#include "afem/fem.hpp"

namespace afem {

/// Squared edge indicators: element terms over the one or two triangles of
/// the edge patch plus, on interior edges, the squared normal jump of the
/// piecewise-constant gradient (exact, no quadrature).
struct IndicatorField {
  std::vector<double> e2;     // per edge index
  std::vector<double> jump2;  // h_S * || [grad u] ||^2_{L2(S)} = h_S^2 * jump^2
  std::vector<double> elem2;  // sum of h_T^2 ||f||^2 over the patch
  double total = 0.0;         // fixed-order sum of e2
};

struct EnergyGainResult {
  double gain = 0.0;          // G(T) - G(T_*)
  double est_refined = 0.0;   // est^2 over edges of T refined in T_*
  double ratio = 0.0;         // gain / est_refined, 0 in the exact-zero case
  bool exact_zero = false;    // T == T_* style degenerate pair
};

class Estimator {
 public:
  Estimator(Forest& forest, Genealogy& gen) : forest_(&forest), gen_(&gen), fem_(forest, gen) {}

  IndicatorField indicators(const Triangulation& t, const EdgeSet& es, const FemState& state,
                            const SourceField& f, int threads = 1) const;

  double edge_indicator(const Triangulation& t, const EdgeSet& es, const FemState& state,
                        const SourceField& f, VertexId a, VertexId b) const;

  static double accumulate(const IndicatorField& ind, std::span<const std::int32_t> sel);

  /// Indicator sum over midpoint persons (routes through the edge bijection;
  /// NotAMidpoint for persons outside P++ \ P).
  static double person_indicator(const EdgeSet& es, const IndicatorField& ind,
                                 std::span<const VertexId> persons);

  /// est^2 over the edges of t refined in t_star against the total-energy
  /// drop.
  EnergyGainResult energy_gain_check(const Triangulation& t, const Triangulation& t_star,
                                     const SourceField& f, double cg_tol) const;

  /// (|u - u_T|^2 / est^2, (|u - u_T|^2 + osc^2) / est^2) with the exact
  /// solution as reference; (0, 0) when everything vanishes.
  std::pair<double, double> reliability_efficiency(const Triangulation& t, const EdgeSet& es,
                                                   const FemState& state, const SourceField& f,
                                                   int threads = 1) const;

  Fem& fem() { return fem_; }

 private:
  Forest* forest_;
  Genealogy* gen_;
  mutable Fem fem_;
};

/// Indicator dump: one row per edge with endpoints, interior flag, squared
/// indicator and its jump/element split.
std::string indicators_to_csv(const Forest& forest, const EdgeSet& es,
                              const IndicatorField& ind);

}  // namespace afem
