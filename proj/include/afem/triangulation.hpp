#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "afem/population.hpp"

namespace afem {

/// Conforming leaf front over the forest, paired with its node population.
struct Triangulation {
  std::vector<TriId> leaves;  // sorted handles
  Population population;

  std::size_t size() const { return leaves.size(); }
  bool has_leaf(TriId t) const;
};

/// One side of a triangulation.
struct Edge {
  VertexId a = kNone, b = kNone;     // endpoints, a < b
  TriId tri[2] = {kNone, kNone};     // adjacent leaves; tri[1] == kNone on the boundary
  VertexId mid = kNone;              // midpoint person, in P++ \ P
  std::int32_t mid_gen = 0;
  bool interior = false;
  double length = 0.0;
};

/// Complete edge inventory of a triangulation together with the candidate
/// genealogy: for every edge midpoint (a person of P++ \ P) the parents that
/// are themselves candidates are linked by edge index, so conforming-closure
/// sets are cheap graph walks.
class EdgeSet {
 public:
  std::vector<Edge> edges;                                 // sorted by (a, b)
  std::vector<std::array<std::int32_t, 2>> cand_parents;   // edge indices, -1 for member parents
  std::vector<std::int32_t> child_offsets, child_edges;    // candidate children (CSR)

  std::int32_t size() const { return static_cast<std::int32_t>(edges.size()); }
  std::int32_t find(VertexId a, VertexId b) const;
  std::int32_t find_by_mid(VertexId mid) const;            // -1 when not a midpoint person
  std::span<const std::int32_t> children_of(std::int32_t e) const;

  static std::uint64_t key(VertexId a, VertexId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }

  std::unordered_map<std::uint64_t, std::int32_t> by_key;
  std::unordered_map<VertexId, std::int32_t> by_mid;
};

class TriangulationOps {
 public:
  TriangulationOps(Forest& forest, Genealogy& gen)
      : forest_(&forest), gen_(&gen), pops_(forest, gen) {}

  Triangulation bottom() const;

  /// Leaf front whose node set equals the population; NotAPopulation when no
  /// such front exists.
  Triangulation to_triangulation(const Population& p) const;
  static const Population& from_triangulation(const Triangulation& t) { return t.population; }

  /// Edge inventory; registers all midpoint persons in the genealogy.
  EdgeSet edges(const Triangulation& t) const;

  /// Conforming-closure person set (P (+) mid(sel)) \ P, as sorted ids.
  std::vector<VertexId> closure_persons(const EdgeSet& es,
                                        std::span<const std::int32_t> sel) const;
  /// Same closure as edge indices (refd for a single edge).
  std::vector<std::int32_t> closure_edges(const EdgeSet& es, std::int32_t edge) const;

  /// Smallest refinement in which no edge of `marked` survives.
  Triangulation refine(const Triangulation& t, const EdgeSet& es,
                       std::span<const std::int32_t> marked) const;
  Triangulation refine_keys(const Triangulation& t,
                            std::span<const std::pair<VertexId, VertexId>> marked) const;

  /// Edges of t bisected when refining edge S (includes S).
  std::vector<std::pair<VertexId, VertexId>> refd(const Triangulation& t, const EdgeSet& es,
                                                  VertexId a, VertexId b) const;

  /// T++: every leaf replaced by its four grandchildren.
  Triangulation double_refine(const Triangulation& t) const;

  /// Bisects every leaf once. Valid on fronts whose leaves share one
  /// generation (uniform hierarchies); registers the new frontier.
  Triangulation uniform_refine_once(const Triangulation& t) const;

  Triangulation meet_tri(const Triangulation& a, const Triangulation& b) const;
  Triangulation join_tri(const Triangulation& a, const Triangulation& b) const;

  /// Leaves of t refined in t_star (t <= t_star required).
  std::vector<TriId> coarsening_area(const Triangulation& t, const Triangulation& t_star) const;

  /// Leaves of `t` that are not initial triangles (leaf-set difference count
  /// against the bottom triangulation).
  std::int64_t nonroot_leaf_count(const Triangulation& t) const;

  /// Full conformity check: the leaves form exact subtree fronts covering
  /// every root, every edge has at most two adjacent leaves and single-leaf
  /// edges lie on the domain boundary.
  void check_conforming(const Triangulation& t) const;

  /// The matching-condition propagation (shared refinement edges pair up by
  /// generation). Throws MatchingViolation on failure.
  void check_matching(const Triangulation& t, const EdgeSet& es) const;

  PopulationOps& pops() { return pops_; }
  Forest& forest() const { return *forest_; }
  Genealogy& genealogy() const { return *gen_; }

 private:
  Forest* forest_;
  Genealogy* gen_;
  mutable PopulationOps pops_;
};

}  // namespace afem
