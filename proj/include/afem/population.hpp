#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "afem/forest.hpp"

namespace afem {

/// Family-tree records for persons (vertices of forest triangles). A person
/// of generation g >= 1 is the midpoint of the refinement edge of one or two
/// generation-(g-1) triangles; its parents are the newest vertices of those
/// triangles. Records are registered lazily while edge sets are built, so
/// every person that appears in a population or candidate set is known here.
class Genealogy {
 public:
  explicit Genealogy(const Forest& forest);

  bool known(VertexId p) const {
    return p >= 0 && static_cast<std::size_t>(p) < recs_.size() && recs_[idx(p)].gen >= 0;
  }
  std::int32_t gen(VertexId p) const { return recs_[idx(p)].gen; }
  bool on_boundary(VertexId p) const { return recs_[idx(p)].boundary; }

  std::span<const VertexId> parents(VertexId p) const {
    const Rec& r = recs_[idx(p)];
    return {r.parents.data(), static_cast<std::size_t>(r.n_parents)};
  }
  std::span<const VertexId> children(VertexId p) const {
    const Rec& r = recs_[idx(p)];
    return {r.children.data(), static_cast<std::size_t>(r.n_children)};
  }

  /// Registers person `p`. Re-registration verifies consistency.
  void register_person(VertexId p, std::int32_t gen, std::span<const VertexId> parents,
                       bool boundary);

  /// All ancestors of the given persons (union of strict ancestor sets).
  std::vector<VertexId> anc(std::span<const VertexId> us) const;
  std::vector<VertexId> anc_one(VertexId p) const;

  /// free(U) = { P in U : desc(P) cap U = empty } = U \ anc(U).
  std::vector<VertexId> free_of(std::span<const VertexId> us) const;

  /// { q in within : anc(q) cap cs != empty }, i.e. desc(cs) restricted to
  /// `within`. Both inputs sorted.
  std::vector<VertexId> desc_within(std::span<const VertexId> cs,
                                    std::span<const VertexId> within) const;

  /// Ascending (gen, x, y) with exact coordinate comparison.
  bool canonical_less(VertexId a, VertexId b) const;

  const Forest& forest() const { return *forest_; }

 private:
  struct Rec {
    std::int32_t gen = -1;
    std::array<VertexId, 2> parents{kNone, kNone};
    std::array<VertexId, 4> children{kNone, kNone, kNone, kNone};
    std::uint8_t n_parents = 0;
    std::uint8_t n_children = 0;
    bool boundary = false;
  };
  static std::size_t idx(VertexId p) { return static_cast<std::size_t>(p); }
  std::vector<Rec> recs_;
  const Forest* forest_;
};

/// A parent-closed person set containing the bottom population; immutable
/// value, members stored as a sorted id vector.
class Population {
 public:
  Population() = default;
  static Population from_sorted(std::vector<VertexId> ids);
  static Population from_unsorted(std::vector<VertexId> ids);

  std::size_t size() const { return ids_.size(); }
  bool contains(VertexId p) const;
  std::span<const VertexId> ids() const { return ids_; }
  const std::vector<VertexId>& vec() const { return ids_; }

  bool operator==(const Population& o) const { return ids_ == o.ids_; }
  /// Partial order: coarsening (subset) test.
  bool subset_of(const Population& o) const;

  friend Population set_union(const Population& a, const Population& b);
  friend Population set_intersection(const Population& a, const Population& b);

 private:
  std::vector<VertexId> ids_;
};

struct Diamond {
  Population bottom;             // P^wedge
  Population top;                // P_vee
  std::vector<Population> flanks;
};

/// Lattice and family-tree operations. All populations passed in and out are
/// verified parent-closed.
class PopulationOps {
 public:
  PopulationOps(Forest& forest, Genealogy& gen) : forest_(&forest), gen_(&gen) {}

  Population bottom() const;

  /// Verifies the parent-closure characterization (bottom included, parents
  /// of every member present).
  bool is_population(const Population& p) const;
  void require_population(const Population& p, const char* what) const;

  /// P (+) C = P cup anc(C) cup C, the smallest refinement containing C.
  Population oplus(const Population& p, std::span<const VertexId> c) const;

  /// P (-) C: greatest coarsening of P disjoint from C, computed as
  /// P \ (C cup desc(C)).
  Population ominus(const Population& p, std::span<const VertexId> c) const;

  Population meet(const Population& a, const Population& b) const;
  Population join(const Population& a, const Population& b) const;

  /// Omega(P): generation-gen(P) triangles having P as a vertex.
  std::vector<TriId> patch(VertexId p) const;
  std::vector<TriId> patch_of_set(std::span<const VertexId> us) const;

  bool is_lower_diamond(const Diamond& d) const;

  /// max over persons of generation <= k_max of the per-generation ancestor
  /// counts; a lower estimate of the genetic diversity constant.
  std::int64_t genetic_diversity(std::int32_t k_max) const;

  /// Chain of same-generation partners linking a and b inside anc(p);
  /// consecutive members share a child in anc(p) cup {p}.
  std::optional<std::vector<VertexId>> partner_chain(VertexId p, VertexId a, VertexId b) const;

  Genealogy& genealogy() const { return *gen_; }
  Forest& forest() const { return *forest_; }

 private:
  Forest* forest_;
  Genealogy* gen_;
};

/// Snapshot text format: "np" then one line per person
/// "id x_num x_exp y_num y_exp gen", sorted by id.
std::string population_snapshot(const Forest& f, const Genealogy& g, const Population& p);
Population population_from_snapshot(const Forest& f, const Genealogy& g, const std::string& text);

}  // namespace afem
