#include "afem/triangulation.hpp"

#include <algorithm>
#include <sstream>

namespace afem {

bool Triangulation::has_leaf(TriId t) const {
  return std::binary_search(leaves.begin(), leaves.end(), t);
}

std::int32_t EdgeSet::find(VertexId a, VertexId b) const {
  auto it = by_key.find(key(a, b));
  return it == by_key.end() ? -1 : it->second;
}

std::int32_t EdgeSet::find_by_mid(VertexId mid) const {
  auto it = by_mid.find(mid);
  return it == by_mid.end() ? -1 : it->second;
}

std::span<const std::int32_t> EdgeSet::children_of(std::int32_t e) const {
  const auto lo = static_cast<std::size_t>(child_offsets[static_cast<std::size_t>(e)]);
  const auto hi = static_cast<std::size_t>(child_offsets[static_cast<std::size_t>(e) + 1]);
  return {child_edges.data() + lo, hi - lo};
}

Triangulation TriangulationOps::bottom() const {
  Triangulation t;
  t.leaves.assign(forest_->roots().begin(), forest_->roots().end());
  std::sort(t.leaves.begin(), t.leaves.end());
  t.population = pops_.bottom();
  return t;
}

Triangulation TriangulationOps::to_triangulation(const Population& p) const {
  // A forest triangle is a leaf of T(P) iff its vertices are members and the
  // midpoint of its refinement edge is not.
  Triangulation out;
  std::vector<TriId> stack(forest_->roots().begin(), forest_->roots().end());
  while (!stack.empty()) {
    const TriId t = stack.back();
    stack.pop_back();
    const VertexId mid = forest_->find_refinement_midpoint(t);
    if (mid != kNone && p.contains(mid)) {
      auto [c0, c1] = forest_->children_of(t);
      stack.push_back(c0);
      stack.push_back(c1);
    } else {
      out.leaves.push_back(t);
    }
  }
  std::sort(out.leaves.begin(), out.leaves.end());
  std::vector<VertexId> nodes;
  nodes.reserve(out.leaves.size() * 3);
  for (TriId t : out.leaves)
    for (VertexId v : forest_->tri(t).v) nodes.push_back(v);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  if (nodes != p.vec())
    throw NotAPopulation("person set is not the node set of a conforming triangulation");
  out.population = p;
  return out;
}

EdgeSet TriangulationOps::edges(const Triangulation& t) const {
  EdgeSet es;
  es.by_key.reserve(t.leaves.size() * 2);
  for (TriId leaf : t.leaves) {
    const auto& n = forest_->tri(leaf);
    for (int e = 0; e < 3; ++e) {
      VertexId a = n.v[static_cast<std::size_t>(e)];
      VertexId b = n.v[static_cast<std::size_t>((e + 1) % 3)];
      if (a > b) std::swap(a, b);
      const std::uint64_t k = EdgeSet::key(a, b);
      auto [it, inserted] = es.by_key.try_emplace(k, es.size());
      if (inserted) {
        Edge ed;
        ed.a = a;
        ed.b = b;
        ed.tri[0] = leaf;
        es.edges.push_back(ed);
      } else {
        Edge& ed = es.edges[static_cast<std::size_t>(it->second)];
        if (ed.tri[1] != kNone)
          throw NonConforming("edge adjacent to more than two leaves");
        ed.tri[1] = leaf;
      }
    }
  }

  // Deterministic edge order: sort by endpoint ids and rebuild the lookup.
  std::sort(es.edges.begin(), es.edges.end(), [](const Edge& x, const Edge& y) {
    return std::pair(x.a, x.b) < std::pair(y.a, y.b);
  });
  es.by_key.clear();
  for (std::int32_t i = 0; i < es.size(); ++i)
    es.by_key.emplace(EdgeSet::key(es.edges[static_cast<std::size_t>(i)].a,
                                   es.edges[static_cast<std::size_t>(i)].b),
                      i);

  // Midpoint persons with the one-or-two-parent rule: per adjacent leaf, the
  // parent is the newest vertex when the edge is that leaf's refinement edge
  // and the midpoint of the leaf's refinement edge otherwise.
  es.cand_parents.assign(static_cast<std::size_t>(es.size()), {-1, -1});
  for (std::int32_t i = 0; i < es.size(); ++i) {
    Edge& ed = es.edges[static_cast<std::size_t>(i)];
    ed.interior = ed.tri[1] != kNone;
    ed.length = forest_->edge_length(ed.a, ed.b);
    ed.mid = forest_->vertex_of(midpoint(forest_->point(ed.a), forest_->point(ed.b)));
    if (t.population.contains(ed.mid))
      throw NonConforming("edge midpoint is already a node (hanging node)");

    VertexId parent_ids[2];
    std::int32_t gen_est = -1;
    int np = 0;
    for (int s = 0; s < 2; ++s) {
      const TriId leaf = ed.tri[s];
      if (leaf == kNone) continue;
      const auto ref = forest_->refinement_edge(leaf);
      const std::int32_t leaf_gen = forest_->tri(leaf).gen;
      VertexId par;
      std::int32_t g;
      if (ref == std::pair(ed.a, ed.b)) {
        par = forest_->tri(leaf).newest();
        g = leaf_gen + 1;
      } else {
        par = forest_->vertex_of(
            midpoint(forest_->point(ref.first), forest_->point(ref.second)));
        g = leaf_gen + 2;
      }
      if (gen_est >= 0 && gen_est != g)
        throw MatchingViolation("adjacent leaves disagree on a midpoint generation");
      gen_est = g;
      parent_ids[np++] = par;
    }
    ed.mid_gen = gen_est;
    if (np == 2 && parent_ids[0] > parent_ids[1]) std::swap(parent_ids[0], parent_ids[1]);
    es.by_mid.emplace(ed.mid, i);
  }

  // Register persons in ascending generation so parents are always known
  // first (a parent that is itself a candidate has a strictly smaller
  // generation).
  std::vector<std::int32_t> order(static_cast<std::size_t>(es.size()));
  for (std::int32_t i = 0; i < es.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::int32_t x, std::int32_t y) {
    return es.edges[static_cast<std::size_t>(x)].mid_gen <
           es.edges[static_cast<std::size_t>(y)].mid_gen;
  });
  for (std::int32_t i : order) {
    Edge& ed = es.edges[static_cast<std::size_t>(i)];
    VertexId parent_ids[2];
    int np = 0;
    for (int s = 0; s < 2; ++s) {
      const TriId leaf = ed.tri[s];
      if (leaf == kNone) continue;
      const auto ref = forest_->refinement_edge(leaf);
      if (ref == std::pair(ed.a, ed.b)) {
        parent_ids[np++] = forest_->tri(leaf).newest();
      } else {
        parent_ids[np++] = forest_->vertex_of(
            midpoint(forest_->point(ref.first), forest_->point(ref.second)));
      }
    }
    if (np == 2 && parent_ids[0] > parent_ids[1]) std::swap(parent_ids[0], parent_ids[1]);
    gen_->register_person(ed.mid, ed.mid_gen, {parent_ids, static_cast<std::size_t>(np)},
                          !ed.interior);
    // candidate-to-candidate parent links
    for (int s = 0; s < np; ++s) {
      const std::int32_t pe = es.find_by_mid(parent_ids[s]);
      es.cand_parents[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] = pe;
    }
  }

  // invert to candidate children lists (CSR)
  std::vector<std::int32_t> counts(static_cast<std::size_t>(es.size()) + 1, 0);
  for (std::int32_t i = 0; i < es.size(); ++i)
    for (std::int32_t pe : es.cand_parents[static_cast<std::size_t>(i)])
      if (pe >= 0) ++counts[static_cast<std::size_t>(pe) + 1];
  for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
  es.child_offsets = counts;
  es.child_edges.resize(static_cast<std::size_t>(es.child_offsets.back()));
  std::vector<std::int32_t> cursor = es.child_offsets;
  for (std::int32_t i = 0; i < es.size(); ++i)
    for (std::int32_t pe : es.cand_parents[static_cast<std::size_t>(i)])
      if (pe >= 0) es.child_edges[static_cast<std::size_t>(cursor[static_cast<std::size_t>(pe)]++)] = i;
  return es;
}

std::vector<VertexId> TriangulationOps::closure_persons(const EdgeSet& es,
                                                        std::span<const std::int32_t> sel) const {
  std::vector<char> visited(static_cast<std::size_t>(es.size()), 0);
  std::vector<VertexId> out;
  std::vector<std::int32_t> stack(sel.begin(), sel.end());
  while (!stack.empty()) {
    const std::int32_t e = stack.back();
    stack.pop_back();
    if (visited[static_cast<std::size_t>(e)]) continue;
    visited[static_cast<std::size_t>(e)] = 1;
    out.push_back(es.edges[static_cast<std::size_t>(e)].mid);
    for (std::int32_t pe : es.cand_parents[static_cast<std::size_t>(e)])
      if (pe >= 0 && !visited[static_cast<std::size_t>(pe)]) stack.push_back(pe);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::int32_t> TriangulationOps::closure_edges(const EdgeSet& es,
                                                          std::int32_t edge) const {
  std::vector<char> visited(static_cast<std::size_t>(es.size()), 0);
  std::vector<std::int32_t> out, stack{edge};
  while (!stack.empty()) {
    const std::int32_t e = stack.back();
    stack.pop_back();
    if (visited[static_cast<std::size_t>(e)]) continue;
    visited[static_cast<std::size_t>(e)] = 1;
    out.push_back(e);
    for (std::int32_t pe : es.cand_parents[static_cast<std::size_t>(e)])
      if (pe >= 0 && !visited[static_cast<std::size_t>(pe)]) stack.push_back(pe);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Triangulation TriangulationOps::refine(const Triangulation& t, const EdgeSet& es,
                                       std::span<const std::int32_t> marked) const {
  if (marked.empty()) return t;
  const std::vector<VertexId> add = closure_persons(es, marked);
  Population p = set_union(t.population, Population::from_sorted(add));
  return to_triangulation(p);
}

Triangulation TriangulationOps::refine_keys(
    const Triangulation& t, std::span<const std::pair<VertexId, VertexId>> marked) const {
  const EdgeSet es = edges(t);
  std::vector<std::int32_t> sel;
  for (const auto& [a, b] : marked) {
    const std::int32_t e = es.find(a, b);
    if (e < 0) throw Error(Error::Kind::usage, "refine: marked edge not in triangulation");
    sel.push_back(e);
  }
  return refine(t, es, sel);
}

std::vector<std::pair<VertexId, VertexId>> TriangulationOps::refd(const Triangulation&,
                                                                  const EdgeSet& es, VertexId a,
                                                                  VertexId b) const {
  const std::int32_t e = es.find(a, b);
  if (e < 0) throw Error(Error::Kind::usage, "refd: edge not in triangulation");
  std::vector<std::pair<VertexId, VertexId>> out;
  for (std::int32_t i : closure_edges(es, e))
    out.emplace_back(es.edges[static_cast<std::size_t>(i)].a,
                     es.edges[static_cast<std::size_t>(i)].b);
  std::sort(out.begin(), out.end());
  return out;
}

Triangulation TriangulationOps::double_refine(const Triangulation& t) const {
  const EdgeSet es = edges(t);
  std::vector<VertexId> mids;
  mids.reserve(static_cast<std::size_t>(es.size()));
  for (const Edge& e : es.edges) mids.push_back(e.mid);
  std::sort(mids.begin(), mids.end());
  Population p = set_union(t.population, Population::from_sorted(std::move(mids)));
  Triangulation out = to_triangulation(p);
  if (out.size() != 4 * t.size())
    throw Error(Error::Kind::verification, "double_refine: leaf count is not 4x");
  return out;
}

Triangulation TriangulationOps::uniform_refine_once(const Triangulation& t) const {
  const std::int32_t gen0 = forest_->tri(t.leaves.front()).gen;
  for (TriId leaf : t.leaves)
    if (forest_->tri(leaf).gen != gen0)
      throw Error(Error::Kind::usage, "uniform_refine_once needs a single-generation front");
  std::vector<VertexId> mids;
  mids.reserve(t.leaves.size());
  for (TriId leaf : t.leaves) mids.push_back(forest_->refinement_midpoint(leaf));
  std::sort(mids.begin(), mids.end());
  mids.erase(std::unique(mids.begin(), mids.end()), mids.end());
  Triangulation out =
      to_triangulation(set_union(t.population, Population::from_sorted(std::move(mids))));
  edges(out);  // register the new persons
  return out;
}

Triangulation TriangulationOps::meet_tri(const Triangulation& a, const Triangulation& b) const {
  return to_triangulation(pops_.meet(a.population, b.population));
}

Triangulation TriangulationOps::join_tri(const Triangulation& a, const Triangulation& b) const {
  return to_triangulation(pops_.join(a.population, b.population));
}

std::vector<TriId> TriangulationOps::coarsening_area(const Triangulation& t,
                                                     const Triangulation& t_star) const {
  if (!t.population.subset_of(t_star.population))
    throw NotNested("coarsening_area: triangulations are not nested");
  std::vector<TriId> out;
  std::set_difference(t.leaves.begin(), t.leaves.end(), t_star.leaves.begin(),
                      t_star.leaves.end(), std::back_inserter(out));
  return out;
}

std::int64_t TriangulationOps::nonroot_leaf_count(const Triangulation& t) const {
  std::int64_t n = 0;
  for (TriId leaf : t.leaves)
    if (forest_->tri(leaf).gen > 0) ++n;
  return n;
}

void TriangulationOps::check_conforming(const Triangulation& t) const {
  // exact front per root: along every root-to-front path exactly one leaf
  for (TriId r : forest_->roots()) {
    std::vector<std::pair<TriId, int>> stack{{r, 0}};
    while (!stack.empty()) {
      auto [cur, depth_hits] = stack.back();
      stack.pop_back();
      const bool is_leaf = t.has_leaf(cur);
      if (is_leaf && depth_hits > 0)
        throw NonConforming("leaf below another leaf (overlap)");
      const auto& n = forest_->tri(cur);
      if (n.child[0] == kNone) {
        if (!is_leaf && depth_hits == 0)
          throw NonConforming("forest path ends without reaching a leaf (gap)");
        continue;
      }
      const int hits = depth_hits + (is_leaf ? 1 : 0);
      if (hits > 1) throw NonConforming("nested leaves");
      stack.push_back({n.child[0], hits});
      stack.push_back({n.child[1], hits});
    }
  }
  // edge counts + boundary classification
  std::unordered_map<std::uint64_t, int> count;
  count.reserve(t.leaves.size() * 2);
  for (TriId leaf : t.leaves) {
    const auto& n = forest_->tri(leaf);
    for (int e = 0; e < 3; ++e) {
      const VertexId a = n.v[static_cast<std::size_t>(e)];
      const VertexId b = n.v[static_cast<std::size_t>((e + 1) % 3)];
      if (++count[EdgeSet::key(a, b)] > 2)
        throw NonConforming("edge shared by more than two leaves");
    }
  }
  for (TriId leaf : t.leaves) {
    const auto& n = forest_->tri(leaf);
    for (int e = 0; e < 3; ++e) {
      const VertexId a = n.v[static_cast<std::size_t>(e)];
      const VertexId b = n.v[static_cast<std::size_t>((e + 1) % 3)];
      if (count[EdgeSet::key(a, b)] == 1 && !forest_->edge_on_boundary(a, b)) {
        std::ostringstream os;
        os << "interior edge with a single adjacent leaf (hanging node) at ("
           << forest_->point(a).x.str() << "," << forest_->point(a).y.str() << ")-("
           << forest_->point(b).x.str() << "," << forest_->point(b).y.str() << ")";
        throw NonConforming(os.str());
      }
    }
  }
}

void TriangulationOps::check_matching(const Triangulation&, const EdgeSet& es) const {
  for (const Edge& ed : es.edges) {
    if (!ed.interior) continue;
    for (int s = 0; s < 2; ++s) {
      const TriId self = ed.tri[s];
      const TriId other = ed.tri[1 - s];
      if (forest_->refinement_edge(self) != std::pair(ed.a, ed.b)) continue;
      const std::int32_t gs = forest_->tri(self).gen;
      const std::int32_t go = forest_->tri(other).gen;
      if (go == gs) {
        if (forest_->refinement_edge(other) != std::pair(ed.a, ed.b))
          throw MatchingViolation("equal-generation neighbour does not share the refinement edge");
      } else if (go == gs - 1) {
        // the edge must be the refinement edge of one of the neighbour's
        // children: those are the two non-refinement edges of the neighbour
        const auto& n = forest_->tri(other);
        const auto child_ref0 = std::minmax(n.v[0], n.v[2]);
        const auto child_ref1 = std::minmax(n.v[1], n.v[2]);
        const auto mine = std::pair(ed.a, ed.b);
        if (mine != std::pair(child_ref0.first, child_ref0.second) &&
            mine != std::pair(child_ref1.first, child_ref1.second))
          throw MatchingViolation("shared edge is not a child refinement edge of the neighbour");
      } else {
        throw MatchingViolation("neighbour generation differs by more than one");
      }
    }
  }
}

}  // namespace afem
