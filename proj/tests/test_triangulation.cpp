#include <random>
#include <set>

#include "doctest.h"
#include "test_helpers.hpp"

using namespace afem;
using helpers::Session;

TEST_CASE("edge inventory of the bottom square") {
  Session s = Session::unit2();
  const Triangulation t = s.ops.bottom();
  const EdgeSet es = s.ops.edges(t);
  CHECK(es.size() == 5);
  int interior = 0;
  for (const Edge& e : es.edges) interior += e.interior;
  CHECK(interior == 1);
  CHECK(t.population.size() == 4);

  // the interior one is the diagonal, midpoint person (0.5, 0.5) of gen 1
  for (const Edge& e : es.edges) {
    if (!e.interior) continue;
    CHECK(s.forest.point(e.mid) == helpers::pt(0.5, 0.5));
    CHECK(e.mid_gen == 1);
    CHECK(s.gen.parents(e.mid).size() == 2);
  }
}

TEST_CASE("level-1 square has eight edges, five nodes, one interior node") {
  Session s = Session::unit2();
  const Triangulation t = s.uniform(1);
  const EdgeSet es = s.ops.edges(t);
  CHECK(t.size() == 4);
  CHECK(es.size() == 8);
  CHECK(t.population.size() == 5);
  int interior_nodes = 0;
  for (VertexId v : t.population.ids()) interior_nodes += !s.gen.on_boundary(v);
  CHECK(interior_nodes == 1);
}

TEST_CASE("midpoint persons are in bijection with edges") {
  Session s = Session::lshape();
  std::mt19937_64 rng(77);
  Triangulation t = s.ops.bottom();
  for (int step = 0; step < 12; ++step) {
    const EdgeSet es = s.ops.edges(t);
    // #(P++ \ P) = #edges
    const Triangulation tpp = s.ops.double_refine(t);
    CHECK(tpp.population.size() - t.population.size() ==
          static_cast<std::size_t>(es.size()));
    std::vector<std::int32_t> sel{static_cast<std::int32_t>(rng() % es.size())};
    t = s.ops.refine(t, es, sel);
  }
}

TEST_CASE("nested pairs: new members are exactly the midpoints of refined edges") {
  Session s = Session::lshape();
  std::mt19937_64 rng(909);
  for (int trial = 0; trial < 15; ++trial) {
    Triangulation t = s.ops.bottom();
    for (int r = 0; r < 3 && t.size() < 300; ++r) {
      const EdgeSet es = s.ops.edges(t);
      std::vector<std::int32_t> sel{static_cast<std::int32_t>(rng() % es.size())};
      t = s.ops.refine(t, es, sel);
    }
    Triangulation ts = t;
    for (int r = 0; r < 3 && ts.size() < 1200; ++r) {
      const EdgeSet es = s.ops.edges(ts);
      std::vector<std::int32_t> sel{static_cast<std::int32_t>(rng() % es.size())};
      ts = s.ops.refine(ts, es, sel);
    }
    // P_* cap (P++ \ P) = midpoints of S(T) \ S(T_*)
    const EdgeSet es = s.ops.edges(t);
    const EdgeSet es_star = s.ops.edges(ts);
    std::vector<VertexId> lhs;
    for (const Edge& e : es.edges)
      if (ts.population.contains(e.mid)) lhs.push_back(e.mid);
    std::sort(lhs.begin(), lhs.end());
    std::vector<VertexId> rhs;
    for (const Edge& e : es.edges)
      if (es_star.find(e.a, e.b) < 0) rhs.push_back(e.mid);
    std::sort(rhs.begin(), rhs.end());
    CHECK(lhs == rhs);
  }
}

TEST_CASE("refine bisects the requested edges and the conformity closure") {
  Session s = Session::unit2();
  const Triangulation tb = s.ops.bottom();

  SUBCASE("diagonal only") {
    const EdgeSet es = s.ops.edges(tb);
    const std::int32_t diag = es.find(s.v(0, 0), s.v(1, 1));
    REQUIRE(diag >= 0);
    const Triangulation t = s.ops.refine(tb, es, std::vector<std::int32_t>{diag});
    CHECK(t.size() == 4);
    CHECK(t.population.size() == 5);
  }

  SUBCASE("bottom edge forces the diagonal first") {
    const EdgeSet es = s.ops.edges(tb);
    const std::int32_t bottom = es.find(s.v(0, 0), s.v(1, 0));
    REQUIRE(bottom >= 0);
    const Triangulation t = s.ops.refine(tb, es, std::vector<std::int32_t>{bottom});
    // closure: both roots split at the diagonal, then the bottom child is
    // bisected; front = two grandchildren + one sibling + two children
    CHECK(t.size() == 5);
    // persons added: the diagonal midpoint and the bottom midpoint
    CHECK(t.population == s.pop({{0.5, 0.5}, {0.5, 0.0}}));
  }

  SUBCASE("empty marks are the identity") {
    const EdgeSet es = s.ops.edges(tb);
    const Triangulation t = s.ops.refine(tb, es, {});
    CHECK(t.population == tb.population);
  }
}

TEST_CASE("refd lists the edges bisected alongside a marked edge") {
  Session s = Session::unit2();
  const Triangulation tb = s.ops.bottom();
  const EdgeSet es = s.ops.edges(tb);

  const auto refd_diag = s.ops.refd(tb, es, s.v(0, 0), s.v(1, 1));
  CHECK(refd_diag.size() == 1);

  const auto refd_bottom = s.ops.refd(tb, es, s.v(0, 0), s.v(1, 0));
  CHECK(refd_bottom.size() == 2);  // closure forces the diagonal

  SUBCASE("refining the closure set equals refining the single edge") {
    std::mt19937_64 rng(10101);
    Session s2 = Session::lshape();
    Triangulation t = s2.ops.bottom();
    for (int i = 0; i < 6; ++i) {
      const EdgeSet e2 = s2.ops.edges(t);
      std::vector<std::int32_t> sel{static_cast<std::int32_t>(rng() % e2.size())};
      t = s2.ops.refine(t, e2, sel);
    }
    const EdgeSet e2 = s2.ops.edges(t);
    for (int trial = 0; trial < 10; ++trial) {
      const std::int32_t pick = static_cast<std::int32_t>(rng() % e2.size());
      const Edge& ed = e2.edges[static_cast<std::size_t>(pick)];
      const auto closure = s2.ops.refd(t, e2, ed.a, ed.b);
      CHECK(closure.size() >= 1);
      // closure contains the edge itself
      bool has_self = false;
      for (const auto& [a, b] : closure)
        if (a == std::min(ed.a, ed.b) && b == std::max(ed.a, ed.b)) has_self = true;
      CHECK(has_self);
      const Triangulation direct = s2.ops.refine(t, e2, std::vector<std::int32_t>{pick});
      const Triangulation via_set = s2.ops.refine_keys(t, closure);
      CHECK(direct.population == via_set.population);
    }
  }
}

TEST_CASE("double refinement replaces every leaf by four grandchildren") {
  Session s = Session::unit2();
  const Triangulation tb = s.ops.bottom();
  const Triangulation tpp = s.ops.double_refine(tb);
  CHECK(tpp.size() == 8);
  CHECK(tpp.population.size() == 9);
  // P++ \ P_bot: the five edge midpoints
  std::vector<VertexId> added;
  std::set_difference(tpp.population.ids().begin(), tpp.population.ids().end(),
                      tb.population.ids().begin(), tb.population.ids().end(),
                      std::back_inserter(added));
  CHECK(added == helpers::ids_of(s, {{0.5, 0.5}, {0.5, 0.0}, {1.0, 0.5}, {0.5, 1.0}, {0.0, 0.5}}));
  CHECK_NOTHROW(s.ops.check_conforming(tpp));
}

TEST_CASE("mixed generations drop some grandchildren from the doubled population") {
  Session s = Session::lshape();
  const Triangulation tb = s.ops.bottom();
  const EdgeSet es = s.ops.edges(tb);
  const std::int32_t hyp = es.find(s.v(0, 0), s.v(1, 1));
  REQUIRE(hyp >= 0);
  const Triangulation t = s.ops.refine(tb, es, std::vector<std::int32_t>{hyp});
  REQUIRE(t.size() == 8);  // two bisected roots, four untouched

  const Triangulation tpp = s.ops.double_refine(t);
  CHECK(tpp.size() == 4 * t.size());
  CHECK_NOTHROW(s.ops.check_conforming(tpp));

  // grandchildren of members live at the refinement-edge midpoints of the
  // patch triangles of the members' children; with mixed generations some of
  // them fall inside coarser leaves and are absent from P++
  std::vector<VertexId> added;
  std::set_difference(tpp.population.ids().begin(), tpp.population.ids().end(),
                      t.population.ids().begin(), t.population.ids().end(),
                      std::back_inserter(added));
  std::size_t missing = 0;
  for (VertexId q : added) {
    for (TriId patch_tri : s.pops.patch(q)) {
      const VertexId grandchild = s.forest.refinement_midpoint(patch_tri);
      if (!tpp.population.contains(grandchild)) ++missing;
    }
  }
  CHECK(missing > 0);
}

TEST_CASE("double refinement stays conforming on random triangulations") {
  Session s = Session::lshape();
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    Triangulation t = s.ops.bottom();
    const int rounds = 1 + static_cast<int>(rng() % 4);
    for (int r = 0; r < rounds && t.size() < 300; ++r) {
      const EdgeSet es = s.ops.edges(t);
      std::vector<std::int32_t> sel{static_cast<std::int32_t>(rng() % es.size())};
      t = s.ops.refine(t, es, sel);
    }
    const Triangulation tpp = s.ops.double_refine(t);
    CHECK(tpp.size() == 4 * t.size());
    CHECK_NOTHROW(s.ops.check_conforming(tpp));
  }
}

TEST_CASE("meet and join of triangulations mirror the population lattice") {
  Session s = Session::unit2();
  s.uniform(2);
  const Triangulation tb = s.ops.bottom();
  const Population p1 = s.pops.oplus(s.pops.bottom(), std::vector<VertexId>{s.v(0.5, 0.0)});
  const Population p2 = s.pops.oplus(s.pops.bottom(), std::vector<VertexId>{s.v(0.5, 1.0)});
  const Triangulation t1 = s.ops.to_triangulation(p1);
  const Triangulation t2 = s.ops.to_triangulation(p2);

  const Triangulation tm = s.ops.meet_tri(t1, t2);
  const Triangulation tj = s.ops.join_tri(t1, t2);
  CHECK(tm.population == s.pop({{0.5, 0.5}}));
  CHECK(tj.population == s.pop({{0.5, 0.5}, {0.5, 0.0}, {0.5, 1.0}}));

  SUBCASE("overlapping leaves: the smaller lives in the join, the larger in the meet") {
    for (TriId leaf1 : t1.leaves) {
      for (TriId leaf2 : t2.leaves) {
        // nested iff one contains the other's vertices; overlap of leaves
        // from comparable triangulations means containment
        const bool l1_in_l2 = s.forest.contains_point(leaf2, s.forest.point(s.forest.tri(leaf1).v[0])) &&
                              s.forest.contains_point(leaf2, s.forest.point(s.forest.tri(leaf1).v[1])) &&
                              s.forest.contains_point(leaf2, s.forest.point(s.forest.tri(leaf1).v[2]));
        if (!l1_in_l2 || leaf1 == leaf2) continue;
        CHECK(tj.has_leaf(leaf1));
        CHECK(tm.has_leaf(leaf2));
      }
    }
  }
  CHECK(tb.population.subset_of(tm.population));
}

TEST_CASE("coarsening area") {
  Session s = Session::unit2();
  const Triangulation tb = s.ops.bottom();

  SUBCASE("refining the diagonal coarsens the whole square") {
    const EdgeSet es = s.ops.edges(tb);
    const Triangulation t =
        s.ops.refine(tb, es, std::vector<std::int32_t>{es.find(s.v(0, 0), s.v(1, 1))});
    const auto area = s.ops.coarsening_area(tb, t);
    CHECK(area.size() == 2);  // both roots
    double total = 0.0;
    for (TriId leaf : area) total += s.forest.area(leaf);
    CHECK(total == 1.0);
  }

  SUBCASE("identical triangulations have empty coarsening area") {
    CHECK(s.ops.coarsening_area(tb, tb).empty());
  }

  SUBCASE("non-nested inputs are rejected") {
    const EdgeSet es = s.ops.edges(tb);
    const Triangulation t =
        s.ops.refine(tb, es, std::vector<std::int32_t>{es.find(s.v(0, 0), s.v(1, 0))});
    CHECK_THROWS_AS(s.ops.coarsening_area(t, tb), NotNested);
  }
}

TEST_CASE("lshape corner refinement coarsens exactly the two hypotenuse triangles") {
  Session s = Session::lshape();
  const Triangulation tb = s.ops.bottom();
  const EdgeSet es = s.ops.edges(tb);
  const std::int32_t hyp = es.find(s.v(0, 0), s.v(-1, 1));
  REQUIRE(hyp >= 0);
  const Triangulation t = s.ops.refine(tb, es, std::vector<std::int32_t>{hyp});
  const auto area = s.ops.coarsening_area(tb, t);
  CHECK(area.size() == 2);
  for (TriId leaf : area) {
    const auto& n = s.forest.tri(leaf);
    bool touches = false;
    for (VertexId v : n.v)
      if (v == s.v(0, 0) || v == s.v(-1, 1)) touches = true;
    CHECK(touches);
  }
}

TEST_CASE("refine is minimal among refinements killing the marked edges") {
  // brute force over all populations with up to six added persons
  Session s = Session::unit2();
  std::mt19937_64 rng(512);

  // enumerate populations by breadth-first extension
  std::vector<Population> all{s.pops.bottom()};
  std::set<std::vector<VertexId>> seen{all[0].vec()};
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].size() - 4 >= 6) continue;
    const Triangulation t = s.ops.to_triangulation(all[i]);
    const EdgeSet es = s.ops.edges(t);
    for (const Edge& e : es.edges) {
      bool ok = true;
      for (VertexId par : s.gen.parents(e.mid))
        if (!all[i].contains(par)) ok = false;
      if (!ok) continue;
      std::vector<VertexId> ids = all[i].vec();
      ids.insert(std::lower_bound(ids.begin(), ids.end(), e.mid), e.mid);
      if (seen.insert(ids).second) all.push_back(Population::from_sorted(std::move(ids)));
    }
  }

  const Triangulation tb = s.ops.bottom();
  const EdgeSet esb = s.ops.edges(tb);
  for (std::int32_t mark = 0; mark < esb.size(); ++mark) {
    const Triangulation refined = s.ops.refine(tb, esb, std::vector<std::int32_t>{mark});
    const Edge& med = esb.edges[static_cast<std::size_t>(mark)];
    // the result contains the marked midpoint and is below every admissible
    // refinement
    CHECK(refined.population.contains(med.mid));
    for (const Population& p : all) {
      if (!tb.population.subset_of(p)) continue;
      if (!p.contains(med.mid)) continue;  // edge survives there
      CHECK(refined.population.subset_of(p));
    }
  }
}

TEST_CASE("nonroot leaf counts track the leaf-set difference against the bottom") {
  Session s = Session::unit2();
  const Triangulation tb = s.ops.bottom();
  CHECK(s.ops.nonroot_leaf_count(tb) == 0);
  const EdgeSet es = s.ops.edges(tb);
  const Triangulation t =
      s.ops.refine(tb, es, std::vector<std::int32_t>{es.find(s.v(0, 0), s.v(1, 0))});
  CHECK(s.ops.nonroot_leaf_count(t) == 5);  // every leaf sits below a root now
}
