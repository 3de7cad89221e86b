#include <random>
#include <sstream>

#include "afem/forest.hpp"
#include "afem/triangulation.hpp"
#include "doctest.h"

using namespace afem;

TEST_CASE("dyadic arithmetic is exact") {
  const Dyadic half(1, 1);
  const Dyadic one(1);
  CHECK(midpoint(Dyadic(0), one) == half);
  CHECK(midpoint(half, half) == half);
  CHECK(Dyadic(2, 1) == one);  // normalization
  CHECK(Dyadic(4, 2) == one);
  CHECK(Dyadic(-1, 2) < Dyadic(0));
  CHECK(Dyadic(3, 2) < one);
  CHECK(half.to_double() == 0.5);
  const Dyadic q = midpoint(Dyadic(3, 2), Dyadic(1, 3));  // (3/4 + 1/8)/2 = 7/16
  CHECK(q == Dyadic(7, 4));
}

TEST_CASE("orientation and segment predicates") {
  const Point a{Dyadic(0), Dyadic(0)};
  const Point b{Dyadic(1), Dyadic(0)};
  const Point c{Dyadic(0), Dyadic(1)};
  CHECK(orient2d(a, b, c) == 1);
  CHECK(orient2d(a, c, b) == -1);
  CHECK(orient2d(a, b, Point{Dyadic(1, 1), Dyadic(0)}) == 0);
  CHECK(on_segment(Point{Dyadic(1, 1), Dyadic(0)}, a, b));
  CHECK(!on_segment(Point{Dyadic(3, 1), Dyadic(0)}, a, b));
  CHECK(in_triangle(Point{Dyadic(1, 2), Dyadic(1, 2)}, a, b, c));
  CHECK(in_triangle(a, a, b, c));
  CHECK(!in_triangle(Point{Dyadic(1), Dyadic(1)}, a, b, c));
}

TEST_CASE("unit square fixture loads with two roots and the matching condition") {
  Forest f = Forest::from_text(unit2_mesh_text());
  CHECK(f.num_roots() == 2);
  CHECK(f.num_vertices() == 4);
  // the shared diagonal is the refinement edge of both roots
  const auto r0 = f.refinement_edge(f.roots()[0]);
  const auto r1 = f.refinement_edge(f.roots()[1]);
  CHECK(r0 == r1);
  CHECK(f.point(r0.first) == Point{Dyadic(0), Dyadic(0)});
  CHECK(f.point(r0.second) == Point{Dyadic(1), Dyadic(1)});
}

TEST_CASE("relabelled newest vertex violates the matching condition") {
  // same square, but the second triangle designates (0,0) as newest: the
  // diagonal then is the refinement edge of only one triangle
  const std::string text =
      "4\n0 0 0 0\n1 0 0 0\n1 0 1 0\n0 0 1 0\n2\n0 2 1\n2 3 0\n";
  CHECK_THROWS_AS(Forest::from_text(text), MatchingViolation);
}

TEST_CASE("hanging node in the initial mesh is rejected") {
  // vertex 4 sits on the diagonal; the left triangle is split, the right not
  const std::string text =
      "5\n0 0 0 0\n1 0 0 0\n1 0 1 0\n0 0 1 0\n1 1 1 1\n"
      "3\n0 2 1\n0 4 3\n4 2 3\n";
  CHECK_THROWS_AS(Forest::from_text(text), NonConforming);
}

TEST_CASE("parse errors carry usable messages") {
  CHECK_THROWS_AS(Forest::from_text("junk"), ParseError);
  CHECK_THROWS_AS(Forest::from_text("3\n0 0 0 0\n"), ParseError);
  // duplicate vertex
  CHECK_THROWS_AS(Forest::from_text("4\n0 0 0 0\n0 0 0 0\n1 0 0 0\n0 0 1 0\n1\n0 2 3\n"),
                  ParseError);
  // degenerate (collinear) triangle
  CHECK_THROWS_AS(Forest::from_text("3\n0 0 0 0\n1 0 0 0\n2 0 0 0\n1\n0 1 2\n"), ParseError);
}

TEST_CASE("lshape fixture loads with six roots") {
  Forest f = Forest::from_text(lshape_mesh_text());
  CHECK(f.num_roots() == 6);
  CHECK(f.num_vertices() == 8);
  // reentrant corner is a boundary vertex
  CHECK(f.on_boundary(f.find_vertex(Point{Dyadic(0), Dyadic(0)})));
  CHECK(!f.edge_on_boundary(f.find_vertex(Point{Dyadic(0), Dyadic(0)}),
                            f.find_vertex(Point{Dyadic(1), Dyadic(1)})));
}

TEST_CASE("bisection creates the two NVB children") {
  Forest f = Forest::from_text(unit2_mesh_text());
  const TriId ta = f.roots()[0];
  auto [c0, c1] = f.bisect(ta);
  const VertexId mid = f.find_vertex(Point{Dyadic(1, 1), Dyadic(1, 1)});
  REQUIRE(mid != kNone);
  CHECK(f.tri(c0).newest() == mid);
  CHECK(f.tri(c1).newest() == mid);
  CHECK(f.tri(c0).gen == 1);
  CHECK(f.tri(c1).gen == 1);
  CHECK(f.area(c0) == 0.25);
  CHECK(f.area(c1) == 0.25);
  // children cover {(0,0),(1,0),m} and {(1,0),(1,1),m}
  auto has_vertex = [&](TriId t, double x, double y) {
    const VertexId v = f.find_vertex(Point{Dyadic(static_cast<std::int64_t>(x * 2), 1),
                                           Dyadic(static_cast<std::int64_t>(y * 2), 1)});
    const auto& n = f.tri(t);
    return n.v[0] == v || n.v[1] == v || n.v[2] == v;
  };
  CHECK(has_vertex(c0, 0.0, 0.0));
  CHECK(has_vertex(c0, 1.0, 0.0));
  CHECK(has_vertex(c1, 1.0, 0.0));
  CHECK(has_vertex(c1, 1.0, 1.0));

  CHECK_THROWS_AS(f.bisect(ta), AlreadyBisected);

  SUBCASE("grandchildren newest vertices are the leg midpoints") {
    auto [g0, g1] = f.bisect(c0);
    auto [g2, g3] = f.bisect(c1);
    CHECK(f.point(f.tri(g0).newest()) == Point{Dyadic(1, 1), Dyadic(0)});
    CHECK(f.point(f.tri(g2).newest()) == Point{Dyadic(1), Dyadic(1, 1)});
    for (TriId t : {g0, g1, g2, g3}) {
      CHECK(f.tri(t).gen == 2);
      CHECK(f.area(t) == 0.125);
    }
  }
}

TEST_CASE("refinement edges follow the newest-vertex rule") {
  Forest f = Forest::from_text(unit2_mesh_text());
  const TriId ta = f.roots()[0];
  auto [c0, c1] = f.bisect(ta);
  auto edge_points = [&](TriId t) {
    const auto [a, b] = f.refinement_edge(t);
    return std::pair(f.point(a), f.point(b));
  };
  const auto [a0, b0] = edge_points(c0);
  CHECK(((a0 == Point{Dyadic(0), Dyadic(0)} && b0 == Point{Dyadic(1), Dyadic(0)}) ||
         (b0 == Point{Dyadic(0), Dyadic(0)} && a0 == Point{Dyadic(1), Dyadic(0)})));
  const auto [a1, b1] = edge_points(c1);
  CHECK(((a1 == Point{Dyadic(1), Dyadic(0)} && b1 == Point{Dyadic(1), Dyadic(1)}) ||
         (b1 == Point{Dyadic(1), Dyadic(0)} && a1 == Point{Dyadic(1), Dyadic(1)})));
}

TEST_CASE("shape regularity stays at 2 for right isosceles fixtures") {
  Forest f = Forest::from_text(unit2_mesh_text());
  CHECK(f.shape_regularity(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.shape_regularity(4) == doctest::Approx(2.0).epsilon(1e-14));
  Forest l = Forest::from_text(lshape_mesh_text());
  const double v0 = l.shape_regularity(0);
  CHECK(l.shape_regularity(3) == doctest::Approx(v0).epsilon(1e-14));
}

TEST_CASE("triangles stay counterclockwise and halve their area exactly") {
  Forest f = Forest::from_text(lshape_mesh_text());
  std::vector<TriId> stack(f.roots().begin(), f.roots().end());
  while (!stack.empty()) {
    const TriId t = stack.back();
    stack.pop_back();
    const auto v = f.ccw(t);
    CHECK(orient2d(f.point(v[0]), f.point(v[1]), f.point(v[2])) == 1);
    if (f.tri(t).gen < 5) {
      auto [c0, c1] = f.children_of(t);
      CHECK(f.area(c0) == 0.5 * f.area(t));
      CHECK(f.area(c1) == 0.5 * f.area(t));
      stack.push_back(c0);
      stack.push_back(c1);
    }
  }
}

TEST_CASE("uniform refinements stay conforming and matched up to generation 6") {
  for (const std::string text : {unit2_mesh_text(), lshape_mesh_text()}) {
    Forest f = Forest::from_text(text);
    Genealogy g(f);
    TriangulationOps ops(f, g);
    Triangulation t = ops.bottom();
    for (int level = 0; level <= 6; ++level) {
      ops.check_conforming(t);
      const EdgeSet es = ops.edges(t);
      ops.check_matching(t, es);
      if (level < 6) {
        std::vector<VertexId> mids;
        for (TriId leaf : t.leaves) mids.push_back(f.refinement_midpoint(leaf));
        std::sort(mids.begin(), mids.end());
        mids.erase(std::unique(mids.begin(), mids.end()), mids.end());
        t = ops.to_triangulation(
            set_union(t.population, Population::from_sorted(std::move(mids))));
      }
    }
    CHECK(t.size() == f.num_roots() * 64);
  }
}

TEST_CASE("neighbour generations differ by at most one across refinement edges") {
  // randomized: Proposition-style check runs inside check_matching; fuzz a few
  // hundred refinements and assert it never trips
  Forest f = Forest::from_text(unit2_mesh_text());
  Genealogy g(f);
  TriangulationOps ops(f, g);
  std::mt19937_64 rng(20240811);
  Triangulation t = ops.bottom();
  for (int step = 0; step < 120; ++step) {
    const EdgeSet es = ops.edges(t);
    std::vector<std::int32_t> sel{static_cast<std::int32_t>(rng() % es.size())};
    t = ops.refine(t, es, sel);
    const EdgeSet es2 = ops.edges(t);
    CHECK_NOTHROW(ops.check_matching(t, es2));
    if (t.size() > 4000) t = ops.bottom();
  }
}

TEST_CASE("vertex denominator exponents are bounded by generation") {
  Forest f = Forest::from_text(unit2_mesh_text());
  Genealogy g(f);
  TriangulationOps ops(f, g);
  Triangulation t = ops.bottom();
  for (int level = 0; level < 8; ++level) {
    const EdgeSet es = ops.edges(t);
    std::vector<std::int32_t> all(static_cast<std::size_t>(es.size()));
    for (std::int32_t i = 0; i < es.size(); ++i) all[static_cast<std::size_t>(i)] = i;
    t = ops.refine(t, es, all);
  }
  for (VertexId v = 0; v < static_cast<VertexId>(f.num_vertices()); ++v) {
    if (!g.known(v)) continue;
    const Point& p = f.point(v);
    CHECK(p.x.exp <= g.gen(v) + f.initial_exp());
    CHECK(p.y.exp <= g.gen(v) + f.initial_exp());
  }
}
