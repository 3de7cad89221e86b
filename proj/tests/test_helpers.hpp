#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "afem/triangulation.hpp"

namespace helpers {

using namespace afem;

inline Dyadic dy(double v) {
  // exact conversion for the dyadic values used in tests
  std::int32_t e = 0;
  while (v != std::floor(v)) {
    v *= 2.0;
    ++e;
    if (e > 40) throw std::runtime_error("not dyadic");
  }
  return Dyadic(static_cast<std::int64_t>(v), e);
}

inline Point pt(double x, double y) { return Point{dy(x), dy(y)}; }

struct Session {
  Forest forest;
  Genealogy gen;
  TriangulationOps ops;
  PopulationOps pops;

  explicit Session(const std::string& text)
      : forest(Forest::from_text(text)), gen(forest), ops(forest, gen), pops(forest, gen) {}

  static Session unit2() { return Session(unit2_mesh_text()); }
  static Session lshape() { return Session(lshape_mesh_text()); }

  VertexId v(double x, double y) const {
    const VertexId id = forest.find_vertex(pt(x, y));
    if (id == kNone) throw std::runtime_error("vertex not materialized");
    return id;
  }

  // vertex id, creating the vertex if needed (for persons known to exist)
  VertexId vm(double x, double y) { return forest.vertex_of(pt(x, y)); }

  Population pop(std::initializer_list<std::pair<double, double>> extra) {
    std::vector<VertexId> ids(pops.bottom().vec());
    for (const auto& [x, y] : extra) ids.push_back(v(x, y));
    return Population::from_unsorted(std::move(ids));
  }

  Triangulation uniform(int levels) {
    Triangulation t = ops.bottom();
    ops.edges(t);
    for (int i = 0; i < levels; ++i) t = ops.uniform_refine_once(t);
    return t;
  }
};

inline std::vector<VertexId> ids_of(const Session& s,
                                    std::initializer_list<std::pair<double, double>> pts) {
  std::vector<VertexId> out;
  for (const auto& [x, y] : pts) out.push_back(s.v(x, y));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace helpers
