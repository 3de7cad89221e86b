#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "afem/dyadic.hpp"
#include "afem/errors.hpp"

namespace afem {

using VertexId = std::int32_t;
using TriId = std::int32_t;
inline constexpr std::int32_t kNone = -1;

/// Triangle node of the binary forest. Vertices are stored canonically as
/// (peak0, peak1, newest) with peaks sorted by vertex id; the refinement
/// edge is (peak0, peak1), the edge opposite the newest vertex.
struct TriNode {
  std::array<VertexId, 3> v{kNone, kNone, kNone};
  std::int32_t gen = 0;
  TriId parent = kNone;
  std::array<TriId, 2> child{kNone, kNone};

  VertexId peak0() const { return v[0]; }
  VertexId peak1() const { return v[1]; }
  VertexId newest() const { return v[2]; }
  bool is_leaf_node() const { return child[0] == kNone; }
};

/// The binary forest of triangles generated from the initial triangulation
/// by newest vertex bisection, materialized lazily. The arena is append-only:
/// handles stay valid for the process lifetime. Single writer; readers may
/// share the structure freely once a write has completed.
class Forest {
 public:
  // Parses the initial-mesh text format:
  //   nv
  //   x_num x_den_exp y_num y_den_exp     (nv lines)
  //   nt
  //   v0 v1 v2                            (nt lines, v2 is the newest vertex)
  // '#' starts a comment. Verifies conformity and the matching condition.
  static Forest load_initial(std::istream& in);
  static Forest load_initial_file(const std::string& path);
  static Forest from_text(const std::string& text);

  std::size_t num_roots() const { return roots_.size(); }
  const std::vector<TriId>& roots() const { return roots_; }
  std::size_t num_tris() const { return tris_.size(); }
  std::size_t num_vertices() const { return points_.size(); }

  const TriNode& tri(TriId t) const { return tris_[static_cast<std::size_t>(t)]; }
  const Point& point(VertexId v) const { return points_[static_cast<std::size_t>(v)]; }

  /// Vertex triple in counterclockwise order (storage order is canonical,
  /// not geometric).
  std::array<VertexId, 3> ccw(TriId t) const;

  /// The refinement edge of `t`: the edge opposite its newest vertex,
  /// endpoints sorted by id.
  std::pair<VertexId, VertexId> refinement_edge(TriId t) const;

  /// Midpoint of the refinement edge, materializing the vertex on demand.
  VertexId refinement_midpoint(TriId t);
  /// Lookup-only variant: kNone when the midpoint vertex does not exist yet.
  VertexId find_refinement_midpoint(TriId t) const;

  /// Splits `t` by connecting its newest vertex to the refinement-edge
  /// midpoint. Exactly two children are created; the midpoint becomes their
  /// shared newest vertex. Throws AlreadyBisected when children exist.
  std::pair<TriId, TriId> bisect(TriId t);

  /// Children, bisecting on demand.
  std::pair<TriId, TriId> children_of(TriId t) {
    if (tri(t).is_leaf_node()) return bisect(t);
    return {tri(t).child[0], tri(t).child[1]};
  }

  /// Exact element area |t| = 2^-gen * |root|.
  double area(TriId t) const;
  /// Longest edge length.
  double diameter(TriId t) const;
  /// Length of the edge (a, b).
  double edge_length(VertexId a, VertexId b) const;

  /// max over materialized-on-demand triangles of gen <= k_max of
  /// diam(T)/|T|^(1/2). Materializes the uniform refinement up to k_max.
  double shape_regularity(std::int32_t k_max);

  /// True when the vertex lies on the domain boundary.
  bool on_boundary(VertexId v) const;
  /// True when the (exact) segment [a, b] lies inside a boundary segment of
  /// the initial triangulation.
  bool edge_on_boundary(VertexId a, VertexId b) const;

  VertexId find_vertex(const Point& p) const;
  VertexId vertex_of(const Point& p);  // creates on demand

  /// Descends from the roots to the unique generation-`gen` triangles that
  /// contain `p` as a vertex, materializing bisections on demand.
  std::vector<TriId> level_tris_at_vertex(VertexId p, std::int32_t gen);

  /// Leaf of the given triangulation front containing point `p` (any one of
  /// them when `p` lies on a shared edge). `is_front` decides membership.
  template <class Pred>
  TriId locate(const Point& p, const Pred& is_front) const {
    for (TriId r : roots_) {
      if (contains_point(r, p)) return descend(r, p, is_front);
    }
    throw Error(Error::Kind::usage, "locate: point outside the domain");
  }

  bool contains_point(TriId t, const Point& p) const;

  /// Maximal denominator exponent of the initial coordinates.
  std::int32_t initial_exp() const { return initial_exp_; }

  std::uint64_t version() const { return version_; }

 private:
  Forest() = default;
  void build_boundary_segments();
  VertexId add_point(const Point& p);

  template <class Pred>
  TriId descend(TriId t, const Point& p, const Pred& is_front) const {
    while (!is_front(t)) {
      const TriNode& n = tri(t);
      if (n.child[0] == kNone)
        throw Error(Error::Kind::usage, "locate: front below materialized forest");
      t = contains_point(n.child[0], p) ? n.child[0] : n.child[1];
    }
    return t;
  }

  std::vector<TriNode> tris_;
  std::vector<Point> points_;
  std::unordered_map<Point, VertexId, PointHash> point_ids_;
  std::vector<TriId> roots_;
  std::vector<std::pair<VertexId, VertexId>> boundary_segments_;
  std::vector<bool> root_vertex_on_boundary_;
  std::int32_t initial_exp_ = 0;
  std::uint64_t version_ = 0;  // bumped on every bisection

  friend class Genealogy;
};

/// UNIT2: the unit square split by the diagonal (0,0)-(1,1); newest vertices
/// at the right-angle corners (1,0) and (0,1).
std::string unit2_mesh_text();

/// LSHAPE: (-1,1)^2 minus [0,1]x[-1,0], six right isosceles triangles fanning
/// around the reentrant corner with newest vertices at the outer right-angle
/// corners.
std::string lshape_mesh_text();

}  // namespace afem
