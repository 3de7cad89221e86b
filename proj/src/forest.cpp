#include "afem/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace afem {

namespace {

std::string edge_str(const Forest& f, VertexId a, VertexId b) {
  std::ostringstream os;
  os << "(" << f.point(a).x.str() << "," << f.point(a).y.str() << ")-(" << f.point(b).x.str()
     << "," << f.point(b).y.str() << ")";
  return os.str();
}

// Strips comments and returns whitespace-separated tokens.
std::vector<std::string> tokenize(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  return tokens;
}

std::int64_t to_int(const std::string& tok, const char* what) {
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("expected integer for ") + what + ", got '" + tok + "'");
  }
}

}  // namespace

Forest Forest::load_initial(std::istream& in) {
  Forest f;
  const auto tokens = tokenize(in);
  std::size_t pos = 0;
  auto next = [&](const char* what) -> std::int64_t {
    if (pos >= tokens.size()) throw ParseError(std::string("unexpected end of file, wanted ") + what);
    return to_int(tokens[pos++], what);
  };

  const std::int64_t nv = next("vertex count");
  if (nv < 3) throw ParseError("vertex count must be >= 3");
  for (std::int64_t i = 0; i < nv; ++i) {
    const std::int64_t xn = next("x numerator");
    const std::int64_t xe = next("x denominator exponent");
    const std::int64_t yn = next("y numerator");
    const std::int64_t ye = next("y denominator exponent");
    if (xe < 0 || ye < 0 || xe > 40 || ye > 40)
      throw ParseError("denominator exponent out of range [0,40]");
    Point p{Dyadic(xn, static_cast<std::int32_t>(xe)), Dyadic(yn, static_cast<std::int32_t>(ye))};
    if (f.point_ids_.count(p)) throw ParseError("duplicate vertex " + std::to_string(i));
    f.add_point(p);
    f.initial_exp_ = std::max({f.initial_exp_, p.x.exp, p.y.exp});
  }

  const std::int64_t nt = next("triangle count");
  if (nt < 1) throw ParseError("triangle count must be >= 1");
  for (std::int64_t i = 0; i < nt; ++i) {
    std::array<VertexId, 3> v{};
    for (int j = 0; j < 3; ++j) {
      const std::int64_t idx = next("vertex index");
      if (idx < 0 || idx >= nv) throw ParseError("vertex index out of range in triangle " + std::to_string(i));
      v[static_cast<std::size_t>(j)] = static_cast<VertexId>(idx);
    }
    if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2])
      throw ParseError("repeated vertex in triangle " + std::to_string(i));
    if (orient2d(f.point(v[0]), f.point(v[1]), f.point(v[2])) == 0)
      throw ParseError("degenerate triangle " + std::to_string(i));
    TriNode node;
    node.v = {std::min(v[0], v[1]), std::max(v[0], v[1]), v[2]};  // v2 is the newest vertex
    node.gen = 0;
    f.roots_.push_back(static_cast<TriId>(f.tris_.size()));
    f.tris_.push_back(node);
  }
  if (pos != tokens.size()) throw ParseError("trailing tokens after triangle list");

  // Conformity: every edge shared by at most two triangles, no vertex in the
  // interior of another triangle's edge.
  std::map<std::pair<VertexId, VertexId>, std::vector<TriId>> edge_tris;
  for (TriId t : f.roots_) {
    const auto& n = f.tri(t);
    for (int e = 0; e < 3; ++e) {
      VertexId a = n.v[static_cast<std::size_t>(e)];
      VertexId b = n.v[static_cast<std::size_t>((e + 1) % 3)];
      if (a > b) std::swap(a, b);
      auto& lst = edge_tris[{a, b}];
      lst.push_back(t);
      if (lst.size() > 2)
        throw NonConforming("edge " + edge_str(f, a, b) + " shared by more than two triangles");
    }
  }
  for (VertexId v = 0; v < static_cast<VertexId>(f.points_.size()); ++v) {
    for (const auto& [edge, tris] : edge_tris) {
      if (v == edge.first || v == edge.second) continue;
      if (on_segment(f.point(v), f.point(edge.first), f.point(edge.second)))
        throw NonConforming("hanging node at (" + f.point(v).x.str() + "," + f.point(v).y.str() +
                            ") on edge " + edge_str(f, edge.first, edge.second));
    }
  }

  // Matching condition: a shared refinement edge must be the refinement edge
  // of both triangles (initial triangles all have generation 0).
  for (const auto& [edge, tris] : edge_tris) {
    if (tris.size() != 2) continue;
    const bool r0 = f.refinement_edge(tris[0]) == edge;
    const bool r1 = f.refinement_edge(tris[1]) == edge;
    if (r0 != r1)
      throw MatchingViolation("edge " + edge_str(f, edge.first, edge.second) +
                              " is the refinement edge of only one of its triangles");
  }

  f.build_boundary_segments();
  return f;
}

Forest Forest::load_initial_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file: " + path);
  return load_initial(in);
}

Forest Forest::from_text(const std::string& text) {
  std::istringstream in(text);
  return load_initial(in);
}

void Forest::build_boundary_segments() {
  std::map<std::pair<VertexId, VertexId>, int> count;
  for (TriId t : roots_) {
    const auto& n = tri(t);
    for (int e = 0; e < 3; ++e) {
      VertexId a = n.v[static_cast<std::size_t>(e)];
      VertexId b = n.v[static_cast<std::size_t>((e + 1) % 3)];
      if (a > b) std::swap(a, b);
      ++count[{a, b}];
    }
  }
  for (const auto& [edge, c] : count)
    if (c == 1) boundary_segments_.push_back(edge);
}

VertexId Forest::add_point(const Point& p) {
  const VertexId id = static_cast<VertexId>(points_.size());
  points_.push_back(p);
  point_ids_.emplace(p, id);
  return id;
}

VertexId Forest::find_vertex(const Point& p) const {
  auto it = point_ids_.find(p);
  return it == point_ids_.end() ? kNone : it->second;
}

VertexId Forest::vertex_of(const Point& p) {
  auto it = point_ids_.find(p);
  if (it != point_ids_.end()) return it->second;
  return add_point(p);
}

std::array<VertexId, 3> Forest::ccw(TriId t) const {
  const auto& n = tri(t);
  if (orient2d(point(n.v[0]), point(n.v[1]), point(n.v[2])) > 0) return n.v;
  return {n.v[1], n.v[0], n.v[2]};
}

std::pair<VertexId, VertexId> Forest::refinement_edge(TriId t) const {
  const auto& n = tri(t);
  return {n.v[0], n.v[1]};
}

VertexId Forest::find_refinement_midpoint(TriId t) const {
  const auto& n = tri(t);
  return find_vertex(midpoint(point(n.v[0]), point(n.v[1])));
}

VertexId Forest::refinement_midpoint(TriId t) {
  const auto& n = tri(t);
  return vertex_of(midpoint(point(n.v[0]), point(n.v[1])));
}

std::pair<TriId, TriId> Forest::bisect(TriId t) {
  if (!tri(t).is_leaf_node())
    throw AlreadyBisected("triangle handle " + std::to_string(t) + " already has children");
  const VertexId m = refinement_midpoint(t);
  const TriNode n = tri(t);  // copy: the arena may reallocate below

  auto make_child = [&](VertexId peak) {
    TriNode c;
    c.v = {std::min(peak, n.v[2]), std::max(peak, n.v[2]), m};
    c.gen = n.gen + 1;
    c.parent = t;
    const TriId id = static_cast<TriId>(tris_.size());
    tris_.push_back(c);
    return id;
  };
  const TriId c0 = make_child(n.v[0]);
  const TriId c1 = make_child(n.v[1]);
  tris_[static_cast<std::size_t>(t)].child = {c0, c1};
  ++version_;
  return {c0, c1};
}

double Forest::area(TriId t) const {
  // The bisection halves areas exactly; computing from the (dyadic) corner
  // coordinates and normalizing keeps the conversion to double exact.
  const auto& n = tri(t);
  const Point& a = point(n.v[0]);
  const Point& b = point(n.v[1]);
  const Point& c = point(n.v[2]);
  const std::int32_t ex = std::max({a.x.exp, b.x.exp, c.x.exp});
  const std::int32_t ey = std::max({a.y.exp, b.y.exp, c.y.exp});
  auto sx = [&](const Dyadic& d) { return static_cast<__int128>(d.num) << (ex - d.exp); };
  auto sy = [&](const Dyadic& d) { return static_cast<__int128>(d.num) << (ey - d.exp); };
  __int128 det = (sx(b.x) - sx(a.x)) * (sy(c.y) - sy(a.y)) -
                 (sy(b.y) - sy(a.y)) * (sx(c.x) - sx(a.x));
  if (det < 0) det = -det;
  std::int32_t shift = ex + ey + 1;  // area = det / 2^(ex+ey+1)
  while (det != 0 && (det & 1) == 0) {
    det >>= 1;
    --shift;
  }
  return std::ldexp(static_cast<double>(static_cast<std::int64_t>(det)), -shift);
}

double Forest::edge_length(VertexId a, VertexId b) const {
  const double dx = point(a).xd() - point(b).xd();
  const double dy = point(a).yd() - point(b).yd();
  return std::sqrt(dx * dx + dy * dy);
}

double Forest::diameter(TriId t) const {
  const auto& n = tri(t);
  return std::max({edge_length(n.v[0], n.v[1]), edge_length(n.v[1], n.v[2]),
                   edge_length(n.v[0], n.v[2])});
}

double Forest::shape_regularity(std::int32_t k_max) {
  double worst = 0.0;
  std::vector<TriId> stack(roots_.begin(), roots_.end());
  while (!stack.empty()) {
    const TriId t = stack.back();
    stack.pop_back();
    worst = std::max(worst, diameter(t) / std::sqrt(area(t)));
    if (tri(t).gen < k_max) {
      auto [c0, c1] = children_of(t);
      stack.push_back(c0);
      stack.push_back(c1);
    }
  }
  return worst;
}

bool Forest::on_boundary(VertexId v) const {
  const Point& p = point(v);
  for (const auto& [a, b] : boundary_segments_)
    if (on_segment(p, point(a), point(b))) return true;
  return false;
}

bool Forest::edge_on_boundary(VertexId a, VertexId b) const {
  // An NVB edge lies inside a single initial triangle, so a boundary edge is
  // contained in one initial boundary segment.
  const Point& pa = point(a);
  const Point& pb = point(b);
  for (const auto& [s0, s1] : boundary_segments_)
    if (on_segment(pa, point(s0), point(s1)) && on_segment(pb, point(s0), point(s1))) return true;
  return false;
}

bool Forest::contains_point(TriId t, const Point& p) const {
  const auto& n = tri(t);
  return in_triangle(p, point(n.v[0]), point(n.v[1]), point(n.v[2]));
}

std::vector<TriId> Forest::level_tris_at_vertex(VertexId p, std::int32_t gen) {
  std::vector<TriId> out;
  const Point& pt = point(p);
  std::vector<TriId> stack;
  for (TriId r : roots_)
    if (contains_point(r, pt)) stack.push_back(r);
  while (!stack.empty()) {
    const TriId t = stack.back();
    stack.pop_back();
    const std::int32_t g = tri(t).gen;
    if (g == gen) {
      const auto& n = tri(t);
      if (n.v[0] == p || n.v[1] == p || n.v[2] == p) out.push_back(t);
      continue;
    }
    auto [c0, c1] = children_of(t);
    if (contains_point(c0, pt)) stack.push_back(c0);
    if (contains_point(c1, pt)) stack.push_back(c1);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string unit2_mesh_text() {
  return "# unit square, diagonal (0,0)-(1,1)\n"
         "4\n"
         "0 0 0 0\n"
         "1 0 0 0\n"
         "1 0 1 0\n"
         "0 0 1 0\n"
         "2\n"
         "0 2 1\n"  // ((0,0),(1,1)) peaks, newest (1,0)
         "0 2 3\n"; // ((0,0),(1,1)) peaks, newest (0,1)
}

std::string lshape_mesh_text() {
  return "# L-shaped domain (-1,1)^2 minus [0,1]x[-1,0]\n"
         "8\n"
         "0 0 0 0\n"    // 0: (0,0) reentrant corner
         "1 0 0 0\n"    // 1: (1,0)
         "1 0 1 0\n"    // 2: (1,1)
         "0 0 1 0\n"    // 3: (0,1)
         "-1 0 1 0\n"   // 4: (-1,1)
         "-1 0 0 0\n"   // 5: (-1,0)
         "-1 0 -1 0\n"  // 6: (-1,-1)
         "0 0 -1 0\n"   // 7: (0,-1)
         "6\n"
         "0 2 1\n"  // fan around (0,0); newest at outer right-angle corners
         "0 2 3\n"
         "0 4 3\n"
         "0 4 5\n"
         "0 6 5\n"
         "0 6 7\n";
}

}  // namespace afem
