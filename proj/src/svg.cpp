#include "afem/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace afem {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string render_svg(const Forest& forest, const Triangulation& t, const EdgeSet& es,
                       const IndicatorField* indicators) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (TriId leaf : t.leaves) {
    for (VertexId v : forest.tri(leaf).v) {
      const Point& p = forest.point(v);
      xmin = std::min(xmin, p.xd());
      xmax = std::max(xmax, p.xd());
      ymin = std::min(ymin, p.yd());
      ymax = std::max(ymax, p.yd());
    }
  }
  const double scale = 512.0 / std::max(xmax - xmin, ymax - ymin);
  auto sx = [&](double x) { return (x - xmin) * scale; };
  auto sy = [&](double y) { return (ymax - y) * scale; };  // flip: svg y grows downwards

  double indmax = 0.0;
  if (indicators)
    for (double v : indicators->e2) indmax = std::max(indmax, v);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << num(scale * (xmax - xmin))
     << " " << num(scale * (ymax - ymin)) << "\">\n";
  for (TriId leaf : t.leaves) {
    const auto v = forest.ccw(leaf);
    os << "<polygon points=\"";
    for (int i = 0; i < 3; ++i) {
      const Point& p = forest.point(v[static_cast<std::size_t>(i)]);
      os << num(sx(p.xd())) << "," << num(sy(p.yd()));
      if (i < 2) os << " ";
    }
    os << "\" fill=\"#f7f3e8\" stroke=\"none\"/>\n";
  }
  for (std::int32_t i = 0; i < es.size(); ++i) {
    const Edge& e = es.edges[static_cast<std::size_t>(i)];
    double width = 1.0;
    if (indicators && indmax > 0.0)
      width = 0.5 + 3.5 * indicators->e2[static_cast<std::size_t>(i)] / indmax;
    const Point& a = forest.point(e.a);
    const Point& b = forest.point(e.b);
    os << "<line x1=\"" << num(sx(a.xd())) << "\" y1=\"" << num(sy(a.yd())) << "\" x2=\""
       << num(sx(b.xd())) << "\" y2=\"" << num(sy(b.yd())) << "\" stroke=\"#204060\""
       << " stroke-width=\"" << num(width) << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_svg(const Forest& forest, const Triangulation& t, const EdgeSet& es,
              const IndicatorField* indicators, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << render_svg(forest, t, es, indicators);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace afem
