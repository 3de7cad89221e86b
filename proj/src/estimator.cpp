#include "afem/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

namespace afem {

namespace {

// piecewise-constant gradient of the discrete solution on one leaf
void leaf_gradient(const Forest& forest, const FemState& s, TriId leaf, double* gx, double* gy) {
  const auto v = forest.ccw(leaf);
  double x[3], y[3], val[3];
  for (int i = 0; i < 3; ++i) {
    x[i] = forest.point(v[static_cast<std::size_t>(i)]).xd();
    y[i] = forest.point(v[static_cast<std::size_t>(i)]).yd();
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(s.node_ids.begin(), s.node_ids.end(), v[static_cast<std::size_t>(i)]) -
        s.node_ids.begin());
    val[i] = s.u_node[pos];
  }
  const double area = forest.area(leaf);
  const double inv2a = 1.0 / (2.0 * area);
  *gx = 0.0;
  *gy = 0.0;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    *gx += val[i] * (y[j] - y[k]) * inv2a;
    *gy += val[i] * (x[k] - x[j]) * inv2a;
  }
}

}  // namespace

IndicatorField Estimator::indicators(const Triangulation& t, const EdgeSet& es,
                                     const FemState& state, const SourceField& f,
                                     int threads) const {
  IndicatorField ind;
  const std::size_t n = static_cast<std::size_t>(es.size());
  ind.e2.assign(n, 0.0);
  ind.jump2.assign(n, 0.0);
  ind.elem2.assign(n, 0.0);

  // per-leaf data computed once
  std::vector<double> hf2(t.leaves.size());   // h_T^2 ||f||^2 = |T| * ||f||^2
  std::vector<double> gx(t.leaves.size()), gy(t.leaves.size());
  auto leaf_pos = [&](TriId leaf) {
    return static_cast<std::size_t>(
        std::lower_bound(t.leaves.begin(), t.leaves.end(), leaf) - t.leaves.begin());
  };
  auto work_leaf = [&](std::size_t i) {
    const TriId leaf = t.leaves[i];
    hf2[i] = forest_->area(leaf) * fem_.norm_f_sq_on(leaf, f);
    leaf_gradient(*forest_, state, leaf, &gx[i], &gy[i]);
  };
  auto work_edge = [&](std::size_t i) {
    const Edge& ed = es.edges[i];
    double elem = 0.0;
    for (int s = 0; s < 2; ++s)
      if (ed.tri[s] != kNone) elem += hf2[leaf_pos(ed.tri[s])];
    double jump = 0.0;
    if (ed.interior) {
      // sum of the two traces of grad u . n with outward normals; the normals
      // are opposite, so the jump is the difference projected on one normal
      const double ax = forest_->point(ed.a).xd(), ay = forest_->point(ed.a).yd();
      const double bx = forest_->point(ed.b).xd(), by = forest_->point(ed.b).yd();
      const double len = ed.length;
      const double nx = (by - ay) / len, ny = (ax - bx) / len;
      const std::size_t p0 = leaf_pos(ed.tri[0]), p1 = leaf_pos(ed.tri[1]);
      const double j = (gx[p0] - gx[p1]) * nx + (gy[p0] - gy[p1]) * ny;
      jump = len * len * j * j;  // h_S * ||[grad u]||^2_{L2(S)}
    }
    ind.elem2[i] = elem;
    ind.jump2[i] = jump;
    ind.e2[i] = elem + jump;
  };

  if (threads <= 1 || t.leaves.size() < 2048) {
    for (std::size_t i = 0; i < t.leaves.size(); ++i) work_leaf(i);
    for (std::size_t i = 0; i < n; ++i) work_edge(i);
  } else {
    const std::size_t nt = static_cast<std::size_t>(threads);
    auto run = [&](std::size_t total, auto&& fn) {
      std::vector<std::thread> pool;
      const std::size_t chunk = (total + nt - 1) / nt;
      for (std::size_t b = 0; b < nt; ++b) {
        const std::size_t lo = b * chunk, hi = std::min(total, lo + chunk);
        pool.emplace_back([lo, hi, &fn] {
          for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
      }
      for (auto& th : pool) th.join();
    };
    run(t.leaves.size(), work_leaf);
    run(n, work_edge);
  }

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += ind.e2[i];
  ind.total = total;
  return ind;
}

double Estimator::edge_indicator(const Triangulation& t, const EdgeSet& es, const FemState& state,
                                 const SourceField& f, VertexId a, VertexId b) const {
  const std::int32_t e = es.find(a, b);
  if (e < 0) throw Error(Error::Kind::usage, "edge_indicator: edge not in triangulation");
  const IndicatorField ind = indicators(t, es, state, f);
  return ind.e2[static_cast<std::size_t>(e)];
}

double Estimator::accumulate(const IndicatorField& ind, std::span<const std::int32_t> sel) {
  double acc = 0.0;
  for (std::int32_t e : sel) acc += ind.e2[static_cast<std::size_t>(e)];
  return acc;
}

double Estimator::person_indicator(const EdgeSet& es, const IndicatorField& ind,
                                   std::span<const VertexId> persons) {
  double acc = 0.0;
  for (VertexId p : persons) {
    const std::int32_t e = es.find_by_mid(p);
    if (e < 0)
      throw NotAMidpoint("person " + std::to_string(p) + " is not an edge midpoint of T(P)");
    acc += ind.e2[static_cast<std::size_t>(e)];
  }
  return acc;
}

EnergyGainResult Estimator::energy_gain_check(const Triangulation& t, const Triangulation& t_star,
                                              const SourceField& f, double cg_tol) const {
  EnergyGainResult r;
  const EnergyReport ec = fem_.total_energy(t, f, cg_tol);
  const EnergyReport ef = fem_.total_energy(t_star, f, cg_tol);
  r.gain = ec.G - ef.G;

  TriangulationOps& ops = fem_.ops();
  const EdgeSet es = ops.edges(t);
  const EdgeSet es_star = ops.edges(t_star);
  std::vector<std::int32_t> refined;
  for (std::int32_t i = 0; i < es.size(); ++i) {
    const Edge& ed = es.edges[static_cast<std::size_t>(i)];
    if (es_star.find(ed.a, ed.b) < 0) refined.push_back(i);
  }
  const FemState sc = fem_.solve(t, f, cg_tol);
  const IndicatorField ind = indicators(t, es, sc, f);
  r.est_refined = accumulate(ind, refined);
  if (r.est_refined > 0.0) {
    r.ratio = r.gain / r.est_refined;
  } else {
    r.exact_zero = true;
  }
  return r;
}

std::string indicators_to_csv(const Forest& forest, const EdgeSet& es,
                              const IndicatorField& ind) {
  std::ostringstream os;
  os << "ax,ay,bx,by,interior,e2,jump2,elem2\n";
  char buf[40];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (std::int32_t i = 0; i < es.size(); ++i) {
    const Edge& e = es.edges[static_cast<std::size_t>(i)];
    os << num(forest.point(e.a).xd()) << "," << num(forest.point(e.a).yd()) << ","
       << num(forest.point(e.b).xd()) << "," << num(forest.point(e.b).yd()) << ","
       << (e.interior ? 1 : 0) << "," << num(ind.e2[static_cast<std::size_t>(i)]) << ","
       << num(ind.jump2[static_cast<std::size_t>(i)]) << ","
       << num(ind.elem2[static_cast<std::size_t>(i)]) << "\n";
  }
  return os.str();
}

std::pair<double, double> Estimator::reliability_efficiency(const Triangulation& t,
                                                            const EdgeSet& es,
                                                            const FemState& state,
                                                            const SourceField& f,
                                                            int threads) const {
  const IndicatorField ind = indicators(t, es, state, f, threads);
  if (!f.exact_grad) throw Error(Error::Kind::usage, "reliability check needs an exact solution");
  const double err2 = fem_.h1_error_sq_exact(t, state, f);
  const double osc2 = fem_.oscillation(t, f);
  if (ind.total == 0.0) {
    if (err2 > 1e-24)
      throw Error(Error::Kind::verification, "zero estimator with nonzero error");
    return {0.0, 0.0};
  }
  return {err2 / ind.total, (err2 + osc2) / ind.total};
}

}  // namespace afem
