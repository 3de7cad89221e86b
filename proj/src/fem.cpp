#include "afem/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace afem {

const double TriQuadrature::w[6] = {0.223381589678011, 0.223381589678011, 0.223381589678011,
                                    0.109951743655322, 0.109951743655322, 0.109951743655322};
const double TriQuadrature::bary[6][3] = {
    {0.445948490915965, 0.445948490915965, 0.108103018168070},
    {0.445948490915965, 0.108103018168070, 0.445948490915965},
    {0.108103018168070, 0.445948490915965, 0.445948490915965},
    {0.091576213509771, 0.091576213509771, 0.816847572980459},
    {0.091576213509771, 0.816847572980459, 0.091576213509771},
    {0.816847572980459, 0.091576213509771, 0.091576213509771}};

Problem catalog_problem(const std::string& name) {
  using std::numbers::pi;
  if (name == "square-ones") {
    SourceField f;
    f.f = [](double, double) { return 1.0; };
    f.constant = 1.0;
    f.name = name;
    return {unit2_mesh_text(), f};
  }
  if (name == "square-zero") {
    SourceField f;
    f.f = [](double, double) { return 0.0; };
    f.constant = 0.0;
    f.name = name;
    return {unit2_mesh_text(), f};
  }
  if (name == "square-sin") {
    SourceField f;
    f.f = [](double x, double y) { return 2.0 * pi * pi * std::sin(pi * x) * std::sin(pi * y); };
    f.name = name;
    f.exact_u = [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
    f.exact_grad = [](double x, double y, double* gx, double* gy) {
      *gx = pi * std::cos(pi * x) * std::sin(pi * y);
      *gy = pi * std::sin(pi * x) * std::cos(pi * y);
    };
    return {unit2_mesh_text(), f};
  }
  if (name == "lshape-ones") {
    SourceField f;
    f.f = [](double, double) { return 1.0; };
    f.constant = 1.0;
    f.name = name;
    return {lshape_mesh_text(), f};
  }
  throw Error(Error::Kind::usage, "unknown problem '" + name +
                                      "' (try square-ones, square-sin, lshape-ones)");
}

std::vector<std::string> catalog_names() {
  return {"square-ones", "square-sin", "lshape-ones"};
}

namespace {

struct ElemGeom {
  double x[3], y[3], area;
  double gx[3], gy[3];  // P1 basis gradients
};

ElemGeom elem_geom(const Forest& f, TriId t) {
  ElemGeom g{};
  const auto v = f.ccw(t);
  for (int i = 0; i < 3; ++i) {
    g.x[i] = f.point(v[static_cast<std::size_t>(i)]).xd();
    g.y[i] = f.point(v[static_cast<std::size_t>(i)]).yd();
  }
  g.area = f.area(t);
  if (!(g.area > 0.0)) throw DegenerateElement("zero area at triangle " + std::to_string(t));
  const double inv2a = 1.0 / (2.0 * g.area);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    g.gx[i] = (g.y[j] - g.y[k]) * inv2a;
    g.gy[i] = (g.x[k] - g.x[j]) * inv2a;
  }
  return g;
}

// runs fn(i) for i in [0, n) over `threads` blocks; disjoint writes only
template <class Fn>
void parallel_blocks(std::size_t n, int threads, const Fn& fn) {
  if (threads <= 1 || n < 1024) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + nt - 1) / nt;
  for (std::size_t b = 0; b < nt; ++b) {
    const std::size_t lo = b * chunk, hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

double Fem::norm_f_sq_on(TriId t, const SourceField& f) const {
  const double area = forest_->area(t);
  if (f.constant) return *f.constant * *f.constant * area;
  const auto v = forest_->ccw(t);
  double acc = 0.0;
  for (int q = 0; q < TriQuadrature::n; ++q) {
    double px = 0.0, py = 0.0;
    for (int i = 0; i < 3; ++i) {
      px += TriQuadrature::bary[q][i] * forest_->point(v[static_cast<std::size_t>(i)]).xd();
      py += TriQuadrature::bary[q][i] * forest_->point(v[static_cast<std::size_t>(i)]).yd();
    }
    const double val = f.f(px, py);
    acc += TriQuadrature::w[q] * val * val;
  }
  return acc * area;
}

double Fem::mean_f_on(TriId t, const SourceField& f) const {
  if (f.constant) return *f.constant;
  const auto v = forest_->ccw(t);
  double acc = 0.0;
  for (int q = 0; q < TriQuadrature::n; ++q) {
    double px = 0.0, py = 0.0;
    for (int i = 0; i < 3; ++i) {
      px += TriQuadrature::bary[q][i] * forest_->point(v[static_cast<std::size_t>(i)]).xd();
      py += TriQuadrature::bary[q][i] * forest_->point(v[static_cast<std::size_t>(i)]).yd();
    }
    acc += TriQuadrature::w[q] * f.f(px, py);
  }
  return acc;
}

FemState Fem::assemble(const Triangulation& t, const SourceField& f, int threads) const {
  FemState s;
  s.node_ids.assign(t.population.ids().begin(), t.population.ids().end());
  s.dof_of.assign(s.node_ids.size(), -1);
  // geometric boundary test: works whether or not the person is registered
  for (std::size_t i = 0; i < s.node_ids.size(); ++i)
    if (!forest_->on_boundary(s.node_ids[i])) s.dof_of[i] = s.n_dofs++;

  auto node_pos = [&](VertexId v) {
    return static_cast<std::size_t>(
        std::lower_bound(s.node_ids.begin(), s.node_ids.end(), v) - s.node_ids.begin());
  };

  // per-element matrices and loads, disjoint writes, deterministic
  const std::size_t ne = t.leaves.size();
  std::vector<std::array<double, 9>> elem_mat(ne);
  std::vector<std::array<double, 3>> elem_load(ne);
  std::vector<std::array<std::size_t, 3>> elem_nodes(ne);
  parallel_blocks(ne, threads, [&](std::size_t ei) {
    const TriId leaf = t.leaves[ei];
    const ElemGeom g = elem_geom(*forest_, leaf);
    const auto v = forest_->ccw(leaf);
    for (int i = 0; i < 3; ++i)
      elem_nodes[ei][static_cast<std::size_t>(i)] = node_pos(v[static_cast<std::size_t>(i)]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        elem_mat[ei][static_cast<std::size_t>(3 * i + j)] =
            (g.gx[i] * g.gx[j] + g.gy[i] * g.gy[j]) * g.area;
    // element row sums vanish before boundary elimination: the basis sums to 1
    for (int i = 0; i < 3; ++i) {
      double li = 0.0;
      if (f.constant) {
        li = *f.constant * g.area / 3.0;
      } else {
        for (int q = 0; q < TriQuadrature::n; ++q) {
          const double px = TriQuadrature::bary[q][0] * g.x[0] +
                            TriQuadrature::bary[q][1] * g.x[1] + TriQuadrature::bary[q][2] * g.x[2];
          const double py = TriQuadrature::bary[q][0] * g.y[0] +
                            TriQuadrature::bary[q][1] * g.y[1] + TriQuadrature::bary[q][2] * g.y[2];
          li += TriQuadrature::w[q] * f.f(px, py) * TriQuadrature::bary[q][i];
        }
        li *= g.area;
      }
      elem_load[ei][static_cast<std::size_t>(i)] = li;
    }
  });

  // adjacency over interior dofs
  std::vector<std::vector<std::int32_t>> adj(static_cast<std::size_t>(s.n_dofs));
  for (std::size_t ei = 0; ei < ne; ++ei)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const std::int32_t di = s.dof_of[elem_nodes[ei][static_cast<std::size_t>(i)]];
        const std::int32_t dj = s.dof_of[elem_nodes[ei][static_cast<std::size_t>(j)]];
        if (di >= 0 && dj >= 0) adj[static_cast<std::size_t>(di)].push_back(dj);
      }
  s.row_ptr.assign(static_cast<std::size_t>(s.n_dofs) + 1, 0);
  for (std::size_t r = 0; r < adj.size(); ++r) {
    auto& row = adj[r];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    s.row_ptr[r + 1] = s.row_ptr[r] + static_cast<std::int32_t>(row.size());
  }
  s.col_idx.resize(static_cast<std::size_t>(s.row_ptr.back()));
  s.values.assign(s.col_idx.size(), 0.0);
  for (std::size_t r = 0; r < adj.size(); ++r)
    std::copy(adj[r].begin(), adj[r].end(),
              s.col_idx.begin() + s.row_ptr[r]);

  s.load.assign(static_cast<std::size_t>(s.n_dofs), 0.0);
  auto add_at = [&](std::int32_t r, std::int32_t c, double v) {
    const auto lo = s.col_idx.begin() + s.row_ptr[static_cast<std::size_t>(r)];
    const auto hi = s.col_idx.begin() + s.row_ptr[static_cast<std::size_t>(r) + 1];
    const auto it = std::lower_bound(lo, hi, c);
    s.values[static_cast<std::size_t>(it - s.col_idx.begin())] += v;
  };
  for (std::size_t ei = 0; ei < ne; ++ei) {
    for (int i = 0; i < 3; ++i) {
      const std::int32_t di = s.dof_of[elem_nodes[ei][static_cast<std::size_t>(i)]];
      if (di < 0) continue;
      s.load[static_cast<std::size_t>(di)] += elem_load[ei][static_cast<std::size_t>(i)];
      for (int j = 0; j < 3; ++j) {
        const std::int32_t dj = s.dof_of[elem_nodes[ei][static_cast<std::size_t>(j)]];
        if (dj >= 0) add_at(di, dj, elem_mat[ei][static_cast<std::size_t>(3 * i + j)]);
      }
    }
  }
  s.diag.assign(static_cast<std::size_t>(s.n_dofs), 0.0);
  for (std::int32_t r = 0; r < s.n_dofs; ++r)
    for (std::int32_t k = s.row_ptr[static_cast<std::size_t>(r)];
         k < s.row_ptr[static_cast<std::size_t>(r) + 1]; ++k)
      if (s.col_idx[static_cast<std::size_t>(k)] == r)
        s.diag[static_cast<std::size_t>(r)] = s.values[static_cast<std::size_t>(k)];

  s.u.assign(static_cast<std::size_t>(s.n_dofs), 0.0);
  s.u_node.assign(s.node_ids.size(), 0.0);
  return s;
}

namespace {

void spmv(const FemState& s, const std::vector<double>& x, std::vector<double>& y) {
  const std::size_t n = static_cast<std::size_t>(s.n_dofs);
  for (std::size_t r = 0; r < n; ++r) {
    double acc = 0.0;
    for (std::int32_t k = s.row_ptr[r]; k < s.row_ptr[r + 1]; ++k)
      acc += s.values[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(s.col_idx[static_cast<std::size_t>(k)])];
    y[r] = acc;
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

void Fem::solve_cg(FemState& s, double cg_tol, std::int64_t max_iters) const {
  const std::size_t n = static_cast<std::size_t>(s.n_dofs);
  if (max_iters < 0) max_iters = 20 * static_cast<std::int64_t>(n) + 20;
  s.u.assign(n, 0.0);
  if (n == 0) {
    s.solver_residual = 0.0;
    for (std::size_t i = 0; i < s.node_ids.size(); ++i) s.u_node[i] = 0.0;
    return;
  }
  std::vector<double> r = s.load, z(n), p(n), Ap(n);
  const double bnorm = std::sqrt(dot(s.load, s.load));
  if (bnorm == 0.0) {
    s.solver_residual = 0.0;
    std::fill(s.u_node.begin(), s.u_node.end(), 0.0);
    return;
  }
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / s.diag[i];
  p = z;
  double rz = dot(r, z);
  std::int64_t it = 0;
  double rnorm = bnorm;
  while (rnorm > cg_tol * bnorm) {
    if (it++ >= max_iters)
      throw NoConvergence("cg failed to reach tolerance in " + std::to_string(max_iters) +
                          " iterations");
    spmv(s, p, Ap);
    const double alpha = rz / dot(p, Ap);
    for (std::size_t i = 0; i < n; ++i) s.u[i] += alpha * p[i];
    for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * Ap[i];
    rnorm = std::sqrt(dot(r, r));
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / s.diag[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  s.solver_residual = rnorm;
  s.cg_iterations = static_cast<std::int32_t>(it);
  for (std::size_t i = 0; i < s.node_ids.size(); ++i)
    s.u_node[i] = s.dof_of[i] >= 0 ? s.u[static_cast<std::size_t>(s.dof_of[i])] : 0.0;
}

FemState Fem::solve(const Triangulation& t, const SourceField& f, double cg_tol,
                    int threads) const {
  FemState s = assemble(t, f, threads);
  solve_cg(s, cg_tol);
  return s;
}

double Fem::dirichlet_energy(const FemState& s) const {
  if (s.n_dofs == 0) return 0.0;
  std::vector<double> Au(static_cast<std::size_t>(s.n_dofs));
  spmv(s, s.u, Au);
  return 0.5 * dot(s.u, Au) - dot(s.load, s.u);
}

double Fem::h_term_over(std::span<const TriId> leaves, const SourceField& f) const {
  double acc = 0.0;
  for (TriId t : leaves) acc += forest_->area(t) * norm_f_sq_on(t, f);
  return acc;
}

double Fem::h_term(const Triangulation& t, const SourceField& f) const {
  return h_term_over(t.leaves, f);
}

double Fem::h_term_diff(const Triangulation& t, const Triangulation& t_star,
                        const SourceField& f) const {
  return h_term_over(ops_.coarsening_area(t, t_star), f);
}

double Fem::oscillation_over(std::span<const TriId> leaves, const SourceField& f) const {
  if (f.constant) return 0.0;
  double acc = 0.0;
  for (TriId t : leaves) {
    const double area = forest_->area(t);
    const double mean = mean_f_on(t, f);
    const double n2 = norm_f_sq_on(t, f) - area * mean * mean;
    acc += area * std::max(n2, 0.0);
  }
  return acc;
}

double Fem::oscillation(const Triangulation& t, const SourceField& f) const {
  return oscillation_over(t.leaves, f);
}

EnergyReport Fem::total_energy(const Triangulation& t, const SourceField& f, double cg_tol,
                               int threads) const {
  FemState s = solve(t, f, cg_tol, threads);
  EnergyReport r;
  r.J = dirichlet_energy(s);
  r.H = h_term(t, f);
  r.G = r.J + r.H;
  r.osc2 = oscillation(t, f);
  return r;
}

double Fem::point_value(const Triangulation& t, const FemState& s, const Point& p) const {
  const TriId leaf = forest_->locate(p, [&](TriId x) { return t.has_leaf(x); });
  const auto v = forest_->ccw(leaf);
  const ElemGeom g = elem_geom(*forest_, leaf);
  // barycentric weights through signed sub-areas
  const double px = p.xd(), py = p.yd();
  auto sub = [&](int i, int j) {
    return 0.5 * ((g.x[j] - g.x[i]) * (py - g.y[i]) - (g.y[j] - g.y[i]) * (px - g.x[i]));
  };
  const double l0 = sub(1, 2) / g.area, l1 = sub(2, 0) / g.area, l2 = sub(0, 1) / g.area;
  auto pos = [&](VertexId q) {
    return static_cast<std::size_t>(
        std::lower_bound(s.node_ids.begin(), s.node_ids.end(), q) - s.node_ids.begin());
  };
  return l0 * s.u_node[pos(v[0])] + l1 * s.u_node[pos(v[1])] + l2 * s.u_node[pos(v[2])];
}

std::vector<double> Fem::prolong(const Triangulation& coarse, const FemState& coarse_state,
                                 const Triangulation& fine) const {
  std::vector<double> out(fine.population.size());
  for (std::size_t i = 0; i < fine.population.size(); ++i) {
    const VertexId v = fine.population.ids()[i];
    if (coarse.population.contains(v)) {
      const auto pos = static_cast<std::size_t>(
          std::lower_bound(coarse_state.node_ids.begin(), coarse_state.node_ids.end(), v) -
          coarse_state.node_ids.begin());
      out[i] = coarse_state.u_node[pos];
    } else {
      out[i] = point_value(coarse, coarse_state, forest_->point(v));
    }
  }
  return out;
}

double Fem::h1_seminorm_sq(const Triangulation& t, std::span<const double> node_values) const {
  double acc = 0.0;
  auto pos = [&](VertexId q) {
    return static_cast<std::size_t>(
        std::lower_bound(t.population.ids().begin(), t.population.ids().end(), q) -
        t.population.ids().begin());
  };
  for (TriId leaf : t.leaves) {
    const ElemGeom g = elem_geom(*forest_, leaf);
    const auto v = forest_->ccw(leaf);
    double gx = 0.0, gy = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double val = node_values[pos(v[static_cast<std::size_t>(i)])];
      gx += val * g.gx[i];
      gy += val * g.gy[i];
    }
    acc += (gx * gx + gy * gy) * g.area;
  }
  return acc;
}

double Fem::h1_error_sq_exact(const Triangulation& t, const FemState& s,
                              const SourceField& f) const {
  if (!f.exact_grad) throw Error(Error::Kind::usage, "no exact gradient for this problem");
  double acc = 0.0;
  auto pos = [&](VertexId q) {
    return static_cast<std::size_t>(
        std::lower_bound(s.node_ids.begin(), s.node_ids.end(), q) - s.node_ids.begin());
  };
  for (TriId leaf : t.leaves) {
    const ElemGeom g = elem_geom(*forest_, leaf);
    const auto v = forest_->ccw(leaf);
    double ux = 0.0, uy = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double val = s.u_node[pos(v[static_cast<std::size_t>(i)])];
      ux += val * g.gx[i];
      uy += val * g.gy[i];
    }
    double cell = 0.0;
    for (int q = 0; q < TriQuadrature::n; ++q) {
      const double px = TriQuadrature::bary[q][0] * g.x[0] + TriQuadrature::bary[q][1] * g.x[1] +
                        TriQuadrature::bary[q][2] * g.x[2];
      const double py = TriQuadrature::bary[q][0] * g.y[0] + TriQuadrature::bary[q][1] * g.y[1] +
                        TriQuadrature::bary[q][2] * g.y[2];
      double gxq, gyq;
      f.exact_grad(px, py, &gxq, &gyq);
      cell += TriQuadrature::w[q] * ((gxq - ux) * (gxq - ux) + (gyq - uy) * (gyq - uy));
    }
    acc += cell * g.area;
  }
  return acc;
}

std::pair<double, double> Fem::energy_diff_identity(const Triangulation& t,
                                                    const Triangulation& t_star,
                                                    const SourceField& f, double cg_tol) const {
  if (!t.population.subset_of(t_star.population))
    throw NotNested("energy_diff_identity: t must be a coarsening of t_star");
  FemState sc = solve(t, f, cg_tol);
  FemState sf = solve(t_star, f, cg_tol);
  const double lhs = dirichlet_energy(sc) - dirichlet_energy(sf);
  std::vector<double> up = prolong(t, sc, t_star);
  for (std::size_t i = 0; i < up.size(); ++i) up[i] -= sf.u_node[i];
  const double rhs = 0.5 * h1_seminorm_sq(t_star, up);
  return {lhs, rhs};
}

}  // namespace afem
