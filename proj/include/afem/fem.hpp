#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "afem/triangulation.hpp"

namespace afem {

/// Right-hand side f of -div grad u = f. For constant fields the L2 norms
/// and means are evaluated in closed form; everything else goes through the
/// fixed degree-4 six-point triangle quadrature.
struct SourceField {
  std::function<double(double, double)> f;
  std::string name;
  std::optional<double> constant;
  std::function<double(double, double)> exact_u;  // set when a closed-form solution exists
  std::function<void(double, double, double*, double*)> exact_grad;
  int quadrature_degree = 4;
};

struct Problem {
  std::string mesh_text;
  SourceField field;
};

/// Catalog: square-ones, square-sin, lshape-ones (and square-zero for
/// degenerate-input testing).
Problem catalog_problem(const std::string& name);
std::vector<std::string> catalog_names();

/// Sparse symmetric system over the interior nodes of one triangulation.
struct FemState {
  std::vector<VertexId> node_ids;     // population order
  std::vector<std::int32_t> dof_of;   // per node position, -1 on the boundary
  std::int32_t n_dofs = 0;

  std::vector<std::int32_t> row_ptr, col_idx;  // CSR, symmetric, both triangles stored
  std::vector<double> values, diag, load;
  std::vector<double> u;        // solution per dof
  std::vector<double> u_node;   // solution per node position (boundary = 0)
  double solver_residual = 0.0;
  std::int32_t cg_iterations = 0;

  double node_value(std::size_t node_pos) const { return u_node[node_pos]; }
};

struct EnergyReport {
  double J = 0.0;
  double H = 0.0;
  double G = 0.0;
  double osc2 = 0.0;
};

class Fem {
 public:
  Fem(Forest& forest, Genealogy& gen) : forest_(&forest), gen_(&gen), ops_(forest, gen) {}

  /// Galerkin system on T: exact P1 element stiffness, quadrature load,
  /// homogeneous Dirichlet rows eliminated.
  FemState assemble(const Triangulation& t, const SourceField& f, int threads = 1) const;

  /// Diagonally preconditioned conjugate gradients; deterministic.
  void solve_cg(FemState& state, double cg_tol, std::int64_t max_iters = -1) const;

  FemState solve(const Triangulation& t, const SourceField& f, double cg_tol,
                 int threads = 1) const;

  /// Discrete Dirichlet energy 1/2 u'Au - b'u of the solved state.
  double dirichlet_energy(const FemState& state) const;

  /// H(T) = sum |T| * ||f||^2_T  (h_T = |T|^(1/2)).
  double h_term(const Triangulation& t, const SourceField& f) const;
  /// Same sum restricted to the leaves of t refined in t_star.
  double h_term_diff(const Triangulation& t, const Triangulation& t_star,
                     const SourceField& f) const;
  double h_term_over(std::span<const TriId> leaves, const SourceField& f) const;

  /// osc^2(U) = sum_U |T| * ||f - f_T||^2_T.
  double oscillation(const Triangulation& t, const SourceField& f) const;
  double oscillation_over(std::span<const TriId> leaves, const SourceField& f) const;

  EnergyReport total_energy(const Triangulation& t, const SourceField& f, double cg_tol,
                            int threads = 1) const;

  /// Both sides of J(T) - J(T_*) = 1/2 |u_T - u_T*|^2_{H1}, computed
  /// independently (energy difference vs prolongated seminorm).
  std::pair<double, double> energy_diff_identity(const Triangulation& t,
                                                 const Triangulation& t_star,
                                                 const SourceField& f, double cg_tol) const;

  /// Nodal values of the coarse solution on a refinement's nodes.
  std::vector<double> prolong(const Triangulation& coarse, const FemState& coarse_state,
                              const Triangulation& fine) const;

  /// | v |^2_{H1} for the P1 function with the given nodal values, summed
  /// element by element in leaf order.
  double h1_seminorm_sq(const Triangulation& t, std::span<const double> node_values) const;

  /// Elementwise quadrature of |grad u_exact - grad u_T|^2.
  double h1_error_sq_exact(const Triangulation& t, const FemState& state,
                           const SourceField& f) const;

  double point_value(const Triangulation& t, const FemState& state, const Point& p) const;

  double norm_f_sq_on(TriId t, const SourceField& f) const;
  double mean_f_on(TriId t, const SourceField& f) const;

  TriangulationOps& ops() { return ops_; }

 private:
  Forest* forest_;
  Genealogy* gen_;
  mutable TriangulationOps ops_;
};

/// Fixed degree-4 symmetric 6-point quadrature; weights sum to one, points
/// in barycentric coordinates.
struct TriQuadrature {
  static constexpr int n = 6;
  static const double w[6];
  static const double bary[6][3];
};

}  // namespace afem
