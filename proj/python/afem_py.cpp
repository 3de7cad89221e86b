#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "afem/verify.hpp"

namespace py = pybind11;
using namespace afem;

namespace {

py::dict record_to_dict(const IterationRecord& r) {
  py::dict d;
  d["k"] = r.k;
  d["leaves"] = r.leaves;
  d["persons"] = r.persons;
  d["dofs"] = r.dofs;
  d["marked"] = r.marked;
  d["closure"] = r.closure;
  d["J"] = r.J;
  d["H"] = r.H;
  d["G"] = r.G;
  d["osc2"] = r.osc2;
  d["est2"] = r.est2;
  d["h1err"] = r.h1err;
  return d;
}

py::list run_py(const std::string& problem, double mu, const std::string& marker,
                py::object max_dofs, py::object max_iters, py::object est_tol, double cg_tol,
                int threads) {
  Driver driver(catalog_problem(problem));
  AfemConfig cfg;
  cfg.problem = problem;
  cfg.mu = mu;
  cfg.marker = marker_from_string(marker);
  if (!max_dofs.is_none()) cfg.max_dofs = max_dofs.cast<std::int64_t>();
  if (!max_iters.is_none()) cfg.max_iters = max_iters.cast<std::int64_t>();
  if (!est_tol.is_none()) cfg.est_tol = est_tol.cast<double>();
  cfg.cg_tol = cg_tol;
  cfg.threads = threads;
  const RunResult result = driver.run(cfg);
  py::list out;
  for (const auto& r : result.records) out.append(record_to_dict(r));
  return out;
}

py::dict total_energy_py(const std::string& problem, int uniform_level, double cg_tol) {
  Driver driver(catalog_problem(problem));
  Triangulation t = driver.ops().bottom();
  driver.ops().edges(t);
  for (int i = 0; i < uniform_level; ++i) t = driver.ops().uniform_refine_once(t);
  const EnergyReport r = driver.fem().total_energy(t, driver.field(), cg_tol);
  const FemState s = driver.fem().solve(t, driver.field(), cg_tol);
  const EdgeSet es = driver.ops().edges(t);
  const IndicatorField ind = driver.estimator().indicators(t, es, s, driver.field());
  py::dict d;
  d["J"] = r.J;
  d["H"] = r.H;
  d["G"] = r.G;
  d["osc2"] = r.osc2;
  d["est2"] = ind.total;
  d["leaves"] = t.size();
  d["persons"] = t.population.size();
  return d;
}

py::list gopt_py(const std::string& problem, int m_max, double cg_tol) {
  Driver driver(catalog_problem(problem));
  OracleLab lab(driver.forest(), driver.genealogy());
  const EnumerationIndex idx = lab.enumerate_populations(m_max);
  const auto table = lab.g_opt_table(idx, driver.field(), cg_tol);
  py::list out;
  for (const auto& rec : table) {
    py::dict d;
    d["m"] = rec.m;
    d["count"] = rec.count;
    d["gopt"] = rec.gopt;
    out.append(d);
  }
  return out;
}

py::dict mesh_info_py(const std::string& problem) {
  Driver driver(catalog_problem(problem));
  const Triangulation t = driver.ops().bottom();
  const EdgeSet es = driver.ops().edges(t);
  driver.ops().check_conforming(t);
  driver.ops().check_matching(t, es);
  py::dict d;
  d["triangles"] = t.size();
  d["vertices"] = t.population.size();
  d["edges"] = es.size();
  d["shape_regularity"] = driver.forest().shape_regularity(4);
  return d;
}

py::dict verify_py(const std::string& suite, py::object n, std::uint64_t seed,
                   std::int64_t max_dofs) {
  VerifyOptions opt;
  if (!n.is_none()) opt.n = n.cast<std::int64_t>();
  opt.seed = seed;
  opt.max_dofs = max_dofs;
  const SuiteResult r = run_suite(suite, opt);
  py::dict d;
  d["name"] = r.name;
  d["pass"] = r.pass;
  d["seconds"] = r.seconds;
  d["lines"] = r.lines;
  return d;
}

}  // namespace

PYBIND11_MODULE(afem_py, m) {
  m.doc() = "adaptive P1 Poisson solver with maximum-strategy marking";

  py::register_exception<Error>(m, "AfemError");

  m.def("run", &run_py, py::arg("problem"), py::arg("mu") = 0.5,
        py::arg("marker") = "reference", py::arg("max_dofs") = py::none(),
        py::arg("max_iters") = py::none(), py::arg("est_tol") = py::none(),
        py::arg("cg_tol") = 1e-12, py::arg("threads") = 1,
        "run the adaptive loop and return one record per iteration");
  m.def("total_energy", &total_energy_py, py::arg("problem"), py::arg("uniform_level") = 0,
        py::arg("cg_tol") = 1e-12, "energies and estimator total on a uniform refinement");
  m.def("gopt", &gopt_py, py::arg("problem"), py::arg("m_max"), py::arg("cg_tol") = 1e-12,
        "brute-force optimal total energies per added-person budget");
  m.def("mesh_info", &mesh_info_py, py::arg("problem"), "fixture statistics and checks");
  m.def("verify", &verify_py, py::arg("suite"), py::arg("n") = py::none(),
        py::arg("seed") = 1234567, py::arg("max_dofs") = 20000,
        "run one verification suite and return its summary");
  m.def("problems", &catalog_names, "catalog problem names");
}
