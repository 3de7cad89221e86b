#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "afem/svg.hpp"
#include "afem/verify.hpp"

namespace {

using namespace afem;

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case Error::Kind::usage: return 1;
    case Error::Kind::verification: return 2;
    case Error::Kind::budget:
    case Error::Kind::io: return 3;
  }
  return 3;
}

Problem problem_from(const std::string& mesh_file, const std::string& problem_name) {
  if (!mesh_file.empty()) {
    std::ifstream in(mesh_file);
    if (!in) throw IoError("cannot open mesh file: " + mesh_file);
    std::ostringstream text;
    text << in.rdbuf();
    SourceField f;
    f.f = [](double, double) { return 1.0; };
    f.constant = 1.0;
    f.name = "ones";
    return Problem{text.str(), f};
  }
  return catalog_problem(problem_name);
}

std::string json_path_for(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

int cmd_run(const std::string& mesh_file, const std::string& problem_name, double mu,
            const std::string& marker, std::int64_t max_dofs, std::int64_t max_iters,
            double est_tol, double cg_tol, const std::string& report,
            const std::string& svg_dir, const std::string& indicators_dir,
            const std::string& trace_dir, int threads, std::uint64_t seed) {
  const Problem prob = problem_from(mesh_file, problem_name);
  Driver driver(prob);
  AfemConfig cfg;
  cfg.problem = prob.field.name;
  cfg.mu = mu;
  cfg.marker = marker_from_string(marker);
  cfg.max_dofs = max_dofs;
  cfg.max_iters = max_iters;
  cfg.est_tol = est_tol;
  cfg.cg_tol = cg_tol;
  cfg.threads = threads;
  cfg.seed = seed;
  cfg.validate();

  for (const std::string& dir : {svg_dir, indicators_dir, trace_dir})
    if (!dir.empty()) std::filesystem::create_directories(dir);
  driver.collect_mark_traces = !trace_dir.empty();
  if (!svg_dir.empty() || !indicators_dir.empty() || !trace_dir.empty()) {
    driver.on_iteration = [&](const IterationRecord& rec, const Triangulation& t,
                              const EdgeSet& es, const IndicatorField& ind,
                              const MarkOutcome* out) {
      char name[64];
      if (!svg_dir.empty()) {
        std::snprintf(name, sizeof name, "iter_%04lld.svg", static_cast<long long>(rec.k));
        emit_svg(driver.forest(), t, es, &ind, svg_dir + "/" + name);
      }
      if (!indicators_dir.empty()) {
        std::snprintf(name, sizeof name, "ind_%04lld.csv", static_cast<long long>(rec.k));
        write_file(indicators_dir + "/" + name, indicators_to_csv(driver.forest(), es, ind));
      }
      if (!trace_dir.empty() && out) {
        std::snprintf(name, sizeof name, "mark_%04lld.csv", static_cast<long long>(rec.k));
        write_file(trace_dir + "/" + name, mark_trace_to_csv(driver.forest(), *out));
      }
    };
  }

  const RunResult result = driver.run(cfg);
  for (const auto& r : result.records)
    std::fprintf(stderr, "k=%lld dofs=%lld est2=%.6g G=%.9g marked=%lld\n",
                 static_cast<long long>(r.k), static_cast<long long>(r.dofs), r.est2, r.G,
                 static_cast<long long>(r.marked));
  std::fprintf(stderr, "stop: %s\n", result.stop_reason.c_str());
  if (!report.empty()) {
    write_file(report, records_to_csv(result.records));
    write_file(json_path_for(report), records_to_json(result.records));
  }
  return 0;
}

int cmd_oracle(const std::string& problem_name, std::int64_t m_max, const std::string& report,
               double cg_tol) {
  Driver driver(catalog_problem(problem_name));
  OracleLab lab(driver.forest(), driver.genealogy());
  const EnumerationIndex idx = lab.enumerate_populations(static_cast<std::int32_t>(m_max));
  const auto table = lab.g_opt_table(idx, driver.field(), cg_tol);
  std::ostringstream os;
  os << "m,count,gopt,popt_digest\n";
  for (const auto& rec : table) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", rec.gopt);
    os << rec.m << "," << rec.count << "," << buf << "," << std::hex << rec.digest << std::dec
       << "\n";
  }
  if (!report.empty())
    write_file(report, os.str());
  else
    std::cout << os.str();
  return 0;
}

int cmd_verify(const std::string& suite, std::int64_t n, std::uint64_t seed,
               std::int64_t max_dofs, int threads) {
  VerifyOptions opt;
  opt.n = n;
  opt.seed = seed;
  opt.max_dofs = max_dofs;
  opt.threads = threads;
  std::vector<SuiteResult> results;
  if (suite == "all") {
    results = run_acceptance(opt);
  } else {
    results.push_back(run_suite(suite, opt));
  }
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%-14s %s  (%.2fs)\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.seconds);
    for (const auto& line : r.lines) std::printf("    %s\n", line.c_str());
    ok = ok && r.pass;
  }
  return ok ? 0 : 2;
}

int cmd_mesh_info(const std::string& mesh_file, const std::string& problem_name,
                  std::int64_t k_max) {
  const Problem prob = problem_from(mesh_file, problem_name);
  Driver driver(prob);
  const Triangulation t = driver.ops().bottom();
  const EdgeSet es = driver.ops().edges(t);
  driver.ops().check_conforming(t);
  driver.ops().check_matching(t, es);
  std::int64_t interior_edges = 0, interior_nodes = 0;
  for (const Edge& e : es.edges) interior_edges += e.interior;
  for (VertexId v : t.population.ids()) interior_nodes += !driver.genealogy().on_boundary(v);
  double area = 0.0;
  for (TriId leaf : t.leaves) area += driver.forest().area(leaf);
  std::printf("triangles: %zu\n", t.size());
  std::printf("vertices:  %zu (%lld interior)\n", t.population.size(),
              static_cast<long long>(interior_nodes));
  std::printf("edges:     %d (%lld interior)\n", es.size(),
              static_cast<long long>(interior_edges));
  std::printf("area:      %.17g\n", area);
  std::printf("conforming: yes\nmatching:   yes\n");
  std::printf("shape regularity (to gen %lld): %.17g\n", static_cast<long long>(k_max),
              driver.forest().shape_regularity(static_cast<std::int32_t>(k_max)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive P1 Poisson solver with maximum-strategy marking"};
  app.require_subcommand(1);

  std::string mesh_file, problem_name = "square-ones", marker = "reference";
  std::string report, svg_dir, indicators_dir, trace_dir, suite = "all";
  double mu = 0.5, est_tol = -1.0, cg_tol = 1e-12;
  std::int64_t max_dofs = -1, max_iters = -1, m_max = 4, n = -1, k_max = 4;
  std::uint64_t seed = 1234567;
  int threads = 1;

  auto* run = app.add_subcommand("run", "run the adaptive loop");
  run->add_option("--mesh", mesh_file, "initial mesh file (text format)");
  run->add_option("--problem", problem_name, "catalog problem name");
  run->add_option("--mu", mu, "marking parameter in (0,1]");
  run->add_option("--marker", marker, "reference|linear");
  run->add_option("--max-dofs", max_dofs, "stop at this many interior nodes");
  run->add_option("--max-iters", max_iters, "stop after this many iterations");
  run->add_option("--est-tol", est_tol, "stop when the total squared estimator drops below");
  run->add_option("--cg-tol", cg_tol, "relative CG residual tolerance");
  run->add_option("--report", report, "CSV output path (a .json mirror is written too)");
  run->add_option("--svg-dir", svg_dir, "directory for per-iteration SVG dumps");
  run->add_option("--indicators-dir", indicators_dir,
                  "directory for per-iteration indicator CSV dumps");
  run->add_option("--trace-dir", trace_dir, "directory for per-iteration marking traces");
  run->add_option("--threads", threads, "worker threads for assembly/estimation");
  run->add_option("--seed", seed, "seed for randomized verification modes");

  auto* oracle = app.add_subcommand("oracle", "brute-force optimal energies");
  oracle->add_option("--problem", problem_name, "catalog problem name");
  oracle->add_option("--m-max", m_max, "enumerate populations with up to this many added persons");
  oracle->add_option("--report", report, "CSV output path (stdout when omitted)");
  oracle->add_option("--cg-tol", cg_tol, "relative CG residual tolerance");

  auto* verify = app.add_subcommand("verify", "randomized verification suites");
  verify->add_option("--suite", suite, "suite name or 'all'");
  verify->add_option("--n", n, "sample count override");
  verify->add_option("--seed", seed, "base seed");
  verify->add_option("--max-dofs", max_dofs, "adaptive-run size for the long suites");
  verify->add_option("--threads", threads, "worker threads");

  auto* info = app.add_subcommand("mesh-info", "inspect and check an initial mesh");
  info->add_option("--mesh", mesh_file, "initial mesh file (text format)");
  info->add_option("--problem", problem_name, "catalog problem name");
  info->add_option("--k-max", k_max, "generation bound for the shape-regularity scan");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (run->parsed())
      return cmd_run(mesh_file, problem_name, mu, marker, max_dofs, max_iters, est_tol, cg_tol,
                     report, svg_dir, indicators_dir, trace_dir, threads, seed);
    if (oracle->parsed()) return cmd_oracle(problem_name, m_max, report, cg_tol);
    if (verify->parsed())
      return cmd_verify(suite, n, seed, max_dofs < 0 ? 100000 : max_dofs, threads);
    if (info->parsed()) return cmd_mesh_info(mesh_file, problem_name, k_max);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 1;
}
