#include "afem/driver.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace afem {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void AfemConfig::validate() const {
  if (!(mu > 0.0) || mu > 1.0)
    throw Error(Error::Kind::usage, "mu must lie in (0, 1]");
  const int rules = (max_dofs > 0) + (max_iters >= 0) + (est_tol >= 0.0);
  if (rules != 1)
    throw Error(Error::Kind::usage,
                "exactly one stopping rule (max-dofs, max-iters, est-tol) must be set");
  if (!(cg_tol > 0.0) || cg_tol > 1e-2)
    throw Error(Error::Kind::usage, "cg-tol must lie in (0, 1e-2]");
  if (threads < 1) throw Error(Error::Kind::usage, "threads must be >= 1");
}

Driver::Driver(const Problem& problem)
    : forest_(Forest::from_text(problem.mesh_text)),
      gen_(forest_),
      ops_(forest_, gen_),
      fem_(forest_, gen_),
      est_(forest_, gen_),
      marking_(forest_, gen_),
      field_(problem.field),
      tri_(ops_.bottom()) {}

RunResult Driver::run(const AfemConfig& cfg, bool check_guarantees) {
  cfg.validate();
  RunResult result;
  double g_prev = std::numeric_limits<double>::infinity();
  std::int64_t persons_prev = -1;

  for (std::int64_t k = 0;; ++k) {
    if (cfg.max_iters >= 0 && k >= cfg.max_iters) {
      result.stop_reason = "max-iters";
      break;
    }
    IterationRecord rec;
    rec.k = k;
    rec.leaves = static_cast<std::int64_t>(tri_.size());
    rec.persons = static_cast<std::int64_t>(tri_.population.size());

    auto t0 = std::chrono::steady_clock::now();
    FemState state = fem_.solve(tri_, field_, cfg.cg_tol, cfg.threads);
    rec.dofs = state.n_dofs;
    rec.solve_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const EdgeSet es = ops_.edges(tri_);
    const IndicatorField ind = est_.indicators(tri_, es, state, field_, cfg.threads);
    rec.J = fem_.dirichlet_energy(state);
    rec.H = fem_.h_term(tri_, field_);
    rec.G = rec.J + rec.H;
    rec.osc2 = fem_.oscillation(tri_, field_);
    rec.est2 = ind.total;
    if (field_.exact_grad) rec.h1err = std::sqrt(fem_.h1_error_sq_exact(tri_, state, field_));
    rec.estimate_s = seconds_since(t0);

    if (!(rec.G <= g_prev + 1e-12 * (1.0 + std::abs(rec.G))))
      throw Error(Error::Kind::verification, "total energy increased along the adaptive loop");
    if (persons_prev >= 0 && rec.persons <= persons_prev)
      throw Error(Error::Kind::verification, "population did not grow along the adaptive loop");
    g_prev = rec.G;
    persons_prev = rec.persons;

    bool stop = false;
    if (cfg.est_tol >= 0.0 && rec.est2 <= cfg.est_tol) {
      result.stop_reason = "est-tol";
      stop = true;
    }
    if (cfg.max_dofs > 0 && rec.dofs >= cfg.max_dofs) {
      result.stop_reason = "max-dofs";
      stop = true;
    }

    if (!stop) {
      t0 = std::chrono::steady_clock::now();
      const MarkOutcome out =
          marking_.mark(cfg.marker, es, ind, cfg.mu, collect_mark_traces);
      rec.mark_s = seconds_since(t0);
      rec.max_indicator = out.max_indicator;
      if (out.converged) {
        result.converged = true;
        result.stop_reason = "converged";
        stop = true;
        if (on_iteration) on_iteration(rec, tri_, es, ind, nullptr);
      } else {
        if (check_guarantees && cfg.marker != Marker::min_single)
          marking_.guarantee_check(es, ind, out, cfg.mu, cfg.marker);
        rec.marked = static_cast<std::int64_t>(out.marked.size());
        rec.closure = static_cast<std::int64_t>(out.closure.size());
        if (on_iteration) on_iteration(rec, tri_, es, ind, &out);
        t0 = std::chrono::steady_clock::now();
        Population next =
            set_union(tri_.population, Population::from_sorted(out.closure));
        tri_ = ops_.to_triangulation(next);
        rec.refine_s = seconds_since(t0);
      }
    } else if (on_iteration) {
      on_iteration(rec, tri_, es, ind, nullptr);
    }

    result.records.push_back(rec);
    if (on_record) on_record(rec);
    if (stop) break;
  }
  return result;
}

ComplexityAudit complexity_audit(const std::vector<IterationRecord>& records) {
  ComplexityAudit audit;
  if (records.empty()) return audit;
  const std::int64_t leaves0 = records.front().leaves;
  std::int64_t marked_sum = 0;
  for (std::size_t k = 1; k < records.size(); ++k) {
    marked_sum += records[k - 1].marked;
    if (marked_sum == 0) continue;
    const double ratio = static_cast<double>(records[k].leaves - leaves0) /
                         static_cast<double>(marked_sum);
    audit.ratios.push_back(ratio);
    audit.running_max = std::max(audit.running_max, ratio);
  }
  return audit;
}

std::string records_to_csv(const std::vector<IterationRecord>& records) {
  std::ostringstream os;
  os << "k,leaves,persons,marked,closure,J,H,G,osc2,est2,h1err,solve_s,estimate_s,mark_s,refine_s\n";
  for (const auto& r : records) {
    os << r.k << "," << r.leaves << "," << r.persons << "," << r.marked << "," << r.closure << ","
       << fmt(r.J) << "," << fmt(r.H) << "," << fmt(r.G) << "," << fmt(r.osc2) << ","
       << fmt(r.est2) << "," << fmt(r.h1err) << "," << fmt(r.solve_s) << "," << fmt(r.estimate_s)
       << "," << fmt(r.mark_s) << "," << fmt(r.refine_s) << "\n";
  }
  return os.str();
}

std::string records_to_json(const std::vector<IterationRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json row;
    row["k"] = r.k;
    row["leaves"] = r.leaves;
    row["persons"] = r.persons;
    row["marked"] = r.marked;
    row["closure"] = r.closure;
    row["J"] = r.J;
    row["H"] = r.H;
    row["G"] = r.G;
    row["osc2"] = r.osc2;
    row["est2"] = r.est2;
    if (std::isnan(r.h1err))
      row["h1err"] = nullptr;
    else
      row["h1err"] = r.h1err;
    row["solve_s"] = r.solve_s;
    row["estimate_s"] = r.estimate_s;
    row["mark_s"] = r.mark_s;
    row["refine_s"] = r.refine_s;
    arr.push_back(row);
  }
  return arr.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace afem
