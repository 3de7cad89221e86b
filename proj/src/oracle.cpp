#include "afem/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace afem {

std::vector<VertexId> OracleLab::extensions(const Population& p) const {
  // persons addable in one step: edge midpoints whose parents are members
  const Triangulation t = ops_.to_triangulation(p);
  const EdgeSet es = ops_.edges(t);
  std::vector<VertexId> out;
  for (const Edge& e : es.edges) {
    bool ok = true;
    for (VertexId par : gen_->parents(e.mid))
      if (!p.contains(par)) ok = false;
    if (ok) out.push_back(e.mid);
  }
  std::sort(out.begin(), out.end());
  return out;
}

EnumerationIndex OracleLab::enumerate_populations(std::int32_t m_max, std::int64_t budget) const {
  EnumerationIndex index;
  index.by_size.resize(static_cast<std::size_t>(m_max) + 1);
  index.by_size[0].push_back(ops_.pops().bottom());
  index.total = 1;
  std::set<std::vector<VertexId>> seen;
  seen.insert(index.by_size[0][0].vec());
  for (std::int32_t m = 0; m < m_max; ++m) {
    for (const Population& p : index.by_size[static_cast<std::size_t>(m)]) {
      for (VertexId q : extensions(p)) {
        std::vector<VertexId> ids = p.vec();
        ids.insert(std::lower_bound(ids.begin(), ids.end(), q), q);
        if (seen.insert(ids).second) {
          index.by_size[static_cast<std::size_t>(m) + 1].push_back(
              Population::from_sorted(std::move(ids)));
          if (++index.total > budget)
            throw BudgetExceeded("population enumeration beyond " + std::to_string(budget));
        }
      }
    }
    // A frontier that explodes by a factor beyond the remaining budget has
    // no chance to finish; give up before allocating it all.
    const auto next = static_cast<std::int64_t>(index.by_size[static_cast<std::size_t>(m) + 1].size());
    if (next > 0 && index.total + next * (m_max - m) > budget)
      throw BudgetExceeded("projected population count beyond " + std::to_string(budget));
  }
  return index;
}

std::int64_t OracleLab::count_populations_backtracking(std::int32_t m) const {
  // canonical ascending insertion: every population is built along exactly
  // one order, so plain backtracking counts each population once
  // Insertion in ascending (gen, x, y) order: parents precede children, so
  // every population admits exactly one admissible build sequence and plain
  // backtracking counts each set once.
  std::int64_t count = 0;
  auto rec = [&](auto&& self, const Population& p, VertexId prev, std::int32_t left) -> void {
    ++count;
    if (left == 0) return;
    for (VertexId q : extensions(p)) {
      if (prev != kNone && !gen_->canonical_less(prev, q)) continue;
      std::vector<VertexId> ids = p.vec();
      ids.insert(std::lower_bound(ids.begin(), ids.end(), q), q);
      self(self, Population::from_sorted(std::move(ids)), q, left - 1);
    }
  };
  rec(rec, ops_.pops().bottom(), kNone, m);
  return count;
}

std::vector<OptimalRecord> OracleLab::g_opt_table(const EnumerationIndex& index,
                                                  const SourceField& f, double cg_tol) const {
  std::vector<OptimalRecord> table;
  std::unordered_map<std::uint64_t, double> cache;
  double best_so_far = std::numeric_limits<double>::infinity();
  Population best_pop;
  for (std::size_t m = 0; m < index.by_size.size(); ++m) {
    OptimalRecord rec;
    rec.m = static_cast<std::int64_t>(m);
    rec.count = static_cast<std::int64_t>(index.by_size[m].size());
    for (const Population& p : index.by_size[m]) {
      const std::uint64_t d = digest(p);
      auto it = cache.find(d);
      double g;
      if (it != cache.end()) {
        g = it->second;
      } else {
        const Triangulation t = ops_.to_triangulation(p);
        g = fem_.total_energy(t, f, cg_tol).G;
        cache.emplace(d, g);
      }
      if (g < best_so_far ||
          (g == best_so_far && best_pop.size() > 0 && p.vec() < best_pop.vec())) {
        best_so_far = g;
        best_pop = p;
      }
    }
    rec.gopt = best_so_far;  // G_opt is a min over all classes up to m
    rec.popt = best_pop;
    rec.digest = digest(best_pop);
    table.push_back(rec);
  }
  return table;
}

std::int64_t OracleLab::observed_energy_optimality_constant(
    const std::vector<std::pair<std::int64_t, double>>& trace_added_g,
    const std::vector<OptimalRecord>& gopt) const {
  std::int64_t c = 1;
  for (std::size_t m = 1; m < gopt.size(); ++m) {
    for (const auto& [added, g] : trace_added_g) {
      const double tol = 1e-12 * (1.0 + std::abs(gopt[m].gopt));
      if (g > gopt[m].gopt + tol) {
        // implication violated unless added < C m; force C > added / m
        const std::int64_t need = added / static_cast<std::int64_t>(m) + 1;
        c = std::max(c, need);
      }
    }
  }
  return c;
}

std::uint64_t OracleLab::digest(const Population& p) const {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a over exact coordinates
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  for (VertexId q : p.ids()) {
    const Point& pt = forest_->point(q);
    mix(static_cast<std::uint64_t>(pt.x.num));
    mix(static_cast<std::uint64_t>(pt.x.exp));
    mix(static_cast<std::uint64_t>(pt.y.num));
    mix(static_cast<std::uint64_t>(pt.y.exp));
  }
  return h;
}

Diamond OracleLab::random_lower_diamond(const Population& top, int m,
                                        std::mt19937_64& rng) const {
  if (m < 1) throw Error(Error::Kind::usage, "diamond size must be >= 1");
  std::vector<VertexId> removable;
  for (VertexId q : top.ids())
    if (gen_->gen(q) > 0) removable.push_back(q);
  if (static_cast<int>(removable.size()) < m)
    throw CannotPlace("population too small for the requested diamond size");
  // shuffle deterministically
  for (std::size_t i = removable.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(removable[i - 1], removable[j]);
  }

  std::vector<std::vector<VertexId>> closures;
  std::set<VertexId> used;
  for (VertexId seed : removable) {
    if (static_cast<int>(closures.size()) == m) break;
    const VertexId one[1] = {seed};
    std::vector<VertexId> r = gen_->desc_within({one, 1}, top.ids());
    r.insert(std::lower_bound(r.begin(), r.end(), seed), seed);
    bool clash = false;
    for (VertexId q : r)
      if (used.count(q)) clash = true;
    if (clash) continue;
    for (VertexId q : r) used.insert(q);
    closures.push_back(std::move(r));
  }
  if (static_cast<int>(closures.size()) < m)
    throw CannotPlace("could not find " + std::to_string(m) + " disjoint descendant closures");

  Diamond d;
  d.top = top;
  for (const auto& r : closures) {
    std::vector<VertexId> ids;
    std::set_difference(top.ids().begin(), top.ids().end(), r.begin(), r.end(),
                        std::back_inserter(ids));
    Population flank = Population::from_sorted(std::move(ids));
    ops_.pops().require_population(flank, "diamond flank is not a population");
    d.flanks.push_back(std::move(flank));
  }
  Population bottom = d.flanks[0];
  for (std::size_t i = 1; i < d.flanks.size(); ++i)
    bottom = set_intersection(bottom, d.flanks[i]);
  d.bottom = bottom;
  if (m >= 2 && !ops_.pops().is_lower_diamond(d))
    throw Error(Error::Kind::verification, "constructed diamond failed its own check");
  return d;
}

}  // namespace afem
