#include "afem/population.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace afem {

Genealogy::Genealogy(const Forest& forest) : forest_(&forest) {
  recs_.resize(forest.num_vertices());
  for (TriId r : forest.roots()) {
    for (VertexId v : forest.tri(r).v) {
      if (recs_[idx(v)].gen < 0) {
        recs_[idx(v)].gen = 0;
        recs_[idx(v)].boundary = forest.on_boundary(v);
      }
    }
  }
}

void Genealogy::register_person(VertexId p, std::int32_t gen, std::span<const VertexId> parents,
                                bool boundary) {
  if (static_cast<std::size_t>(p) >= recs_.size()) recs_.resize(forest_->num_vertices());
  Rec& r = recs_[idx(p)];
  if (r.gen >= 0) {
    // already known; the family tree is unique, so re-registration must agree
    if (r.gen != gen || r.n_parents != parents.size())
      throw Error(Error::Kind::verification,
                  "genealogy inconsistency for person " + std::to_string(p));
    for (std::size_t i = 0; i < parents.size(); ++i)
      if (r.parents[i] != parents[i])
        throw Error(Error::Kind::verification,
                    "genealogy parent mismatch for person " + std::to_string(p));
    return;
  }
  r.gen = gen;
  r.boundary = boundary;
  r.n_parents = static_cast<std::uint8_t>(parents.size());
  for (std::size_t i = 0; i < parents.size(); ++i) {
    r.parents[i] = parents[i];
    Rec& pr = recs_[idx(parents[i])];
    if (pr.gen < 0)
      throw Error(Error::Kind::verification,
                  "person registered before its parent: " + std::to_string(p));
    if (pr.n_children >= 4)
      throw Error(Error::Kind::verification,
                  "person has more than four children: " + std::to_string(parents[i]));
    pr.children[pr.n_children++] = p;
  }
}

std::vector<VertexId> Genealogy::anc(std::span<const VertexId> us) const {
  std::vector<VertexId> out;
  std::unordered_set<VertexId> seen;
  std::vector<VertexId> stack(us.begin(), us.end());
  while (!stack.empty()) {
    const VertexId q = stack.back();
    stack.pop_back();
    for (VertexId par : parents(q)) {
      if (seen.insert(par).second) {
        out.push_back(par);
        stack.push_back(par);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VertexId> Genealogy::anc_one(VertexId p) const {
  const VertexId one[1] = {p};
  return anc(std::span<const VertexId>(one, 1));
}

std::vector<VertexId> Genealogy::free_of(std::span<const VertexId> us) const {
  const std::vector<VertexId> a = anc(us);
  std::vector<VertexId> sorted(us.begin(), us.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<VertexId> out;
  std::set_difference(sorted.begin(), sorted.end(), a.begin(), a.end(), std::back_inserter(out));
  return out;
}

std::vector<VertexId> Genealogy::desc_within(std::span<const VertexId> cs,
                                             std::span<const VertexId> within) const {
  // memoized "has an ancestor in cs" over full parent chains
  std::unordered_map<VertexId, bool> memo;
  std::unordered_set<VertexId> cset(cs.begin(), cs.end());
  auto tainted = [&](auto&& self, VertexId q) -> bool {
    if (auto it = memo.find(q); it != memo.end()) return it->second;
    bool t = false;
    for (VertexId par : parents(q)) {
      if (cset.count(par) || self(self, par)) {
        t = true;
        break;
      }
    }
    memo.emplace(q, t);
    return t;
  };
  std::vector<VertexId> out;
  for (VertexId q : within)
    if (tainted(tainted, q)) out.push_back(q);
  return out;
}

bool Genealogy::canonical_less(VertexId a, VertexId b) const {
  if (gen(a) != gen(b)) return gen(a) < gen(b);
  return forest_->point(a) < forest_->point(b);
}

Population Population::from_sorted(std::vector<VertexId> ids) {
  Population p;
  p.ids_ = std::move(ids);
  return p;
}

Population Population::from_unsorted(std::vector<VertexId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return from_sorted(std::move(ids));
}

bool Population::contains(VertexId p) const {
  return std::binary_search(ids_.begin(), ids_.end(), p);
}

bool Population::subset_of(const Population& o) const {
  return std::includes(o.ids_.begin(), o.ids_.end(), ids_.begin(), ids_.end());
}

Population set_union(const Population& a, const Population& b) {
  std::vector<VertexId> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.ids_.begin(), a.ids_.end(), b.ids_.begin(), b.ids_.end(),
                 std::back_inserter(out));
  return Population::from_sorted(std::move(out));
}

Population set_intersection(const Population& a, const Population& b) {
  std::vector<VertexId> out;
  std::set_intersection(a.ids_.begin(), a.ids_.end(), b.ids_.begin(), b.ids_.end(),
                        std::back_inserter(out));
  return Population::from_sorted(std::move(out));
}

Population PopulationOps::bottom() const {
  std::vector<VertexId> ids;
  for (TriId r : forest_->roots())
    for (VertexId v : forest_->tri(r).v) ids.push_back(v);
  return Population::from_unsorted(std::move(ids));
}

bool PopulationOps::is_population(const Population& p) const {
  if (!bottom().subset_of(p)) return false;
  for (VertexId q : p.ids()) {
    if (!gen_->known(q)) return false;
    for (VertexId par : gen_->parents(q))
      if (!p.contains(par)) return false;
  }
  return true;
}

void PopulationOps::require_population(const Population& p, const char* what) const {
  if (!is_population(p)) throw NotAPopulation(what);
}

Population PopulationOps::oplus(const Population& p, std::span<const VertexId> c) const {
  std::vector<VertexId> add = gen_->anc(c);
  add.insert(add.end(), c.begin(), c.end());
  std::sort(add.begin(), add.end());
  add.erase(std::unique(add.begin(), add.end()), add.end());
  Population res = set_union(p, Population::from_sorted(std::move(add)));
  require_population(res, "oplus produced a non-population");
  return res;
}

Population PopulationOps::ominus(const Population& p, std::span<const VertexId> c) const {
  for (VertexId q : c)
    if (gen_->gen(q) == 0)
      throw Error(Error::Kind::usage, "ominus: cannot remove a bottom person");
  std::vector<VertexId> csorted(c.begin(), c.end());
  std::sort(csorted.begin(), csorted.end());
  const std::vector<VertexId> dead = gen_->desc_within(csorted, p.ids());
  std::vector<VertexId> removed;
  std::set_union(csorted.begin(), csorted.end(), dead.begin(), dead.end(),
                 std::back_inserter(removed));
  std::vector<VertexId> out;
  std::set_difference(p.ids().begin(), p.ids().end(), removed.begin(), removed.end(),
                      std::back_inserter(out));
  Population res = Population::from_sorted(std::move(out));
  require_population(res, "ominus produced a non-population");
  return res;
}

Population PopulationOps::meet(const Population& a, const Population& b) const {
  Population res = set_intersection(a, b);
  require_population(res, "meet produced a non-population");
  return res;
}

Population PopulationOps::join(const Population& a, const Population& b) const {
  Population res = set_union(a, b);
  require_population(res, "join produced a non-population");
  return res;
}

std::vector<TriId> PopulationOps::patch(VertexId p) const {
  return forest_->level_tris_at_vertex(p, gen_->gen(p));
}

std::vector<TriId> PopulationOps::patch_of_set(std::span<const VertexId> us) const {
  std::vector<TriId> out;
  for (VertexId p : us) {
    auto t = patch(p);
    out.insert(out.end(), t.begin(), t.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool PopulationOps::is_lower_diamond(const Diamond& d) const {
  if (d.flanks.empty()) return false;
  Population m = d.flanks[0];
  Population j = d.flanks[0];
  for (std::size_t i = 1; i < d.flanks.size(); ++i) {
    m = set_intersection(m, d.flanks[i]);
    j = set_union(j, d.flanks[i]);
  }
  if (!(m == d.bottom) || !(j == d.top)) return false;
  for (const Population& f : d.flanks)
    if (!is_population(f)) return false;
  // difference sets top \ flank_j mutually disjoint
  std::unordered_set<VertexId> seen;
  for (const Population& f : d.flanks) {
    std::vector<VertexId> diff;
    std::set_difference(d.top.ids().begin(), d.top.ids().end(), f.ids().begin(), f.ids().end(),
                        std::back_inserter(diff));
    for (VertexId q : diff)
      if (!seen.insert(q).second) return false;
  }
  return true;
}

std::int64_t PopulationOps::genetic_diversity(std::int32_t k_max) const {
  std::int64_t best = 0;
  for (VertexId p = 0; p < static_cast<VertexId>(forest_->num_vertices()); ++p) {
    if (!gen_->known(p) || gen_->gen(p) > k_max) continue;
    const auto a = gen_->anc_one(p);
    std::unordered_map<std::int32_t, std::int64_t> per_gen;
    for (VertexId q : a) best = std::max(best, ++per_gen[gen_->gen(q)]);
  }
  return best;
}

std::optional<std::vector<VertexId>> PopulationOps::partner_chain(VertexId p, VertexId a,
                                                                  VertexId b) const {
  if (a == b) return std::vector<VertexId>{a};
  const std::vector<VertexId> ancestors = gen_->anc_one(p);
  std::unordered_set<VertexId> scope(ancestors.begin(), ancestors.end());
  scope.insert(p);
  if (!scope.count(a) || !scope.count(b))
    throw Error(Error::Kind::usage, "partner_chain: endpoints must be ancestors of p");
  if (gen_->gen(a) != gen_->gen(b) || gen_->gen(a) < 1)
    throw Error(Error::Kind::usage, "partner_chain: endpoints need equal generation >= 1");

  const std::int32_t level = gen_->gen(a);
  std::unordered_map<VertexId, VertexId> pred;
  std::deque<VertexId> queue{a};
  pred[a] = a;
  while (!queue.empty()) {
    const VertexId cur = queue.front();
    queue.pop_front();
    if (cur == b) break;
    for (VertexId child : gen_->children(cur)) {
      if (!scope.count(child)) continue;
      for (VertexId partner : gen_->parents(child)) {
        if (partner == cur || gen_->gen(partner) != level) continue;
        if (!scope.count(partner) || partner == p) continue;
        if (pred.emplace(partner, cur).second) queue.push_back(partner);
      }
    }
  }
  if (!pred.count(b)) return std::nullopt;
  std::vector<VertexId> chain{b};
  while (chain.back() != a) chain.push_back(pred[chain.back()]);
  std::reverse(chain.begin(), chain.end());
  return chain;
}

std::string population_snapshot(const Forest& f, const Genealogy& g, const Population& p) {
  std::ostringstream os;
  os << p.size() << "\n";
  for (VertexId q : p.ids()) {
    const Point& pt = f.point(q);
    os << q << " " << pt.x.num << " " << pt.x.exp << " " << pt.y.num << " " << pt.y.exp << " "
       << g.gen(q) << "\n";
  }
  return os.str();
}

Population population_from_snapshot(const Forest& f, const Genealogy& g, const std::string& text) {
  std::istringstream in(text);
  std::size_t np = 0;
  if (!(in >> np)) throw ParseError("snapshot: missing person count");
  std::vector<VertexId> ids;
  ids.reserve(np);
  for (std::size_t i = 0; i < np; ++i) {
    std::int64_t id, xn, yn;
    std::int32_t xe, ye, gen;
    if (!(in >> id >> xn >> xe >> yn >> ye >> gen)) throw ParseError("snapshot: bad person line");
    const VertexId v = f.find_vertex(Point{Dyadic(xn, xe), Dyadic(yn, ye)});
    if (v == kNone || !g.known(v) || g.gen(v) != gen)
      throw NotAPopulation("snapshot person unknown to this forest");
    ids.push_back(v);
  }
  return Population::from_unsorted(std::move(ids));
}

}  // namespace afem
