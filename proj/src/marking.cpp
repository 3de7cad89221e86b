#include "afem/marking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace afem {

Marker marker_from_string(const std::string& s) {
  if (s == "reference") return Marker::reference;
  if (s == "linear") return Marker::linear;
  if (s == "min-single") return Marker::min_single;
  throw Error(Error::Kind::usage, "unknown marker '" + s + "' (reference|linear)");
}

std::string to_string(Marker m) {
  switch (m) {
    case Marker::reference: return "reference";
    case Marker::linear: return "linear";
    case Marker::min_single: return "min-single";
  }
  return "?";
}

std::vector<std::int32_t> Marking::canonical_order(const EdgeSet& es) const {
  std::vector<std::int32_t> order(static_cast<std::size_t>(es.size()));
  for (std::int32_t i = 0; i < es.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](std::int32_t x, std::int32_t y) {
    return gen_->canonical_less(es.edges[static_cast<std::size_t>(x)].mid,
                                es.edges[static_cast<std::size_t>(y)].mid);
  });
  return order;
}

std::vector<double> Marking::closure_sums(const EdgeSet& es, const IndicatorField& ind) const {
  const std::size_t n = static_cast<std::size_t>(es.size());
  std::vector<double> sums(n, -1.0);
  // ascending generation: candidate parents come first
  std::vector<std::int32_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::int32_t>(i);
  std::stable_sort(order.begin(), order.end(), [&](std::int32_t x, std::int32_t y) {
    return es.edges[static_cast<std::size_t>(x)].mid_gen <
           es.edges[static_cast<std::size_t>(y)].mid_gen;
  });
  std::vector<std::uint32_t> stamp(n, 0);
  std::uint32_t epoch = 0;
  std::vector<std::int32_t> stack;
  for (std::int32_t e : order) {
    const auto& par = es.cand_parents[static_cast<std::size_t>(e)];
    const int np = (par[0] >= 0) + (par[1] >= 0);
    if (np == 0) {
      sums[static_cast<std::size_t>(e)] = ind.e2[static_cast<std::size_t>(e)];
    } else if (np == 1) {
      const std::int32_t p = par[0] >= 0 ? par[0] : par[1];
      sums[static_cast<std::size_t>(e)] =
          ind.e2[static_cast<std::size_t>(e)] + sums[static_cast<std::size_t>(p)];
    } else {
      // two candidate parents: the closures above may overlap, walk with
      // de-duplication
      ++epoch;
      double acc = ind.e2[static_cast<std::size_t>(e)];
      stack.clear();
      stamp[static_cast<std::size_t>(e)] = epoch;
      for (std::int32_t p : par) stack.push_back(p);
      while (!stack.empty()) {
        const std::int32_t c = stack.back();
        stack.pop_back();
        if (stamp[static_cast<std::size_t>(c)] == epoch) continue;
        stamp[static_cast<std::size_t>(c)] = epoch;
        acc += ind.e2[static_cast<std::size_t>(c)];
        for (std::int32_t p : es.cand_parents[static_cast<std::size_t>(c)])
          if (p >= 0 && stamp[static_cast<std::size_t>(p)] != epoch) stack.push_back(p);
      }
      sums[static_cast<std::size_t>(e)] = acc;
    }
  }
  return sums;
}

MarkOutcome Marking::mark_reference(const EdgeSet& es, const IndicatorField& ind, double mu,
                                    const std::vector<std::int32_t>* order_override,
                                    bool collect_trace) const {
  MarkOutcome out;
  const std::size_t n = static_cast<std::size_t>(es.size());
  const std::vector<double> sums = closure_sums(es, ind);
  double emax = 0.0;
  for (double s : sums) emax = std::max(emax, s);
  out.max_indicator = emax;
  if (emax == 0.0) {
    out.converged = true;
    return out;
  }

  const std::vector<std::int32_t> order =
      order_override ? *order_override : canonical_order(es);
  std::vector<char> removed(n, 0), in_closure(n, 0);
  std::vector<std::uint32_t> stamp(n, 0);
  std::uint32_t epoch = 0;
  std::vector<std::int32_t> members, stack;
  for (std::int32_t e : order) {
    if (removed[static_cast<std::size_t>(e)]) continue;
    // conforming closure of the selected candidate, indicators already
    // claimed by tildeM excluded from the accumulation
    ++epoch;
    members.clear();
    stack.assign(1, e);
    double acc = 0.0;
    while (!stack.empty()) {
      const std::int32_t c = stack.back();
      stack.pop_back();
      if (stamp[static_cast<std::size_t>(c)] == epoch) continue;
      stamp[static_cast<std::size_t>(c)] = epoch;
      members.push_back(c);
      if (!in_closure[static_cast<std::size_t>(c)]) acc += ind.e2[static_cast<std::size_t>(c)];
      for (std::int32_t p : es.cand_parents[static_cast<std::size_t>(c)])
        if (p >= 0 && stamp[static_cast<std::size_t>(p)] != epoch) stack.push_back(p);
    }
    const bool mark_it = acc >= mu * emax;
    if (collect_trace)
      out.trace.push_back({es.edges[static_cast<std::size_t>(e)].mid, acc, mark_it});
    if (mark_it) {
      out.marked_edges.push_back(e);
      for (std::int32_t c : members) in_closure[static_cast<std::size_t>(c)] = 1;
    }
    for (std::int32_t c : members) removed[static_cast<std::size_t>(c)] = 1;
  }
  for (std::int32_t e : out.marked_edges)
    out.marked.push_back(es.edges[static_cast<std::size_t>(e)].mid);
  std::sort(out.marked.begin(), out.marked.end());
  for (std::size_t i = 0; i < n; ++i)
    if (in_closure[i]) out.closure.push_back(es.edges[i].mid);
  std::sort(out.closure.begin(), out.closure.end());
  return out;
}

MarkOutcome Marking::mark_linear(const EdgeSet& es, const IndicatorField& ind, double mu,
                                 bool collect_trace) const {
  MarkOutcome out;
  const std::size_t n = static_cast<std::size_t>(es.size());

  std::vector<std::int32_t> roots;
  for (std::int32_t e = 0; e < es.size(); ++e) {
    const auto& par = es.cand_parents[static_cast<std::size_t>(e)];
    if (par[0] < 0 && par[1] < 0) roots.push_back(e);
  }
  std::sort(roots.begin(), roots.end(), [&](std::int32_t x, std::int32_t y) {
    return gen_->canonical_less(es.edges[static_cast<std::size_t>(x)].mid,
                                es.edges[static_cast<std::size_t>(y)].mid);
  });

  // pass 1: max-ind, the accumulated maximum along the in-forest
  double emax_mod = 0.0;
  {
    auto max_ind = [&](auto&& self, std::int32_t e, double value_parent) -> void {
      const double v = ind.e2[static_cast<std::size_t>(e)] + value_parent;
      emax_mod = std::max(emax_mod, v);
      for (std::int32_t c : es.children_of(e)) self(self, c, v);
    };
    for (std::int32_t r : roots) max_ind(max_ind, r, 0.0);
  }
  out.max_indicator = emax_mod;
  if (emax_mod == 0.0) {
    out.converged = true;
    return out;
  }

  // pass 2: accum-est, resetting the accumulation at marks and propagating
  // marks into the closure set
  std::vector<char> marked(n, 0), in_closure(n, 0);
  const double threshold = mu * emax_mod;
  auto accum = [&](auto&& self, std::int32_t e, double value_parent) -> bool {
    double ep = ind.e2[static_cast<std::size_t>(e)] + value_parent;
    bool is_marked = false;
    if (collect_trace)
      out.trace.push_back({es.edges[static_cast<std::size_t>(e)].mid, ep, ep >= threshold});
    if (ep >= threshold) {
      marked[static_cast<std::size_t>(e)] = 1;
      in_closure[static_cast<std::size_t>(e)] = 1;
      ep = 0.0;
      is_marked = true;
    }
    for (std::int32_t c : es.children_of(e)) {
      if (self(self, c, ep)) {
        in_closure[static_cast<std::size_t>(e)] = 1;
        ep = 0.0;
        is_marked = true;
      }
    }
    return is_marked;
  };
  for (std::int32_t r : roots) accum(accum, r, 0.0);

  // pass 3: a candidate marked through one branch forces both of its
  // candidate parents into the closure set (P cup tildeM must stay a
  // population); plain upward propagation, each edge visited once
  std::vector<std::int32_t> stack;
  for (std::size_t e = 0; e < n; ++e)
    if (in_closure[e]) stack.push_back(static_cast<std::int32_t>(e));
  while (!stack.empty()) {
    const std::int32_t e = stack.back();
    stack.pop_back();
    for (std::int32_t p : es.cand_parents[static_cast<std::size_t>(e)]) {
      if (p >= 0 && !in_closure[static_cast<std::size_t>(p)]) {
        in_closure[static_cast<std::size_t>(p)] = 1;
        stack.push_back(p);
      }
    }
  }

  for (std::size_t e = 0; e < n; ++e) {
    if (marked[e]) {
      out.marked_edges.push_back(static_cast<std::int32_t>(e));
      out.marked.push_back(es.edges[e].mid);
    }
    if (in_closure[e]) out.closure.push_back(es.edges[e].mid);
  }
  std::sort(out.marked.begin(), out.marked.end());
  std::sort(out.closure.begin(), out.closure.end());
  return out;
}

MarkOutcome Marking::mark_min_single(const EdgeSet& es, const IndicatorField& ind) const {
  MarkOutcome out;
  const std::vector<double> sums = closure_sums(es, ind);
  double emax = 0.0;
  for (double s : sums) emax = std::max(emax, s);
  out.max_indicator = emax;
  if (emax == 0.0) {
    out.converged = true;
    return out;
  }
  const std::vector<std::int32_t> order = canonical_order(es);
  std::int32_t best = -1;
  for (std::int32_t e : order) {
    if (sums[static_cast<std::size_t>(e)] <= 0.0) continue;
    if (best < 0 || sums[static_cast<std::size_t>(e)] < sums[static_cast<std::size_t>(best)])
      best = e;
  }
  out.marked_edges.push_back(best);
  out.marked.push_back(es.edges[static_cast<std::size_t>(best)].mid);
  std::vector<char> seen(static_cast<std::size_t>(es.size()), 0);
  std::vector<std::int32_t> stack{best};
  while (!stack.empty()) {
    const std::int32_t e = stack.back();
    stack.pop_back();
    if (seen[static_cast<std::size_t>(e)]) continue;
    seen[static_cast<std::size_t>(e)] = 1;
    out.closure.push_back(es.edges[static_cast<std::size_t>(e)].mid);
    for (std::int32_t p : es.cand_parents[static_cast<std::size_t>(e)])
      if (p >= 0) stack.push_back(p);
  }
  std::sort(out.closure.begin(), out.closure.end());
  return out;
}

MarkOutcome Marking::mark(Marker m, const EdgeSet& es, const IndicatorField& ind, double mu,
                          bool collect_trace) const {
  switch (m) {
    case Marker::reference: return mark_reference(es, ind, mu, nullptr, collect_trace);
    case Marker::linear: return mark_linear(es, ind, mu, collect_trace);
    case Marker::min_single: return mark_min_single(es, ind);
  }
  throw Error(Error::Kind::usage, "bad marker");
}

std::string mark_trace_to_csv(const Forest& forest, const MarkOutcome& out) {
  std::ostringstream os;
  os << "x,y,accumulated,marked\n";
  char buf[40];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const MarkVisit& v : out.trace) {
    os << num(forest.point(v.person).xd()) << "," << num(forest.point(v.person).yd()) << ","
       << num(v.value) << "," << (v.marked ? 1 : 0) << "\n";
  }
  return os.str();
}

double Marking::guarantee_check(const EdgeSet& es, const IndicatorField& ind,
                                const MarkOutcome& out, double mu, Marker which) const {
  if (out.converged) return 0.0;
  const std::vector<double> sums = closure_sums(es, ind);
  double emax = 0.0;
  for (double s : sums) emax = std::max(emax, s);
  if (out.marked.empty()) {
    if (emax > 0.0)
      throw GuaranteeViolated("empty marked set despite positive indicators");
    return 0.0;
  }
  double achieved = 0.0;
  for (VertexId p : out.closure) {
    const std::int32_t e = es.find_by_mid(p);
    if (e < 0) throw GuaranteeViolated("closure person outside the candidate set");
    achieved += ind.e2[static_cast<std::size_t>(e)];
  }
  const double factor = which == Marker::linear ? 0.5 : 1.0;
  const double required = factor * mu * static_cast<double>(out.marked.size()) * emax;
  // small slack for floating point accumulation only
  if (achieved < required * (1.0 - 1e-12) - 1e-300)
    throw GuaranteeViolated("marked-set lower bound failed: achieved " +
                            std::to_string(achieved) + " < required " + std::to_string(required));
  return required > 0.0 ? achieved / required : 0.0;
}

}  // namespace afem
