#include "topology.hpp"

#include <json.hpp>

namespace qho {

namespace {

PolySystem closed_system(const BasicClosedSet& c) {
  PolySystem sys;
  sys.ring = c.gcf.r.ring;
  sys.polys = c.gcf.r.cells.empty() ? std::vector<Poly>{} : c.gcf.r.cells[0].eqs;
  if (c.gcf.r.cells.empty()) {
    // the empty set: represent as (1)
    sys.polys = {poly_const(*sys.ring, sys.ring->tower->one())};
  }
  return sys;
}

bool gcf_same_shape(const GeneralCoreFormula& a, const GeneralCoreFormula& b) {
  return a.part.class_sizes == b.part.class_sizes &&
         a.part.param_sizes == b.part.param_sizes && a.sigma == b.sigma &&
         a.delta1 == b.delta1 && a.delta2 == b.delta2 && a.num_a == b.num_a;
}

// Fuse class cj into ci (1-based, ci < cj): the refinement step of
// canonicalize. Chain-pair collisions with distinct multiplicities make
// the set empty.
GeneralCoreFormula fuse_classes(const GeneralCoreFormula& g, unsigned ci, unsigned cj) {
  unsigned s = g.part.s();
  auto cmap = [&](unsigned x) { return x == cj ? ci : (x > cj ? x - 1 : x); };

  GeneralCoreFormula out = g;
  out.part.class_sizes.clear();
  for (unsigned i = 1; i <= s; ++i) {
    if (i == cj) continue;
    unsigned sz = g.part.class_sizes[i - 1];
    if (i == ci) sz += g.part.class_sizes[cj - 1];
    out.part.class_sizes.push_back(sz);
  }

  bool conflict = false;
  auto remap = [&](const ChainMap& src, bool map_i, bool map_j) {
    ChainMap dst;
    for (const auto& [ij, n] : src) {
      unsigned i = map_i ? cmap(ij.first) : ij.first;
      unsigned j = map_j ? cmap(ij.second) : ij.second;
      auto [it, inserted] = dst.try_emplace(IndexPair{i, j}, n);
      if (!inserted && it->second != n) conflict = true;
    }
    return dst;
  };
  out.sigma = remap(g.sigma, true, true);
  out.delta1 = remap(g.delta1, true, false);
  out.delta2 = remap(g.delta2, false, true);

  if (conflict) {
    out.r = pred_false(gcf_ring(out, g.r.ring->tower));
    return out;
  }

  // rename variables; lambdas of the fused class are appended after ci's
  std::map<std::string, std::string> rn;
  auto pn = [](const char* fam, unsigned i, unsigned j) {
    return std::string(fam) + "_" + std::to_string(i) + "_" + std::to_string(j);
  };
  for (unsigned i = 1; i <= s; ++i) {
    if (i == cj)
      rn["alpha_" + std::to_string(i)] = "alpha_" + std::to_string(ci);
    else if (i > cj)
      rn["alpha_" + std::to_string(i)] = "alpha_" + std::to_string(i - 1);
  }
  for (const auto& [ij, n] : g.sigma) {
    rn[pn("gamma", ij.first, ij.second)] =
        pn("gamma", cmap(ij.first), cmap(ij.second));
    rn[pn("b", ij.first, ij.second)] = pn("b", cmap(ij.first), cmap(ij.second));
  }
  for (const auto& [ij, n] : g.delta1) {
    rn[pn("delta", ij.first, ij.second)] = pn("delta", cmap(ij.first), ij.second);
    rn[pn("m", ij.first, ij.second)] = pn("m", cmap(ij.first), ij.second);
  }
  for (const auto& [ij, n] : g.delta2) {
    rn[pn("epsilon", ij.first, ij.second)] = pn("epsilon", ij.first, cmap(ij.second));
    rn[pn("o", ij.first, ij.second)] = pn("o", ij.first, cmap(ij.second));
  }
  unsigned size_ci = g.part.class_sizes[ci - 1];
  for (unsigned i = 1; i <= s; ++i) {
    for (unsigned j = 1; j <= g.part.class_sizes[i - 1]; ++j) {
      if (i == cj)
        rn[pn("lambda", i, j)] = pn("lambda", ci, size_ci + j);
      else if (i > cj)
        rn[pn("lambda", i, j)] = pn("lambda", i - 1, j);
    }
  }

  TowerPtr tower = g.r.ring->tower;
  PolyRingPtr ring = gcf_ring(out, tower);
  std::vector<std::size_t> to_index(g.r.ring->nvars());
  for (std::size_t i = 0; i < g.r.ring->nvars(); ++i) {
    std::string name = g.r.ring->vars[i];
    auto it = rn.find(name);
    if (it != rn.end()) name = it->second;
    int idx = ring->index_of(name);
    if (idx < 0) throw error("fuse_classes: variable " + name + " lost");
    to_index[i] = static_cast<std::size_t>(idx);
  }
  out.r = pred_map_vars(g.r, ring, to_index);
  out.r.bound = g.r.bound;
  return out;
}

std::optional<std::pair<unsigned, unsigned>> forced_pair(const GeneralCoreFormula& g) {
  unsigned s = g.part.s();
  if (s < 2) return std::nullopt;
  if (g.r.cells.empty()) return std::nullopt;
  PolySystem sys;
  sys.ring = g.r.ring;
  sys.polys = g.r.cells[0].eqs;
  PolySystem gb = buchberger(sys);
  const PolyRing& ring = *g.r.ring;
  for (unsigned i = 1; i <= s; ++i) {
    for (unsigned j = i + 1; j <= s; ++j) {
      Poly diff = poly_sub(
          ring, poly_var(ring, static_cast<std::size_t>(ring.index_of("alpha_" + std::to_string(i)))),
          poly_var(ring, static_cast<std::size_t>(ring.index_of("alpha_" + std::to_string(j)))));
      if (gb.polys.empty() ? diff.is_zero()
                           : normal_form(ring, diff, gb.polys, MonoOrder::grevlex).is_zero())
        return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

}  // namespace

BasicClosedSet make_basic_closed(GeneralCoreFormula gcf, const Fragment& frag) {
  gcf_validate(gcf, frag);
  if (!gcf.r.bound.empty() || gcf.r.cells.size() > 1 ||
      (!gcf.r.cells.empty() && !gcf.r.cells[0].negs.empty()))
    throw error("basic closed sets require a plain system of equations");
  if (!is_invariant(gcf)) throw not_invariant("basic closed sets require an invariant system");
  return BasicClosedSet{std::move(gcf)};
}

BasicClosedSet full_structure(const Fragment& frag) {
  PartitionEnumeration part;
  part.class_sizes = {1};
  GeneralCoreFormula g = gcf_make(part, {}, {}, {}, {}, 0, frag.tower);
  const PolyRing& ring = *g.r.ring;
  Poly lam = poly_var(ring, static_cast<std::size_t>(ring.index_of("lambda_1_1")));
  Poly p = poly_const(ring, frag.tower->from_int(-1));
  Poly acc = poly_const(ring, frag.tower->one());
  for (unsigned i = 0; i < frag.n; ++i) acc = poly_mul(ring, acc, lam);
  p = poly_add(ring, acc, p);
  g.r.cells = {Cell{{p}, {}}};
  return make_basic_closed(std::move(g), frag);
}

BasicClosedSet point_set(const Fragment& frag, const Scalar& alpha, const Scalar& lambda) {
  PartitionEnumeration part;
  part.class_sizes = {1};
  GeneralCoreFormula g = gcf_make(part, {}, {}, {}, {}, 0, frag.tower);
  const PolyRing& ring = *g.r.ring;
  Poly pa = poly_sub(ring, poly_var(ring, 0), poly_const(ring, frag.tower->lift(alpha)));
  Poly lam = poly_var(ring, static_cast<std::size_t>(ring.index_of("lambda_1_1")));
  Poly pl;
  if (lambda.is_zero()) {
    pl = lam;
  } else {
    // the F[N]-orbit of the pinned coordinate: lambda^N = value^N
    Poly acc = poly_const(ring, frag.tower->one());
    for (unsigned i = 0; i < frag.n; ++i) acc = poly_mul(ring, acc, lam);
    pl = poly_sub(ring, acc, poly_const(ring, pow(frag.tower->lift(lambda), frag.n)));
  }
  g.r.cells = {Cell{{pa, pl}, {}}};
  return make_basic_closed(std::move(g), frag);
}

BasicClosedSet empty_set(const Fragment& frag) {
  PartitionEnumeration part;
  part.class_sizes = {1};
  GeneralCoreFormula g = gcf_make(part, {}, {}, {}, {}, 0, frag.tower);
  g.r.cells = {Cell{{poly_const(*g.r.ring, frag.tower->one())}, {}}};
  return BasicClosedSet{std::move(g)};
}

BasicClosedSet intersect(const BasicClosedSet& a, const BasicClosedSet& b,
                         const Fragment& frag) {
  GeneralCoreFormula bb = b.gcf;
  if (!a.gcf.params.empty() || !b.gcf.params.empty())
    bb = align_params(a.gcf, b.gcf, frag);
  GeneralCoreFormula m = merge(a.gcf, bb, frag);
  if (!is_invariant(m)) m = invariant_closure(m);
  // merged closed sets stay closed systems
  if (m.r.cells.size() > 1) throw error("intersection produced a non-closed predicate");
  return BasicClosedSet{std::move(m)};
}

bool is_canonical(const BasicClosedSet& c, const Fragment&) {
  return !forced_pair(c.gcf).has_value();
}

BasicClosedSet canonicalize(const BasicClosedSet& c, const Fragment& frag) {
  (void)frag;
  GeneralCoreFormula g = c.gcf;
  for (;;) {
    auto p = forced_pair(g);
    if (!p) break;
    g = fuse_classes(g, p->first, p->second);
    if (!is_invariant(g)) g = invariant_closure(g);
  }
  return BasicClosedSet{std::move(g)};
}

int dim(const BasicClosedSet& c, const Fragment& frag) {
  if (!is_canonical(c, frag))
    throw error("dim is defined on canonical basic closed sets; canonicalize first");
  return ideal_dimension(closed_system(c));
}

bool closed_contains(const BasicClosedSet& outer, const BasicClosedSet& inner) {
  if (!gcf_same_shape(outer.gcf, inner.gcf))
    throw error("containment requires a common shape");
  // V(inner) subseteq V(outer) iff I(outer) subseteq I(inner)
  PolySystem oi = closed_system(outer);
  PolySystem ii = closed_system(inner);
  PolySystem gb = buchberger(ii);
  for (const auto& p : oi.polys)
    if (!(gb.polys.empty() ? p.is_zero()
                           : normal_form(*ii.ring, p, gb.polys, MonoOrder::grevlex).is_zero()))
      return false;
  return true;
}

bool closed_equal(const BasicClosedSet& a, const BasicClosedSet& b) {
  return gcf_same_shape(a.gcf, b.gcf) && ideal_equal(closed_system(a), closed_system(b));
}

std::size_t chain_stabilizes(const std::vector<BasicClosedSet>& chain) {
  if (chain.empty()) throw error("empty chain");
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (!gcf_same_shape(chain[i - 1].gcf, chain[i].gcf))
      throw error("chain members must share their shape");
    if (!closed_contains(chain[i - 1], chain[i]))
      throw not_descending("chain member " + std::to_string(i) +
                           " is not contained in its predecessor");
  }
  std::size_t index = 0;
  for (std::size_t i = 1; i < chain.size(); ++i)
    if (!closed_equal(chain[i - 1], chain[i])) index = i;
  return index;
}

std::string chain_report_json(const std::vector<BasicClosedSet>& chain,
                              const Fragment& frag) {
  (void)frag;
  nlohmann::json j;
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& c : chain) {
    PolySystem gb = buchberger(closed_system(c));
    nlohmann::json basis = nlohmann::json::array();
    for (const auto& p : gb.polys) basis.push_back(poly_to_string(*gb.ring, p));
    steps.push_back(basis);
  }
  j["steps"] = steps;
  j["stabilizes_at"] = chain_stabilizes(chain);
  return j.dump(2);
}

}  // namespace qho
