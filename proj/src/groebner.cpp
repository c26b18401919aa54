#include "groebner.hpp"

#include <algorithm>

namespace qho {

namespace {

Poly reduce_once(const PolyRing& ring, Poly p, const std::vector<Poly>& basis,
                 const std::vector<std::pair<Mono, Scalar>>& lts, MonoOrder order,
                 bool tail_reduce) {
  Poly out;
  while (!p.is_zero()) {
    auto [lm, lc] = leading_term(p, order);
    bool reduced = false;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (!mono_divides(lts[i].first, lm)) continue;
      Scalar factor = lc * inv(lts[i].second);
      Mono shift = mono_div(lm, lts[i].first);
      Poly sub;
      for (const auto& [m, c] : basis[i].terms)
        poly_add_term(ring, sub, mono_mul(m, shift), c * factor);
      p = poly_sub(ring, p, sub);
      reduced = true;
      break;
    }
    if (!reduced) {
      if (!tail_reduce) return p;
      // move the irreducible leading term to the output and continue
      poly_add_term(ring, out, lm, lc);
      p.terms.erase(lm);
    }
  }
  return out;
}

Poly make_monic(const PolyRing& ring, const Poly& p, MonoOrder order) {
  if (p.is_zero()) return p;
  auto [lm, lc] = leading_term(p, order);
  return poly_scale(ring, p, inv(lc));
}

}  // namespace

Poly normal_form(const PolyRing& ring, const Poly& p, const std::vector<Poly>& basis,
                 MonoOrder order) {
  std::vector<std::pair<Mono, Scalar>> lts;
  lts.reserve(basis.size());
  for (const auto& b : basis) lts.push_back(leading_term(b, order));
  return reduce_once(ring, p, basis, lts, order, true);
}

PolySystem buchberger(const PolySystem& sys, MonoOrder order) {
  const PolyRing& ring = *sys.ring;
  std::vector<Poly> basis;
  for (const auto& p : sys.polys)
    if (!p.is_zero()) basis.push_back(p);

  auto lt = [&](const Poly& p) { return leading_term(p, order); };

  // pair queue; Buchberger's coprimality criterion prunes
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j) pairs.emplace_back(i, j);

  while (!pairs.empty()) {
    auto [i, j] = pairs.back();
    pairs.pop_back();
    auto [lmi, lci] = lt(basis[i]);
    auto [lmj, lcj] = lt(basis[j]);
    Mono l = mono_lcm(lmi, lmj);
    if (l == mono_mul(lmi, lmj)) continue;  // coprime leading terms
    // S-polynomial
    Poly si, sj;
    {
      Mono shift = mono_div(l, lmi);
      Scalar f = inv(lci);
      for (const auto& [m, c] : basis[i].terms)
        poly_add_term(ring, si, mono_mul(m, shift), c * f);
    }
    {
      Mono shift = mono_div(l, lmj);
      Scalar f = inv(lcj);
      for (const auto& [m, c] : basis[j].terms)
        poly_add_term(ring, sj, mono_mul(m, shift), c * f);
    }
    Poly s = poly_sub(ring, si, sj);
    Poly r = normal_form(ring, s, basis, order);
    if (r.is_zero()) continue;
    basis.push_back(make_monic(ring, r, order));
    for (std::size_t k = 0; k + 1 < basis.size(); ++k)
      pairs.emplace_back(k, basis.size() - 1);
  }

  // minimalize: drop generators whose leading monomial is divisible by another's
  std::vector<Poly> minimal;
  {
    std::vector<std::pair<Mono, Scalar>> lts;
    for (const auto& b : basis) lts.push_back(lt(b));
    for (std::size_t i = 0; i < basis.size(); ++i) {
      bool redundant = false;
      for (std::size_t j = 0; j < basis.size(); ++j) {
        if (i == j) continue;
        if (mono_divides(lts[j].first, lts[i].first) &&
            !(lts[i].first == lts[j].first && j > i)) {
          redundant = true;
          break;
        }
      }
      if (!redundant) minimal.push_back(basis[i]);
    }
  }

  // inter-reduce to the unique reduced basis
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < minimal.size(); ++i) {
      std::vector<Poly> others;
      for (std::size_t j = 0; j < minimal.size(); ++j)
        if (j != i) others.push_back(minimal[j]);
      if (others.empty()) break;
      Poly r = normal_form(ring, minimal[i], others, order);
      if (!(r == minimal[i])) {
        changed = true;
        if (r.is_zero()) {
          minimal.erase(minimal.begin() + static_cast<std::ptrdiff_t>(i));
          --i;
        } else {
          minimal[i] = r;
        }
      }
    }
  }
  for (auto& p : minimal) p = make_monic(ring, p, order);
  std::sort(minimal.begin(), minimal.end(), [&](const Poly& a, const Poly& b) {
    return mono_less(leading_term(a, order).first, leading_term(b, order).first, order);
  });
  PolySystem out;
  out.ring = sys.ring;
  out.polys = std::move(minimal);
  return out;
}

bool ideal_member(const PolySystem& sys, const Poly& p, MonoOrder order) {
  PolySystem gb = buchberger(sys, order);
  if (gb.polys.empty()) return p.is_zero();
  return normal_form(*sys.ring, p, gb.polys, order).is_zero();
}

bool ideal_equal(const PolySystem& a, const PolySystem& b, MonoOrder order) {
  PolySystem ga = buchberger(a, order);
  PolySystem gb = buchberger(b, order);
  if (ga.polys.size() != gb.polys.size()) return false;
  for (std::size_t i = 0; i < ga.polys.size(); ++i)
    if (!(ga.polys[i] == gb.polys[i])) return false;
  return true;
}

bool ideal_trivial(const PolySystem& sys) {
  PolySystem gb = buchberger(sys, MonoOrder::grevlex);
  return gb.polys.size() == 1 && gb.polys[0].terms.size() == 1 &&
         mono_degree(gb.polys[0].terms.begin()->first) == 0;
}

bool radical_member(const PolySystem& sys, const Poly& f) {
  if (f.is_zero()) return true;
  // Rabinowitsch: 1 in I + (1 - y*f) over the extended ring.
  std::size_t n = sys.ring->nvars();
  std::vector<std::string> vars = sys.ring->vars;
  vars.push_back("_rab");
  PolyRingPtr ext = make_ring(sys.ring->tower, vars);
  std::vector<std::size_t> id(n);
  for (std::size_t i = 0; i < n; ++i) id[i] = i;
  std::vector<Poly> gens;
  for (const auto& p : sys.polys) gens.push_back(poly_reindex(p, id, n + 1));
  Poly yf = poly_mul(*ext, poly_reindex(f, id, n + 1), poly_var(*ext, n));
  gens.push_back(poly_sub(*ext, poly_const(*ext, ext->tower->one()), yf));
  PolySystem e;
  e.ring = ext;
  e.polys = std::move(gens);
  return ideal_trivial(e);
}

bool variety_contains(const PolySystem& outer, const PolySystem& inner) {
  for (const auto& g : outer.polys)
    if (!radical_member(inner, g)) return false;
  return true;
}

PolySystem eliminate(const PolySystem& sys, const std::set<std::string>& drop) {
  for (const auto& d : drop)
    if (sys.ring->index_of(d) < 0) throw bad_index("eliminate: unknown variable " + d);
  if (drop.empty()) return sys;
  // permuted ring: dropped variables first (lex-largest)
  std::vector<std::string> perm_vars;
  for (const auto& v : sys.ring->vars)
    if (drop.count(v)) perm_vars.push_back(v);
  std::size_t ndrop = perm_vars.size();
  for (const auto& v : sys.ring->vars)
    if (!drop.count(v)) perm_vars.push_back(v);
  PolyRingPtr perm = make_ring(sys.ring->tower, perm_vars);
  std::vector<std::size_t> to_perm(sys.ring->nvars());
  for (std::size_t i = 0; i < sys.ring->nvars(); ++i)
    to_perm[i] = static_cast<std::size_t>(perm->index_of(sys.ring->vars[i]));
  PolySystem psys;
  psys.ring = perm;
  for (const auto& p : sys.polys)
    psys.polys.push_back(poly_reindex(p, to_perm, perm->nvars()));

  PolySystem gb = buchberger(psys, MonoOrder::lex);

  // keep polynomials free of the dropped block
  std::vector<std::string> kept_vars(perm_vars.begin() + static_cast<std::ptrdiff_t>(ndrop),
                                     perm_vars.end());
  PolyRingPtr kept = make_ring(sys.ring->tower, kept_vars);
  std::vector<std::size_t> to_kept(perm->nvars(), 0);
  for (std::size_t i = ndrop; i < perm->nvars(); ++i)
    to_kept[i] = static_cast<std::size_t>(kept->index_of(perm_vars[i]));
  PolySystem out;
  out.ring = kept;
  for (const auto& p : gb.polys) {
    bool free = true;
    for (const auto& [m, c] : p.terms)
      for (std::size_t i = 0; i < ndrop && free; ++i)
        if (m[i]) free = false;
    if (free) out.polys.push_back(poly_reindex(p, to_kept, kept->nvars()));
  }
  return out;
}

PolySystem ideal_intersect(const PolySystem& a, const PolySystem& b) {
  if (a.ring->vars != b.ring->vars) throw error("ideal_intersect: ring mismatch");
  // tag trick: (u*I + (1-u)*J) \cap k[x]
  std::size_t n = a.ring->nvars();
  std::vector<std::string> vars = a.ring->vars;
  vars.push_back("_tag");
  PolyRingPtr ext = make_ring(a.ring->tower, vars);
  std::vector<std::size_t> id(n);
  for (std::size_t i = 0; i < n; ++i) id[i] = i;
  Poly u = poly_var(*ext, n);
  Poly one_minus_u = poly_sub(*ext, poly_const(*ext, ext->tower->one()), u);
  PolySystem e;
  e.ring = ext;
  for (const auto& p : a.polys)
    e.polys.push_back(poly_mul(*ext, u, poly_reindex(p, id, n + 1)));
  for (const auto& p : b.polys)
    e.polys.push_back(poly_mul(*ext, one_minus_u, poly_reindex(p, id, n + 1)));
  PolySystem elim = eliminate(e, {"_tag"});
  // eliminate returns the original ring's variables in order
  PolySystem out;
  out.ring = a.ring;
  out.polys = elim.polys;
  return out;
}

int ideal_dimension(const PolySystem& sys) {
  PolySystem gb = buchberger(sys, MonoOrder::grevlex);
  if (gb.polys.empty()) return static_cast<int>(sys.ring->nvars());
  if (ideal_trivial(gb)) return -1;
  std::size_t n = sys.ring->nvars();
  std::vector<Mono> lms;
  for (const auto& p : gb.polys) lms.push_back(leading_term(p, MonoOrder::grevlex).first);
  // variables outside every leading monomial are independent for free;
  // enumerate subsets of the support only
  std::vector<std::size_t> support;
  {
    std::vector<bool> in_support(n, false);
    for (const auto& m : lms)
      for (std::size_t i = 0; i < n; ++i)
        if (m[i]) in_support[i] = true;
    for (std::size_t i = 0; i < n; ++i)
      if (in_support[i]) support.push_back(i);
  }
  int free_vars = static_cast<int>(n - support.size());
  if (support.size() > 24) throw guard_error("dimension support too large");
  // max |S| over subsets S of the support with no leading monomial
  // supported inside S (plus the free variables)
  int best = 0;
  for (std::uint32_t mask = 0; mask < (1u << support.size()); ++mask) {
    int size = std::popcount(mask);
    if (size <= best) continue;
    bool independent = true;
    for (const auto& m : lms) {
      bool inside = true;
      for (std::size_t k = 0; k < support.size() && inside; ++k)
        if (m[support[k]] && !(mask & (1u << k))) inside = false;
      if (inside) {
        independent = false;
        break;
      }
    }
    if (independent) best = size;
  }
  return free_vars + best;
}

}  // namespace qho
