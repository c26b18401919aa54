#include "engine.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace qho {

namespace {

struct ParsedName {
  std::string family;
  std::vector<unsigned> idx;
};

ParsedName parse_name(const std::string& name) {
  ParsedName p;
  if (name.rfind("p(", 0) == 0) {
    p.family = name;
    return p;
  }
  VarId v = parse_var_id(name);
  p.family = v.family;
  p.idx = v.idx;
  return p;
}

std::string pair_name(const char* fam, unsigned i, unsigned j) {
  return std::string(fam) + "_" + std::to_string(i) + "_" + std::to_string(j);
}

// Odometer over width digits in base n; calls fn for every combination.
template <typename Fn>
bool for_each_tuple(unsigned base, std::size_t width, Fn&& fn) {
  std::vector<unsigned> digits(width, 0);
  for (;;) {
    if (fn(digits)) return true;
    std::size_t i = 0;
    while (i < width && ++digits[i] == base) {
      digits[i] = 0;
      ++i;
    }
    if (i == width) return false;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Oracle.

bool evaluate(const GeneralCoreFormula& gcf, const Fragment& frag,
              const std::vector<BundleVector>& e, const std::vector<Scalar>& a) {
  gcf_validate(gcf, frag);
  const unsigned s = gcf.part.s();
  const unsigned t = gcf.part.t();
  const unsigned n_e = gcf.part.n();
  const unsigned n_r = gcf.part.r();
  const unsigned N = frag.n;
  if (e.size() != n_e + n_r) throw bad_index("e-tuple arity mismatch");
  if (a.size() != gcf.num_a) throw bad_index("a-tuple arity mismatch");

  // partition consistency: class members share a fiber
  std::vector<std::size_t> class_base(s);
  {
    std::size_t pos = 0;
    for (unsigned i = 0; i < s; ++i) {
      std::size_t base = e[pos].base_id;
      for (unsigned j = 0; j < gcf.part.class_sizes[i]; ++j)
        if (e[pos + j].base_id != base) return false;
      if (frag.is_infinite(base)) return false;
      class_base[i] = base;
      pos += gcf.part.class_sizes[i];
    }
    for (unsigned i = 0; i < t; ++i) {
      for (unsigned j = 0; j < gcf.part.param_sizes[i]; ++j)
        if (e[pos + j].base_id != gcf.params[i].base_id) return false;
      pos += gcf.part.param_sizes[i];
    }
  }

  // ladder chain endpoints; chains must stay inside the fragment
  auto walk_up = [&](std::size_t base, unsigned n) -> std::size_t {
    std::size_t cur = base;
    for (unsigned k = 0; k < n; ++k) {
      if (frag.is_infinite(cur) || !frag.up[cur].has_value())
        throw out_of_fragment("ladder chain leaves the fragment");
      cur = *frag.up[cur];
    }
    return cur;
  };
  for (const auto& [ij, n] : gcf.sigma)
    if (walk_up(class_base[ij.first - 1], n) != class_base[ij.second - 1]) return false;
  for (const auto& [ij, n] : gcf.delta1)
    if (walk_up(class_base[ij.first - 1], n) != gcf.params[ij.second - 1].base_id)
      return false;
  for (const auto& [ij, n] : gcf.delta2)
    if (walk_up(gcf.params[ij.first - 1].base_id, n) != class_base[ij.second - 1])
      return false;

  const PolyRing& ring = *gcf.r.ring;
  auto var_index = [&](const std::string& name) {
    int i = ring.index_of(name);
    if (i < 0) throw error("missing predicate variable " + name);
    return static_cast<std::size_t>(i);
  };

  std::vector<std::optional<Scalar>> assign(ring.nvars());
  // alpha, a, mu and lambda positions that do not depend on choices
  for (unsigned i = 0; i < s; ++i)
    assign[var_index("alpha_" + std::to_string(i + 1))] = frag.base_value(class_base[i]);
  for (unsigned k = 0; k < gcf.num_a; ++k)
    assign[var_index("a_" + std::to_string(k + 1))] = frag.tower->lift(a[k]);
  {
    std::size_t pos = n_e;
    for (unsigned i = 0; i < t; ++i) {
      unsigned kh = *frag.basis_index(gcf.params[i]);
      for (unsigned j = 0; j < gcf.part.param_sizes[i]; ++j) {
        Scalar mu = frag.tower->zeta_pow(-static_cast<long>(kh)) * e[pos + j].scalar;
        assign[var_index(pair_name("mu", i + 1, j + 1))] = mu;
      }
      pos += gcf.part.param_sizes[i];
    }
  }

  // chain data: raising image of the index-0 basis element and the base
  // product prod(alpha + k), per chain
  struct ChainInfo {
    std::size_t var_gamma, var_b;  // names differ per family
    std::size_t src_class;         // 0-based, or param index for delta2
    unsigned n;
    Scalar image_scalar;    // a^n(basis(src,0)) coordinate
    unsigned image_index;   // always 0 after normalization (kept implicit)
    Scalar lower_scalar;    // adag^n(basis(end,0)) coordinate
    Scalar base_product;    // prod_{k=0}^{n-1}(base + k)
    std::size_t end_base;
    int kind;               // 0 = sigma, 1 = delta1, 2 = delta2
    unsigned i, j;
  };
  std::vector<ChainInfo> chains;
  auto add_chain = [&](int kind, unsigned i, unsigned j, unsigned n) {
    ChainInfo c;
    c.kind = kind;
    c.i = i;
    c.j = j;
    c.n = n;
    std::size_t src = kind == 2 ? gcf.params[i - 1].base_id : class_base[i - 1];
    c.src_class = src;
    c.end_base = walk_up(src, n);
    BundleVector up = apply_a_pow(frag, frag.basis_element(src, 0), n);
    c.image_scalar = up.scalar;
    BundleVector down = apply_adag_pow(frag, frag.basis_element(c.end_base, 0), n);
    c.lower_scalar = down.scalar;
    Scalar prod = frag.tower->one();
    std::size_t cur = src;
    for (unsigned k = 0; k < n; ++k) {
      prod = prod * frag.base_value(cur);
      cur = *frag.up[cur];
    }
    c.base_product = prod;
    const char* gfam = kind == 0 ? "gamma" : (kind == 1 ? "delta" : "epsilon");
    const char* bfam = kind == 0 ? "b" : (kind == 1 ? "m" : "o");
    c.var_gamma = var_index(pair_name(gfam, i, j));
    c.var_b = var_index(pair_name(bfam, i, j));
    return c;
  };
  for (const auto& [ij, n] : gcf.sigma) chains.push_back(add_chain(0, ij.first, ij.second, n));
  for (const auto& [ij, n] : gcf.delta1) chains.push_back(add_chain(1, ij.first, ij.second, n));
  for (const auto& [ij, n] : gcf.delta2) chains.push_back(add_chain(2, ij.first, ij.second, n));

  // lambda variable indices per class/member
  std::vector<std::vector<std::size_t>> lambda_idx(s);
  {
    for (unsigned i = 0; i < s; ++i)
      for (unsigned j = 0; j < gcf.part.class_sizes[i]; ++j)
        lambda_idx[i].push_back(var_index(pair_name("lambda", i + 1, j + 1)));
  }

  auto zeta = [&](long k) { return frag.tower->zeta_pow(k); };

  // enumerate basis choices: one digit per class, one per chain target
  std::size_t width = s + chains.size();
  return for_each_tuple(N, width, [&](const std::vector<unsigned>& digits) {
    std::vector<std::optional<Scalar>> va = assign;
    // lambda_ij = zeta^{-k_i} * e_scalar
    {
      std::size_t pos = 0;
      for (unsigned i = 0; i < s; ++i) {
        for (unsigned j = 0; j < gcf.part.class_sizes[i]; ++j)
          va[lambda_idx[i][j]] =
              zeta(-static_cast<long>(digits[i])) * e[pos + j].scalar;
        pos += gcf.part.class_sizes[i];
      }
    }
    // chains
    bool viable = true;
    for (std::size_t c = 0; c < chains.size() && viable; ++c) {
      const ChainInfo& ch = chains[c];
      unsigned m = digits[s + c];
      // source basis choice k: class digit for sigma/delta1, parameter
      // index for delta2
      long k_src;
      if (ch.kind == 2) {
        k_src = static_cast<long>(*frag.basis_index(gcf.params[ch.i - 1]));
      } else {
        k_src = static_cast<long>(digits[ch.i - 1]);
      }
      // a^n(src basis elt) = zeta^{k_src} * image; the target choice m
      // forces the witness scalar b
      Scalar b = zeta(k_src - static_cast<long>(m)) * ch.image_scalar;
      // check adag^n(target basis) = b * (src basis)
      Scalar lhs = zeta(static_cast<long>(m)) * ch.lower_scalar;
      Scalar rhs = b * zeta(k_src);
      if (lhs != rhs) {
        viable = false;
        break;
      }
      // chain clause: b^2 = prod(base + k)
      if (!(b * b == ch.base_product)) {
        viable = false;
        break;
      }
      va[ch.var_b] = b;
      // gamma-like: target = gamma * f_j (or delta * h_j)
      long k_tgt;
      if (ch.kind == 1) {
        k_tgt = static_cast<long>(*frag.basis_index(gcf.params[ch.j - 1]));
      } else {
        k_tgt = static_cast<long>(digits[ch.j - 1]);
      }
      va[ch.var_gamma] = zeta(static_cast<long>(m) - k_tgt);
    }
    if (!viable) return false;
    return pred_eval(gcf.r, va);
  });
}

// ---------------------------------------------------------------------------
// Delta action.

namespace {

VarSubst delta_subst(const PolyRing& ring, const std::vector<std::string>& bound,
                     const std::vector<Scalar>& delta) {
  VarSubst subst = identity_subst(ring);
  std::set<std::string> bound_set(bound.begin(), bound.end());
  std::size_t s = delta.size();
  for (std::size_t v = 0; v < ring.nvars(); ++v) {
    const std::string& name = ring.vars[v];
    if (bound_set.count(name)) continue;
    ParsedName pn = parse_name(name);
    if (pn.idx.size() != 2) continue;
    unsigned i = pn.idx[0], j = pn.idx[1];
    if (pn.family == "gamma" && i >= 1 && i <= s && j >= 1 && j <= s) {
      subst.map[v].second = delta[i - 1] * inv(delta[j - 1]);
    } else if (pn.family == "lambda" && i >= 1 && i <= s) {
      subst.map[v].second = inv(delta[i - 1]);
    } else if (pn.family == "delta" && i >= 1 && i <= s) {
      subst.map[v].second = delta[i - 1];
    } else if (pn.family == "epsilon" && j >= 1 && j <= s) {
      subst.map[v].second = inv(delta[j - 1]);
    }
  }
  return subst;
}

}  // namespace

GeneralCoreFormula delta_action(const GeneralCoreFormula& gcf,
                                const std::vector<Scalar>& delta) {
  if (delta.size() != gcf.part.s()) throw bad_index("delta tuple length mismatch");
  const TowerPtr& tower = gcf.r.ring->tower;
  for (const auto& d : delta)
    if (!(pow(tower->lift(d), tower->root_order()) == tower->one()))
      throw error("delta component is not an N-th root of unity");
  GeneralCoreFormula out = gcf;
  out.r = pred_substitute(gcf.r, delta_subst(*gcf.r.ring, gcf.r.bound, delta));
  return out;
}

GeneralCoreFormula invariant_closure(const GeneralCoreFormula& gcf, unsigned guard) {
  unsigned s = gcf.part.s();
  unsigned N = gcf.r.ring->tower->root_order();
  double count = 1;
  for (unsigned i = 0; i < s; ++i) count *= N;
  if (count > guard) throw guard_error("invariant closure would produce too many translates");
  if (s == 0) return gcf;

  const TowerPtr& tower = gcf.r.ring->tower;
  GeneralCoreFormula out = gcf;
  bool closed = pred_is_closed_system(gcf.r);
  std::optional<PolySystem> closed_acc;
  std::optional<Pred> pred_acc;
  for_each_tuple(N, s, [&](const std::vector<unsigned>& exps) {
    std::vector<Scalar> delta;
    for (unsigned i = 0; i < s; ++i) delta.push_back(tower->zeta_pow(exps[i]));
    Pred translated = pred_substitute(gcf.r, delta_subst(*gcf.r.ring, gcf.r.bound, delta));
    if (closed) {
      PolySystem sys = pred_positive_system(translated);
      if (!closed_acc)
        closed_acc = sys;
      else
        closed_acc = closed_union(*closed_acc, sys);
    } else {
      if (!pred_acc)
        pred_acc = translated;
      else
        pred_acc = pred_union(*pred_acc, translated);
    }
    return false;  // visit all tuples
  });
  if (closed)
    out.r = pred_from_system(*closed_acc);
  else
    out.r = pred_canonical(*pred_acc);
  out.r.ring = gcf.r.ring;
  out.r.bound = gcf.r.bound;
  return out;
}

bool is_invariant(const GeneralCoreFormula& gcf, unsigned guard) {
  unsigned s = gcf.part.s();
  if (s == 0) return true;
  unsigned N = gcf.r.ring->tower->root_order();
  double count = 1;
  for (unsigned i = 0; i < s; ++i) count *= N;
  if (count > guard) throw guard_error("invariance check over too many translates");
  const TowerPtr& tower = gcf.r.ring->tower;
  bool invariant = true;
  for_each_tuple(N, s, [&](const std::vector<unsigned>& exps) {
    std::vector<Scalar> delta;
    for (unsigned i = 0; i < s; ++i) delta.push_back(tower->zeta_pow(exps[i]));
    Pred translated = pred_substitute(gcf.r, delta_subst(*gcf.r.ring, gcf.r.bound, delta));
    if (!pred_equal(translated, gcf.r)) {
      invariant = false;
      return true;  // stop
    }
    return false;
  });
  return invariant;
}

// ---------------------------------------------------------------------------
// Negation normal form at a context tuple.

NnfResult negation_normal_form(const GeneralCoreFormula& context, const PolySystem& r,
                               const PolySystem& s_sys, const std::vector<Scalar>& at,
                               unsigned guard) {
  const PolyRing& ring = *context.r.ring;
  if (r.ring->vars != ring.vars || s_sys.ring->vars != ring.vars)
    throw error("negation_normal_form: systems must live over the context ring");
  if (at.size() != ring.nvars()) throw bad_index("context tuple arity mismatch");
  unsigned s = context.part.s();
  unsigned N = ring.tower->root_order();
  double count = 1;
  for (unsigned i = 0; i < s; ++i) count *= N;
  if (count > guard) throw guard_error("negation normal form over too many translates");

  std::vector<std::optional<Scalar>> point;
  for (const auto& v : at) point.emplace_back(ring.tower->lift(v));

  auto holds_at = [&](const PolySystem& sys) {
    for (const auto& p : sys.polys)
      if (!poly_eval(ring, p, point).is_zero()) return false;
    return true;
  };
  if (holds_at(s_sys))
    throw error("context tuple satisfies S; the lemma requires ~S in the type");

  // Delta = set of delta with S^delta false at the context
  std::vector<std::vector<unsigned>> all_tuples, delta_set;
  for_each_tuple(N, s, [&](const std::vector<unsigned>& exps) {
    all_tuples.push_back(exps);
    return false;
  });
  auto translate = [&](const PolySystem& sys, const std::vector<unsigned>& exps) {
    std::vector<Scalar> delta;
    for (unsigned i = 0; i < s; ++i) delta.push_back(ring.tower->zeta_pow(exps[i]));
    return system_substitute(sys, delta_subst(ring, {}, delta));
  };
  for (const auto& exps : all_tuples)
    if (!holds_at(translate(s_sys, exps))) delta_set.push_back(exps);

  // T = union of the S^delta over Delta (ideal intersection)
  std::optional<PolySystem> t_sys;
  for (const auto& exps : delta_set) {
    PolySystem tr = translate(s_sys, exps);
    if (!t_sys)
      t_sys = tr;
    else
      t_sys = closed_union(*t_sys, tr);
  }

  // Stab(Delta) = { delta : delta * Delta = Delta } (componentwise mod N)
  std::set<std::vector<unsigned>> delta_keys(delta_set.begin(), delta_set.end());
  auto in_stab = [&](const std::vector<unsigned>& exps) {
    for (const auto& d : delta_set) {
      std::vector<unsigned> prod(s);
      for (unsigned i = 0; i < s; ++i) prod[i] = (exps[i] + d[i]) % N;
      if (!delta_keys.count(prod)) return false;
    }
    return true;
  };

  NnfResult out;
  out.r = r;
  out.s.ring = r.ring;
  for (const auto& exps : all_tuples) {
    PolySystem td = translate(*t_sys, exps);
    if (!in_stab(exps))
      out.r.polys.insert(out.r.polys.end(), td.polys.begin(), td.polys.end());
    out.s.polys.insert(out.s.polys.end(), td.polys.begin(), td.polys.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// conj_split / align_params.

namespace {

bool same_shape(const GeneralCoreFormula& a, const GeneralCoreFormula& b) {
  return a.part.class_sizes == b.part.class_sizes &&
         a.part.param_sizes == b.part.param_sizes && a.sigma == b.sigma &&
         a.delta1 == b.delta1 && a.delta2 == b.delta2 && a.num_a == b.num_a;
}

bool same_params(const GeneralCoreFormula& a, const GeneralCoreFormula& b) {
  if (a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].base_id != b.params[i].base_id) return false;
    if (!(a.params[i].scalar.coords() == b.params[i].scalar.coords())) return false;
  }
  return true;
}

// Conjunction over possibly different bound blocks: b's bound variables are
// renamed fresh, both predicates are rebased onto the union ring.
Pred conjoin_general(const GeneralCoreFormula& shape, const Pred& pa, const Pred& pb,
                     TowerPtr tower) {
  std::vector<std::string> free_vars = gcf_free_vars(shape);
  std::vector<std::string> vars = free_vars;
  std::set<std::string> used(vars.begin(), vars.end());
  std::map<std::string, std::string> rename_b;
  std::vector<std::string> bound;
  for (const auto& bn : pa.bound) {
    vars.push_back(bn);
    bound.push_back(bn);
    used.insert(bn);
  }
  unsigned counter = 900;
  for (const auto& bn : pb.bound) {
    std::string name = bn;
    while (used.count(name)) {
      ParsedName pn = parse_name(bn);
      name = pn.family + "_" + std::to_string(++counter);
    }
    rename_b[bn] = name;
    vars.push_back(name);
    bound.push_back(name);
    used.insert(name);
  }
  PolyRingPtr ring = make_ring(std::move(tower), vars);
  auto rebase = [&](const Pred& p, const std::map<std::string, std::string>& rn) {
    std::vector<std::size_t> to_index(p.ring->nvars());
    for (std::size_t i = 0; i < p.ring->nvars(); ++i) {
      std::string name = p.ring->vars[i];
      auto it = rn.find(name);
      if (it != rn.end()) name = it->second;
      int idx = ring->index_of(name);
      if (idx < 0) throw error("conjoin_general: variable " + name + " missing");
      to_index[i] = static_cast<std::size_t>(idx);
    }
    Pred q = pred_map_vars(p, ring, to_index);
    q.bound.clear();
    return q;
  };
  Pred qa = rebase(pa, {});
  Pred qb = rebase(pb, rename_b);
  Pred out = pred_conjoin(qa, qb);
  out.bound = bound;
  return out;
}

}  // namespace

GeneralCoreFormula conj_split(const GeneralCoreFormula& a, const GeneralCoreFormula& b,
                              const Fragment& frag) {
  gcf_validate(a, frag);
  gcf_validate(b, frag);
  if (!same_shape(a, b) || !same_params(a, b))
    throw param_mismatch("conj_split requires identical index data and parameters");
  if (!is_invariant(b)) throw not_invariant("second operand is not F[N]-invariant");
  GeneralCoreFormula out = a;
  out.r = conjoin_general(a, a.r, b.r, a.r.ring->tower);
  return out;
}

GeneralCoreFormula align_params(const GeneralCoreFormula& a, const GeneralCoreFormula& b,
                                const Fragment& frag) {
  gcf_validate(a, frag);
  gcf_validate(b, frag);
  if (a.params.size() != b.params.size())
    throw param_mismatch("parameter tuples have different lengths");
  unsigned t = static_cast<unsigned>(a.params.size());
  std::vector<Scalar> eta;
  for (unsigned i = 0; i < t; ++i) {
    if (a.params[i].base_id != b.params[i].base_id)
      throw fiber_mismatch("parameters lie over different fibers");
    unsigned ka = *frag.basis_index(a.params[i]);
    unsigned kb = *frag.basis_index(b.params[i]);
    eta.push_back(frag.tower->zeta_pow(static_cast<long>(ka) - static_cast<long>(kb)));
  }
  // h1_i = eta_i h2_i: rewrite b's witnesses: mu_ij -> eta_i mu_ij,
  // delta_ij -> eta_j delta_ij, epsilon_ij -> eta_i^-1 epsilon_ij
  const PolyRing& ring = *b.r.ring;
  VarSubst subst = identity_subst(ring);
  std::set<std::string> bound_set(b.r.bound.begin(), b.r.bound.end());
  for (std::size_t v = 0; v < ring.nvars(); ++v) {
    if (bound_set.count(ring.vars[v])) continue;
    ParsedName pn = parse_name(ring.vars[v]);
    if (pn.idx.size() != 2) continue;
    unsigned i = pn.idx[0], j = pn.idx[1];
    if (pn.family == "mu" && i >= 1 && i <= t) {
      subst.map[v].second = eta[i - 1];
    } else if (pn.family == "delta" && j >= 1 && j <= t) {
      subst.map[v].second = eta[j - 1];
    } else if (pn.family == "epsilon" && i >= 1 && i <= t) {
      subst.map[v].second = inv(eta[i - 1]);
    }
  }
  GeneralCoreFormula out = b;
  out.params = a.params;
  out.r = pred_substitute(b.r, subst);
  return out;
}

// ---------------------------------------------------------------------------
// Merge.

GeneralCoreFormula merge(const GeneralCoreFormula& a, const GeneralCoreFormula& b,
                         const Fragment& frag) {
  gcf_validate(a, frag);
  gcf_validate(b, frag);
  if (!is_invariant(a) || !is_invariant(b))
    throw not_invariant("merge requires both predicates to be F[N]-invariant");
  if (!same_params(a, b))
    throw param_mismatch("merge requires aligned parameters (see align_params)");
  if (a.part.param_sizes != b.part.param_sizes)
    throw param_mismatch("merge requires a common parameter-block enumeration");
  if (a.part.n() != b.part.n() || a.num_a != b.num_a)
    throw bad_index("merge requires the same free tuple arity");

  unsigned n = a.part.n();
  // positions -> class (0-based) for both partitions
  auto position_classes = [&](const GeneralCoreFormula& g) {
    std::vector<unsigned> pc(n);
    std::size_t pos = 0;
    for (unsigned i = 0; i < g.part.s(); ++i)
      for (unsigned j = 0; j < g.part.class_sizes[i]; ++j) pc[pos++] = i;
    return pc;
  };
  std::vector<unsigned> pa = position_classes(a), pb = position_classes(b);

  // union-find: ~RS = transitive closure of the two partitions
  std::vector<unsigned> parent(n);
  for (unsigned i = 0; i < n; ++i) parent[i] = i;
  std::function<unsigned(unsigned)> find = [&](unsigned x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](unsigned x, unsigned y) { parent[find(x)] = find(y); };
  auto link_partition = [&](const std::vector<unsigned>& pc) {
    std::map<unsigned, unsigned> first;
    for (unsigned p = 0; p < n; ++p) {
      auto it = first.find(pc[p]);
      if (it == first.end())
        first[pc[p]] = p;
      else
        unite(p, it->second);
    }
  };
  link_partition(pa);
  link_partition(pb);

  // new classes ordered by smallest position
  std::map<unsigned, std::vector<unsigned>> groups;
  for (unsigned p = 0; p < n; ++p) groups[find(p)].push_back(p);
  std::vector<std::vector<unsigned>> classes;
  for (auto& [rep, members] : groups) classes.push_back(members);
  std::sort(classes.begin(), classes.end(),
            [](const auto& x, const auto& y) { return x[0] < y[0]; });
  std::vector<unsigned> pos_class(n), pos_member(n);
  for (unsigned c = 0; c < classes.size(); ++c)
    for (unsigned m = 0; m < classes[c].size(); ++m) {
      pos_class[classes[c][m]] = c;
      pos_member[classes[c][m]] = m;
    }
  // old class -> new class maps
  auto class_map = [&](const GeneralCoreFormula& g, const std::vector<unsigned>& pc) {
    std::vector<unsigned> m(g.part.s());
    for (unsigned p = 0; p < n; ++p) m[pc[p]] = pos_class[p];
    return m;
  };
  std::vector<unsigned> ma = class_map(a, pa), mb = class_map(b, pb);

  GeneralCoreFormula out;
  out.part.class_sizes.clear();
  for (const auto& cls : classes)
    out.part.class_sizes.push_back(static_cast<unsigned>(cls.size()));
  out.part.param_sizes = a.part.param_sizes;
  out.params = a.params;
  out.num_a = a.num_a;

  bool conflict = false;
  auto merge_chains = [&](const ChainMap& src, const std::vector<unsigned>& cmap,
                          ChainMap& dst, bool map_i, bool map_j) {
    for (const auto& [ij, cn] : src) {
      unsigned i = map_i ? cmap[ij.first - 1] + 1 : ij.first;
      unsigned j = map_j ? cmap[ij.second - 1] + 1 : ij.second;
      auto [it, inserted] = dst.try_emplace({i, j}, cn);
      if (!inserted && it->second != cn) conflict = true;
    }
  };
  merge_chains(a.sigma, ma, out.sigma, true, true);
  merge_chains(b.sigma, mb, out.sigma, true, true);
  merge_chains(a.delta1, ma, out.delta1, true, false);
  merge_chains(b.delta1, mb, out.delta1, true, false);
  merge_chains(a.delta2, ma, out.delta2, false, true);
  merge_chains(b.delta2, mb, out.delta2, false, true);

  TowerPtr tower = a.r.ring->tower->lineage_depth() >= b.r.ring->tower->lineage_depth()
                       ? a.r.ring->tower
                       : b.r.ring->tower;
  if (conflict) {
    // incompatible chain multiplicities force distinct base gaps: the
    // conjunction is unsatisfiable
    out.sigma.clear();
    out.delta1.clear();
    out.delta2.clear();
    Pred f = pred_false(gcf_ring(out, tower));
    out.r = f;
    return out;
  }

  // rename each operand's predicate onto the merged ring
  auto rename_pred = [&](const GeneralCoreFormula& g, const std::vector<unsigned>& cmap) {
    std::map<std::string, std::string> rn;
    for (unsigned i = 1; i <= g.part.s(); ++i)
      rn["alpha_" + std::to_string(i)] = "alpha_" + std::to_string(cmap[i - 1] + 1);
    for (const auto& [ij, cn] : g.sigma) {
      rn[pair_name("gamma", ij.first, ij.second)] =
          pair_name("gamma", cmap[ij.first - 1] + 1, cmap[ij.second - 1] + 1);
      rn[pair_name("b", ij.first, ij.second)] =
          pair_name("b", cmap[ij.first - 1] + 1, cmap[ij.second - 1] + 1);
    }
    for (const auto& [ij, cn] : g.delta1) {
      rn[pair_name("delta", ij.first, ij.second)] =
          pair_name("delta", cmap[ij.first - 1] + 1, ij.second);
      rn[pair_name("m", ij.first, ij.second)] =
          pair_name("m", cmap[ij.first - 1] + 1, ij.second);
    }
    for (const auto& [ij, cn] : g.delta2) {
      rn[pair_name("epsilon", ij.first, ij.second)] =
          pair_name("epsilon", ij.first, cmap[ij.second - 1] + 1);
      rn[pair_name("o", ij.first, ij.second)] =
          pair_name("o", ij.first, cmap[ij.second - 1] + 1);
    }
    // lambda by position
    std::size_t pos = 0;
    for (unsigned i = 0; i < g.part.s(); ++i)
      for (unsigned j = 0; j < g.part.class_sizes[i]; ++j, ++pos)
        rn[pair_name("lambda", i + 1, j + 1)] =
            pair_name("lambda", pos_class[pos] + 1, pos_member[pos] + 1);
    // mu and a are shared verbatim
    Pred p = g.r;
    // apply the rename by rebuilding names list
    std::vector<std::string> renamed;
    for (const auto& v : g.r.ring->vars) {
      auto it = rn.find(v);
      renamed.push_back(it == rn.end() ? v : it->second);
    }
    Pred q = p;
    q.ring = make_ring(tower, renamed);
    return q;
  };
  Pred ra = rename_pred(a, ma);
  Pred rb = rename_pred(b, mb);
  out.r = conjoin_general(out, ra, rb, tower);
  return out;
}

// ---------------------------------------------------------------------------
// Projection.

GeneralCoreFormula project(const GeneralCoreFormula& gcf, unsigned k,
                           const std::vector<unsigned>& l, const Fragment& frag,
                           bool eliminate_pass) {
  gcf_validate(gcf, frag);
  unsigned s = gcf.part.s();
  unsigned t = gcf.part.t();
  if (k < 1 || k > s + t) throw bad_index("projection class index out of range");
  bool param_block = k > s;
  unsigned size = param_block ? gcf.part.param_sizes[k - s - 1]
                              : gcf.part.class_sizes[k - 1];
  if (l.empty()) throw bad_index("projection member set is empty");
  std::set<unsigned> lset(l.begin(), l.end());
  for (unsigned m : lset)
    if (m < 1 || m > size) throw bad_index("projection member index out of range");
  bool full = lset.size() == size;

  GeneralCoreFormula out = gcf;
  std::map<std::string, std::string> rn;       // survivors: old -> new name
  std::vector<std::string> quantified;         // old names moving into the bound block
  // chain pairs whose scaffolding (E, ladder atoms, c-chains) gets deleted;
  // their polynomial consequences move into R before quantification
  struct DeletedChain {
    int kind;  // 0 sigma, 1 delta1, 2 delta2
    unsigned i, j, n;
  };
  std::vector<DeletedChain> deleted_chains;

  auto renumber_members = [&](const char* fam, unsigned cls, unsigned old_size) {
    unsigned next = 1;
    for (unsigned j = 1; j <= old_size; ++j) {
      if (lset.count(j)) {
        quantified.push_back(pair_name(fam, cls, j));
      } else {
        rn[pair_name(fam, cls, j)] = pair_name(fam, cls, next++);
      }
    }
  };

  if (!full) {
    // cases 1 and 3: only the B/A coordinates of the removed members move
    if (param_block) {
      unsigned i0 = k - s;
      renumber_members("mu", i0, size);
      out.part.param_sizes[i0 - 1] = size - static_cast<unsigned>(lset.size());
    } else {
      renumber_members("lambda", k, size);
      out.part.class_sizes[k - 1] = size - static_cast<unsigned>(lset.size());
    }
  } else if (param_block) {
    // case 2: the parameter h_{k-s} becomes redundant
    unsigned i0 = k - s;
    for (unsigned j = 1; j <= size; ++j) quantified.push_back(pair_name("mu", i0, j));
    ChainMap d1, d2;
    for (const auto& [ij, cn] : gcf.delta1) {
      if (ij.second == i0) {
        quantified.push_back(pair_name("delta", ij.first, ij.second));
        quantified.push_back(pair_name("m", ij.first, ij.second));
        deleted_chains.push_back({1, ij.first, ij.second, cn});
      } else {
        unsigned j2 = ij.second > i0 ? ij.second - 1 : ij.second;
        d1[{ij.first, j2}] = cn;
        rn[pair_name("delta", ij.first, ij.second)] = pair_name("delta", ij.first, j2);
        rn[pair_name("m", ij.first, ij.second)] = pair_name("m", ij.first, j2);
      }
    }
    for (const auto& [ij, cn] : gcf.delta2) {
      if (ij.first == i0) {
        quantified.push_back(pair_name("epsilon", ij.first, ij.second));
        quantified.push_back(pair_name("o", ij.first, ij.second));
        deleted_chains.push_back({2, ij.first, ij.second, cn});
      } else {
        unsigned i2 = ij.first > i0 ? ij.first - 1 : ij.first;
        d2[{i2, ij.second}] = cn;
        rn[pair_name("epsilon", ij.first, ij.second)] = pair_name("epsilon", i2, ij.second);
        rn[pair_name("o", ij.first, ij.second)] = pair_name("o", i2, ij.second);
      }
    }
    // remaining mu blocks shift down
    for (unsigned i = i0 + 1; i <= t; ++i)
      for (unsigned j = 1; j <= gcf.part.param_sizes[i - 1]; ++j)
        rn[pair_name("mu", i, j)] = pair_name("mu", i - 1, j);
    out.delta1 = d1;
    out.delta2 = d2;
    out.part.param_sizes.erase(out.part.param_sizes.begin() + (i0 - 1));
    out.params.erase(out.params.begin() + (i0 - 1));
  } else {
    // case 4: f_k becomes redundant
    quantified.push_back("alpha_" + std::to_string(k));
    for (unsigned j = 1; j <= size; ++j) quantified.push_back(pair_name("lambda", k, j));
    for (unsigned i = k + 1; i <= s; ++i)
      rn["alpha_" + std::to_string(i)] = "alpha_" + std::to_string(i - 1);
    auto shift = [&](unsigned i) { return i > k ? i - 1 : i; };
    ChainMap sg, d1, d2;
    for (const auto& [ij, cn] : gcf.sigma) {
      if (ij.first == k || ij.second == k) {
        quantified.push_back(pair_name("gamma", ij.first, ij.second));
        quantified.push_back(pair_name("b", ij.first, ij.second));
        deleted_chains.push_back({0, ij.first, ij.second, cn});
      } else {
        sg[{shift(ij.first), shift(ij.second)}] = cn;
        rn[pair_name("gamma", ij.first, ij.second)] =
            pair_name("gamma", shift(ij.first), shift(ij.second));
        rn[pair_name("b", ij.first, ij.second)] =
            pair_name("b", shift(ij.first), shift(ij.second));
      }
    }
    for (const auto& [ij, cn] : gcf.delta1) {
      if (ij.first == k) {
        quantified.push_back(pair_name("delta", ij.first, ij.second));
        quantified.push_back(pair_name("m", ij.first, ij.second));
        deleted_chains.push_back({1, ij.first, ij.second, cn});
      } else {
        d1[{shift(ij.first), ij.second}] = cn;
        rn[pair_name("delta", ij.first, ij.second)] =
            pair_name("delta", shift(ij.first), ij.second);
        rn[pair_name("m", ij.first, ij.second)] = pair_name("m", shift(ij.first), ij.second);
      }
    }
    for (const auto& [ij, cn] : gcf.delta2) {
      if (ij.second == k) {
        quantified.push_back(pair_name("epsilon", ij.first, ij.second));
        quantified.push_back(pair_name("o", ij.first, ij.second));
        deleted_chains.push_back({2, ij.first, ij.second, cn});
      } else {
        d2[{ij.first, shift(ij.second)}] = cn;
        rn[pair_name("epsilon", ij.first, ij.second)] =
            pair_name("epsilon", ij.first, shift(ij.second));
        rn[pair_name("o", ij.first, ij.second)] = pair_name("o", ij.first, shift(ij.second));
      }
    }
    // lambdas of later classes shift down
    for (unsigned i = k + 1; i <= s; ++i)
      for (unsigned j = 1; j <= gcf.part.class_sizes[i - 1]; ++j)
        rn[pair_name("lambda", i, j)] = pair_name("lambda", i - 1, j);
    out.sigma = sg;
    out.delta1 = d1;
    out.delta2 = d2;
    out.part.class_sizes.erase(out.part.class_sizes.begin() + (k - 1));
  }

  // Saturate R with the polynomial consequences of the deleted chain
  // scaffolding: the base gap, the witness square, and membership of the
  // group factor in F[N]. They hold at every satisfying assignment of the
  // original formula, so conjoining them preserves its meaning; without
  // them the bare quantified R would overshoot.
  Pred r_aug = gcf.r;
  if (!deleted_chains.empty()) {
    const PolyRing& oring = *gcf.r.ring;
    TowerPtr otw = oring.tower;
    unsigned nroot = otw->root_order();
    auto var_poly = [&](const std::string& name) {
      int i = oring.index_of(name);
      if (i < 0) throw error("project: missing variable " + name);
      return poly_var(oring, static_cast<std::size_t>(i));
    };
    auto pow_poly = [&](const Poly& p, unsigned e) {
      Poly acc = poly_const(oring, otw->one());
      for (unsigned x = 0; x < e; ++x) acc = poly_mul(oring, acc, p);
      return acc;
    };
    std::vector<Poly> ids;
    for (const auto& d : deleted_chains) {
      if (d.kind == 0) {
        Poly ai = var_poly("alpha_" + std::to_string(d.i));
        Poly aj = var_poly("alpha_" + std::to_string(d.j));
        Poly gap = poly_sub(oring, poly_sub(oring, aj, ai),
                            poly_const(oring, otw->from_int(d.n)));
        ids.push_back(gap);
        Poly prod = poly_const(oring, otw->one());
        for (unsigned m = 0; m < d.n; ++m)
          prod = poly_mul(oring, prod,
                          poly_add(oring, ai, poly_const(oring, otw->from_int(m))));
        Poly bvar = var_poly(pair_name("b", d.i, d.j));
        ids.push_back(poly_sub(oring, poly_mul(oring, bvar, bvar), prod));
        Poly gvar = var_poly(pair_name("gamma", d.i, d.j));
        ids.push_back(poly_sub(oring, pow_poly(gvar, nroot),
                               poly_const(oring, otw->one())));
      } else if (d.kind == 1) {
        Scalar beta = frag.base_value(gcf.params[d.j - 1].base_id);
        Poly ai = var_poly("alpha_" + std::to_string(d.i));
        Poly gap = poly_sub(oring, poly_add(oring, ai, poly_const(oring, otw->from_int(d.n))),
                            poly_const(oring, beta));
        ids.push_back(gap);
        Poly prod = poly_const(oring, otw->one());
        for (unsigned m = 0; m < d.n; ++m)
          prod = poly_mul(oring, prod,
                          poly_add(oring, ai, poly_const(oring, otw->from_int(m))));
        Poly mvar = var_poly(pair_name("m", d.i, d.j));
        ids.push_back(poly_sub(oring, poly_mul(oring, mvar, mvar), prod));
        Poly dvar = var_poly(pair_name("delta", d.i, d.j));
        ids.push_back(poly_sub(oring, pow_poly(dvar, nroot),
                               poly_const(oring, otw->one())));
      } else {
        Scalar beta = frag.base_value(gcf.params[d.i - 1].base_id);
        Poly aj = var_poly("alpha_" + std::to_string(d.j));
        Poly gap = poly_sub(oring, aj,
                            poly_const(oring, beta + otw->from_int(d.n)));
        ids.push_back(gap);
        Scalar prod = otw->one();
        for (unsigned m = 0; m < d.n; ++m) prod = prod * (beta + otw->from_int(m));
        Poly ovar = var_poly(pair_name("o", d.i, d.j));
        ids.push_back(poly_sub(oring, poly_mul(oring, ovar, ovar),
                               poly_const(oring, prod)));
        Poly evar = var_poly(pair_name("epsilon", d.i, d.j));
        ids.push_back(poly_sub(oring, pow_poly(evar, nroot),
                               poly_const(oring, otw->one())));
      }
    }
    for (auto& cell : r_aug.cells)
      cell.eqs.insert(cell.eqs.end(), ids.begin(), ids.end());
  }

  // assemble the new ring: fresh bound names for the quantified block
  TowerPtr tower = gcf.r.ring->tower;
  std::vector<std::string> vars = gcf_free_vars(out);
  std::set<std::string> used(vars.begin(), vars.end());
  std::vector<std::string> bound;
  for (const auto& bn : gcf.r.bound) {
    vars.push_back(bn);
    bound.push_back(bn);
    used.insert(bn);
  }
  unsigned counter = 900;
  for (const auto& qn : quantified) {
    ParsedName pn = parse_name(qn);
    std::string fresh;
    do {
      fresh = pn.family + "_" + std::to_string(++counter);
    } while (used.count(fresh));
    rn[qn] = fresh;
    vars.push_back(fresh);
    bound.push_back(fresh);
    used.insert(fresh);
  }
  PolyRingPtr ring = make_ring(tower, vars);
  std::vector<std::size_t> to_index(gcf.r.ring->nvars());
  for (std::size_t i = 0; i < gcf.r.ring->nvars(); ++i) {
    std::string name = gcf.r.ring->vars[i];
    auto it = rn.find(name);
    if (it != rn.end()) name = it->second;
    int idx = ring->index_of(name);
    if (idx < 0) throw error("project: variable " + name + " lost in renaming");
    to_index[i] = static_cast<std::size_t>(idx);
  }
  out.r = pred_map_vars(r_aug, ring, to_index);
  out.r.bound = bound;

  if (eliminate_pass) {
    if (out.r.cells.size() != 1 || !out.r.cells[0].negs.empty())
      throw error("eliminate pass requires a pure equation system");
    PolySystem sys;
    sys.ring = ring;
    sys.polys = out.r.cells[0].eqs;
    std::set<std::string> drop(out.r.bound.begin(), out.r.bound.end());
    PolySystem elim = eliminate(sys, drop);
    // the elimination ring is the free variables in original order
    Pred flat = pred_from_system(elim);
    out.r = flat;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parameter substitution.

std::vector<GeneralCoreFormula> substitute_params(const GeneralCoreFormula& gcf,
                                                  const std::vector<unsigned>& positions,
                                                  const std::vector<BundleVector>& values,
                                                  const Fragment& frag) {
  gcf_validate(gcf, frag);
  if (gcf.part.t() != 0) throw bad_index("substitute_params expects a core formula (t = 0)");
  if (positions.size() != values.size()) throw bad_index("positions/values length mismatch");
  unsigned s = gcf.part.s();
  unsigned n = gcf.part.n();
  std::map<unsigned, BundleVector> sub;  // 1-based position -> value
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] < 1 || positions[i] > n) throw bad_index("position out of range");
    if (!sub.emplace(positions[i], values[i]).second)
      throw bad_index("duplicate substitution position");
    if (frag.is_infinite(values[i].base_id))
      throw out_of_fragment("substituted value lies over infinity");
  }

  // classify classes: touched classes become parameter classes
  std::vector<unsigned> pos_class(n), pos_member(n);
  {
    std::size_t pos = 0;
    for (unsigned i = 0; i < s; ++i)
      for (unsigned j = 0; j < gcf.part.class_sizes[i]; ++j, ++pos) {
        pos_class[pos] = i;
        pos_member[pos] = j;
      }
  }
  std::set<unsigned> touched;
  for (const auto& [p, v] : sub) touched.insert(pos_class[p - 1]);

  // substituted values within a class must share one fiber
  std::map<unsigned, std::size_t> class_fiber;
  for (const auto& [p, v] : sub) {
    unsigned cls = pos_class[p - 1];
    auto it = class_fiber.find(cls);
    if (it == class_fiber.end())
      class_fiber[cls] = v.base_id;
    else if (it->second != v.base_id)
      return {};  // contradictory substitution: empty disjunction
  }

  // new class indexing: untouched classes keep order; touched classes in
  // old order become the parameter block
  std::vector<unsigned> new_class(s, 0), param_class(s, 0);
  unsigned s2 = 0, t2 = 0;
  for (unsigned i = 0; i < s; ++i) {
    if (touched.count(i))
      param_class[i] = t2++;
    else
      new_class[i] = s2++;
  }

  GeneralCoreFormula shape;
  shape.num_a = gcf.num_a;
  shape.part.class_sizes.assign(s2, 0);
  shape.part.param_sizes.assign(t2, 0);
  // member renumbering per class (touched classes: remaining members)
  std::map<unsigned, std::map<unsigned, unsigned>> member_map;  // class -> old member -> new
  {
    std::size_t pos = 0;
    for (unsigned i = 0; i < s; ++i) {
      unsigned next = 0;
      for (unsigned j = 0; j < gcf.part.class_sizes[i]; ++j, ++pos) {
        bool substituted = sub.count(static_cast<unsigned>(pos + 1)) > 0;
        if (substituted) continue;
        member_map[i][j] = next++;
      }
      if (touched.count(i))
        shape.part.param_sizes[param_class[i]] = next;
      else
        shape.part.class_sizes[new_class[i]] = next;
    }
  }
  // chain redistribution: untouched pairs stay in Sigma, mixed pairs move
  // to D_1/D_2, fully substituted pairs collapse to constants below
  for (const auto& [ij, cn] : gcf.sigma) {
    unsigned i = ij.first - 1, j = ij.second - 1;
    bool ti = touched.count(i) > 0, tj = touched.count(j) > 0;
    if (!ti && !tj) {
      shape.sigma[{new_class[i] + 1, new_class[j] + 1}] = cn;
    } else if (!ti && tj) {
      shape.delta1[{new_class[i] + 1, param_class[j] + 1}] = cn;
    } else if (ti && !tj) {
      shape.delta2[{param_class[i] + 1, new_class[j] + 1}] = cn;
    }
  }

  // enumerate canonical-basis choices per touched class
  std::vector<unsigned> touched_list(touched.begin(), touched.end());
  unsigned N = frag.n;
  std::vector<GeneralCoreFormula> disjuncts;
  for_each_tuple(N, touched_list.size(), [&](const std::vector<unsigned>& choice) {
    GeneralCoreFormula d = shape;
    // parameters in param-class order
    d.params.assign(t2, BundleVector{});
    std::map<unsigned, unsigned> choice_of;  // old class -> basis index
    for (std::size_t ti = 0; ti < touched_list.size(); ++ti) {
      unsigned cls = touched_list[ti];
      choice_of[cls] = choice[ti];
      d.params[param_class[cls]] = frag.basis_element(class_fiber[cls], choice[ti]);
    }

    // build the new ring and the substitution/renaming of R
    TowerPtr tower = gcf.r.ring->tower;
    std::vector<std::string> vars = gcf_free_vars(d);
    std::vector<std::string> bound = gcf.r.bound;
    for (const auto& bn : bound) vars.push_back(bn);
    PolyRingPtr ring = make_ring(tower, vars);

    // old variable -> (new index) or constant value
    std::vector<std::optional<Scalar>> constants(gcf.r.ring->nvars());
    std::vector<std::size_t> to_index(gcf.r.ring->nvars(), 0);
    std::vector<bool> is_const(gcf.r.ring->nvars(), false);
    bool ok = true;
    for (std::size_t v = 0; v < gcf.r.ring->nvars() && ok; ++v) {
      const std::string& name = gcf.r.ring->vars[v];
      if (std::find(bound.begin(), bound.end(), name) != bound.end()) {
        to_index[v] = static_cast<std::size_t>(ring->index_of(name));
        continue;
      }
      ParsedName pn = parse_name(name);
      auto assign_const = [&](Scalar c) {
        is_const[v] = true;
        constants[v] = std::move(c);
      };
      if (pn.family == "alpha") {
        unsigned i = pn.idx[0] - 1;
        if (touched.count(i)) {
          assign_const(frag.base_value(class_fiber[i]));
        } else {
          to_index[v] = static_cast<std::size_t>(
              ring->index_of("alpha_" + std::to_string(new_class[i] + 1)));
        }
      } else if (pn.family == "lambda") {
        unsigned i = pn.idx[0] - 1, j = pn.idx[1] - 1;
        // locate the linear position
        std::size_t pos = 0;
        for (unsigned c2 = 0; c2 < i; ++c2) pos += gcf.part.class_sizes[c2];
        pos += j;
        auto subit = sub.find(static_cast<unsigned>(pos + 1));
        if (subit != sub.end()) {
          // lambda is pinned: value = lambda * h_i
          unsigned kh = choice_of[i];
          assign_const(frag.tower->zeta_pow(-static_cast<long>(kh)) *
                       subit->second.scalar);
        } else if (touched.count(i)) {
          to_index[v] = static_cast<std::size_t>(ring->index_of(
              pair_name("mu", param_class[i] + 1, member_map[i][j] + 1)));
        } else {
          to_index[v] = static_cast<std::size_t>(ring->index_of(
              pair_name("lambda", new_class[i] + 1, member_map[i][j] + 1)));
        }
      } else if (pn.family == "gamma" || pn.family == "b") {
        unsigned i = pn.idx[0] - 1, j = pn.idx[1] - 1;
        bool ti = touched.count(i), tj = touched.count(j);
        const char* gfam;
        unsigned ni, nj;
        if (!ti && !tj) {
          gfam = pn.family == "gamma" ? "gamma" : "b";
          ni = new_class[i] + 1;
          nj = new_class[j] + 1;
        } else if (!ti && tj) {
          gfam = pn.family == "gamma" ? "delta" : "m";
          ni = new_class[i] + 1;
          nj = param_class[j] + 1;
        } else if (ti && !tj) {
          gfam = pn.family == "gamma" ? "epsilon" : "o";
          ni = param_class[i] + 1;
          nj = new_class[j] + 1;
        } else {
          // both substituted: the witnesses are fixed by the choices
          unsigned cn = gcf.sigma.at({i + 1, j + 1});
          BundleVector w =
              apply_a_pow(frag, frag.basis_element(class_fiber[i], 0), cn);
          if (w.base_id != class_fiber[j]) {
            ok = false;
            break;
          }
          unsigned kh_i = choice_of[i];
          unsigned kh_j = choice_of[j];
          // g1 = basis(fiber_j, kh_i shift 0 target): take the exact image of
          // h_i; b1 = zeta^{kh_i} * image coordinate, g1 index 0 convention
          Scalar b1 = frag.tower->zeta_pow(static_cast<long>(kh_i)) * w.scalar;
          Scalar g1coef = frag.tower->one();  // g1 = basis(fiber_j, 0)
          (void)g1coef;
          if (pn.family == "b") {
            assign_const(b1);
          } else {
            // g1 = gamma1 * h_j with h_j = basis(fiber_j, kh_j)
            assign_const(frag.tower->zeta_pow(-static_cast<long>(kh_j)));
          }
          continue;
        }
        to_index[v] = static_cast<std::size_t>(ring->index_of(pair_name(gfam, ni, nj)));
      } else if (pn.family == "a") {
        to_index[v] = static_cast<std::size_t>(ring->index_of(name));
      } else {
        throw error("unexpected variable family in core formula: " + name);
      }
    }
    if (!ok) return false;  // skip impossible disjunct

    // apply: partial-evaluate the constants, then reindex
    Pred mapped;
    mapped.ring = ring;
    mapped.bound = bound;
    for (const auto& cell : gcf.r.cells) {
      Cell c2;
      auto transfer = [&](const Poly& p) {
        Poly pe = poly_partial_eval(*gcf.r.ring, p, constants);
        return poly_reindex(pe, to_index, ring->nvars());
      };
      for (const auto& q : cell.eqs) c2.eqs.push_back(transfer(q));
      for (const auto& neg : cell.negs) {
        std::vector<Poly> ns;
        for (const auto& q : neg) ns.push_back(transfer(q));
        c2.negs.push_back(std::move(ns));
      }
      mapped.cells.push_back(std::move(c2));
    }
    d.r = mapped;
    disjuncts.push_back(std::move(d));
    return false;  // keep enumerating
  });
  return disjuncts;
}

PolySystem v_r_closure(const GeneralCoreFormula& gcf) {
  if (gcf.r.cells.size() != 1 || !gcf.r.cells[0].negs.empty())
    throw error("V_R diagnostic requires a single equation-system cell");
  PolySystem sys;
  sys.ring = gcf.r.ring;
  sys.polys = gcf.r.cells[0].eqs;
  std::set<std::string> drop;
  for (const auto& v : gcf.r.ring->vars)
    if (v.rfind("alpha_", 0) != 0) drop.insert(v);
  return eliminate(sys, drop);
}

}  // namespace qho
