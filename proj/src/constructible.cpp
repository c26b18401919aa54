#include "constructible.hpp"

#include <algorithm>
#include <sstream>

namespace qho {

bool Pred::is_true() const {
  return cells.size() == 1 && cells[0].eqs.empty() && cells[0].negs.empty();
}

Pred pred_true(PolyRingPtr ring) {
  Pred p;
  p.ring = std::move(ring);
  p.cells.push_back(Cell{});
  return p;
}

Pred pred_false(PolyRingPtr ring) {
  Pred p;
  p.ring = std::move(ring);
  return p;
}

Pred pred_from_system(const PolySystem& sys) {
  Pred p;
  p.ring = sys.ring;
  Cell c;
  c.eqs = sys.polys;
  p.cells.push_back(std::move(c));
  return p;
}

Pred pred_from_cell(PolyRingPtr ring, Cell cell) {
  Pred p;
  p.ring = std::move(ring);
  p.cells.push_back(std::move(cell));
  return p;
}

bool pred_is_closed_system(const Pred& p) {
  return p.bound.empty() && p.cells.size() == 1 && p.cells[0].negs.empty();
}

PolySystem pred_positive_system(const Pred& p) {
  if (!pred_is_closed_system(p)) throw error("predicate is not a closed system");
  PolySystem s;
  s.ring = p.ring;
  s.polys = p.cells[0].eqs;
  return s;
}

Pred pred_conjoin(const Pred& a, const Pred& b) {
  if (a.ring->vars != b.ring->vars) throw error("pred_conjoin: ring mismatch");
  Pred out;
  out.ring = a.ring;
  out.bound = a.bound;
  for (const auto& v : b.bound)
    if (std::find(out.bound.begin(), out.bound.end(), v) == out.bound.end())
      out.bound.push_back(v);
  for (const auto& ca : a.cells) {
    for (const auto& cb : b.cells) {
      Cell c = ca;
      c.eqs.insert(c.eqs.end(), cb.eqs.begin(), cb.eqs.end());
      c.negs.insert(c.negs.end(), cb.negs.begin(), cb.negs.end());
      out.cells.push_back(std::move(c));
    }
  }
  return out;
}

Pred pred_union(const Pred& a, const Pred& b) {
  if (a.ring->vars != b.ring->vars) throw error("pred_union: ring mismatch");
  Pred out = a;
  for (const auto& v : b.bound)
    if (std::find(out.bound.begin(), out.bound.end(), v) == out.bound.end())
      out.bound.push_back(v);
  out.cells.insert(out.cells.end(), b.cells.begin(), b.cells.end());
  return out;
}

PolySystem closed_union(const PolySystem& a, const PolySystem& b) {
  return ideal_intersect(a, b);
}

Pred pred_substitute(const Pred& p, const VarSubst& subst) {
  Pred out;
  out.ring = p.ring;
  out.bound = p.bound;
  for (const auto& cell : p.cells) {
    Cell c;
    for (const auto& q : cell.eqs) c.eqs.push_back(poly_substitute(*p.ring, q, subst));
    for (const auto& neg : cell.negs) {
      std::vector<Poly> ns;
      for (const auto& q : neg) ns.push_back(poly_substitute(*p.ring, q, subst));
      c.negs.push_back(std::move(ns));
    }
    out.cells.push_back(std::move(c));
  }
  return out;
}

bool cell_nonempty(const PolyRing& ring, const Cell& cell) {
  PolySystem pos;
  pos.ring = std::make_shared<PolyRing>(ring);
  for (const auto& q : cell.eqs)
    if (!q.is_zero()) pos.polys.push_back(q);
  // drop vanished negation systems; a neg with no nonzero polynomial can
  // never be avoided
  std::vector<std::vector<Poly>> negs;
  for (const auto& neg : cell.negs) {
    std::vector<Poly> ns;
    for (const auto& q : neg)
      if (!q.is_zero()) ns.push_back(q);
    if (ns.empty()) return false;  // ~(0 = 0)
    negs.push_back(std::move(ns));
  }
  if (ideal_trivial(pos)) return false;
  if (negs.empty()) return true;
  // union of the negated varieties = V(product ideal); the cell is nonempty
  // iff V(pos) is not contained in it, i.e. some product generator is not
  // in the radical of pos
  std::vector<Poly> products = negs[0];
  for (std::size_t i = 1; i < negs.size(); ++i) {
    std::vector<Poly> next;
    for (const auto& f : products)
      for (const auto& g : negs[i]) next.push_back(poly_mul(ring, f, g));
    products = std::move(next);
  }
  for (const auto& k : products)
    if (!radical_member(pos, k)) return true;
  return false;
}

bool pred_eval(const Pred& p, const std::vector<std::optional<Scalar>>& assignment) {
  const PolyRing& ring = *p.ring;
  std::vector<bool> is_bound(ring.nvars(), false);
  for (const auto& b : p.bound) {
    int i = ring.index_of(b);
    if (i < 0) throw error("bound variable not in ring: " + b);
    is_bound[static_cast<std::size_t>(i)] = true;
  }
  for (std::size_t i = 0; i < ring.nvars(); ++i)
    if (!is_bound[i] && !assignment[i].has_value())
      throw error("pred_eval: free variable " + ring.vars[i] + " unassigned");

  for (const auto& cell : p.cells) {
    if (p.bound.empty()) {
      bool ok = true;
      for (const auto& q : cell.eqs)
        if (!poly_eval(ring, q, assignment).is_zero()) {
          ok = false;
          break;
        }
      for (const auto& neg : cell.negs) {
        if (!ok) break;
        bool all_zero = true;
        for (const auto& q : neg)
          if (!poly_eval(ring, q, assignment).is_zero()) {
            all_zero = false;
            break;
          }
        if (all_zero) ok = false;  // the negated system holds: excluded
      }
      if (ok) return true;
      continue;
    }
    // substitute free values, then decide the bound block algebraically
    Cell inst;
    for (const auto& q : cell.eqs)
      inst.eqs.push_back(poly_partial_eval(ring, q, assignment));
    for (const auto& neg : cell.negs) {
      std::vector<Poly> ns;
      for (const auto& q : neg) ns.push_back(poly_partial_eval(ring, q, assignment));
      inst.negs.push_back(std::move(ns));
    }
    if (cell_nonempty(ring, inst)) return true;
  }
  return false;
}

namespace {

std::string cell_key(const PolyRing& ring, const Cell& c) {
  std::ostringstream out;
  for (const auto& q : c.eqs) out << poly_to_string(ring, q) << ";";
  out << "|";
  for (const auto& neg : c.negs) {
    for (const auto& q : neg) out << poly_to_string(ring, q) << ";";
    out << "/";
  }
  return out.str();
}

}  // namespace

Pred pred_canonical(const Pred& p) {
  Pred out;
  out.ring = p.ring;
  out.bound = p.bound;
  for (const auto& cell : p.cells) {
    PolySystem pos;
    pos.ring = p.ring;
    for (const auto& q : cell.eqs)
      if (!q.is_zero()) pos.polys.push_back(q);
    PolySystem gb = buchberger(pos);
    if (ideal_trivial(gb) && !gb.polys.empty()) continue;  // empty cell
    Cell c;
    c.eqs = gb.polys;
    bool impossible = false;
    std::vector<std::string> keys;
    std::vector<std::vector<Poly>> negs;
    for (const auto& neg : cell.negs) {
      PolySystem nsys;
      nsys.ring = p.ring;
      for (const auto& q : neg)
        if (!q.is_zero()) nsys.polys.push_back(q);
      if (nsys.polys.empty()) {
        impossible = true;  // ~(trivially true system)
        break;
      }
      PolySystem ngb = buchberger(nsys);
      if (ideal_trivial(ngb)) continue;  // negated empty set: vacuous
      negs.push_back(ngb.polys);
    }
    if (impossible) continue;
    // dedupe negations
    std::vector<std::string> seen;
    for (auto& neg : negs) {
      PolySystem tmp;
      tmp.ring = p.ring;
      tmp.polys = neg;
      std::string key;
      for (const auto& q : neg) key += poly_to_string(*p.ring, q) + ";";
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
      seen.push_back(key);
      c.negs.push_back(std::move(neg));
    }
    std::sort(c.negs.begin(), c.negs.end(),
              [&](const std::vector<Poly>& a, const std::vector<Poly>& b) {
                std::string ka, kb;
                for (const auto& q : a) ka += poly_to_string(*p.ring, q) + ";";
                for (const auto& q : b) kb += poly_to_string(*p.ring, q) + ";";
                return ka < kb;
              });
    out.cells.push_back(std::move(c));
  }
  // dedupe and order cells deterministically
  std::sort(out.cells.begin(), out.cells.end(), [&](const Cell& a, const Cell& b) {
    return cell_key(*p.ring, a) < cell_key(*p.ring, b);
  });
  out.cells.erase(std::unique(out.cells.begin(), out.cells.end(),
                              [&](const Cell& a, const Cell& b) {
                                return cell_key(*p.ring, a) == cell_key(*p.ring, b);
                              }),
                  out.cells.end());
  return out;
}

bool pred_equal(const Pred& a, const Pred& b) {
  if (a.ring->vars != b.ring->vars) return false;
  Pred ca = pred_canonical(a);
  Pred cb = pred_canonical(b);
  if (ca.bound != cb.bound) return false;
  if (ca.cells.size() != cb.cells.size()) return false;
  for (std::size_t i = 0; i < ca.cells.size(); ++i)
    if (cell_key(*ca.ring, ca.cells[i]) != cell_key(*cb.ring, cb.cells[i])) return false;
  return true;
}

Pred pred_map_vars(const Pred& p, PolyRingPtr new_ring,
                   const std::vector<std::size_t>& to_index) {
  Pred out;
  out.ring = new_ring;
  for (const auto& b : p.bound) out.bound.push_back(b);
  for (const auto& cell : p.cells) {
    Cell c;
    for (const auto& q : cell.eqs)
      c.eqs.push_back(poly_reindex(q, to_index, new_ring->nvars()));
    for (const auto& neg : cell.negs) {
      std::vector<Poly> ns;
      for (const auto& q : neg) ns.push_back(poly_reindex(q, to_index, new_ring->nvars()));
      c.negs.push_back(std::move(ns));
    }
    out.cells.push_back(std::move(c));
  }
  return out;
}

Pred pred_quantify(const Pred& p, const std::vector<std::string>& vars) {
  Pred out = p;
  for (const auto& v : vars) {
    if (p.ring->index_of(v) < 0) throw bad_index("pred_quantify: unknown variable " + v);
    if (std::find(out.bound.begin(), out.bound.end(), v) == out.bound.end())
      out.bound.push_back(v);
  }
  return out;
}

std::string pred_to_string(const Pred& p) {
  std::ostringstream out;
  if (!p.bound.empty()) {
    out << "exists";
    for (const auto& b : p.bound) out << " " << b;
    out << " . ";
  }
  bool first_cell = true;
  if (p.cells.empty()) out << "false";
  for (const auto& cell : p.cells) {
    if (!first_cell) out << " | ";
    first_cell = false;
    std::ostringstream cellout;
    bool first = true;
    for (const auto& q : cell.eqs) {
      if (!first) cellout << " & ";
      first = false;
      cellout << poly_to_string(*p.ring, q) << " = 0";
    }
    for (const auto& neg : cell.negs) {
      if (!first) cellout << " & ";
      first = false;
      if (neg.size() == 1) {
        cellout << poly_to_string(*p.ring, neg[0]) << " != 0";
      } else {
        cellout << "~(";
        bool f2 = true;
        for (const auto& q : neg) {
          if (!f2) cellout << " & ";
          f2 = false;
          cellout << poly_to_string(*p.ring, q) << " = 0";
        }
        cellout << ")";
      }
    }
    std::string body = cellout.str();
    if (body.empty()) body = "true";
    out << body;
  }
  return out.str();
}

}  // namespace qho
