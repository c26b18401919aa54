#include "poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace qho {

unsigned mono_degree(const Mono& m) {
  unsigned d = 0;
  for (auto e : m) d += e;
  return d;
}

Mono mono_mul(const Mono& a, const Mono& b) {
  Mono r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = static_cast<std::uint16_t>(a[i] + b[i]);
  return r;
}

bool mono_divides(const Mono& a, const Mono& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

Mono mono_div(const Mono& b, const Mono& a) {
  Mono r(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = static_cast<std::uint16_t>(b[i] - a[i]);
  return r;
}

Mono mono_lcm(const Mono& a, const Mono& b) {
  Mono r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}

bool mono_less(const Mono& a, const Mono& b, MonoOrder order) {
  if (order == MonoOrder::lex) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  }
  unsigned da = mono_degree(a), db = mono_degree(b);
  if (da != db) return da < db;
  for (std::size_t i = a.size(); i-- > 0;)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

int PolyRing::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == name) return static_cast<int>(i);
  return -1;
}

PolyRingPtr make_ring(TowerPtr tower, std::vector<std::string> vars) {
  auto r = std::make_shared<PolyRing>();
  r->tower = std::move(tower);
  r->vars = std::move(vars);
  return r;
}

unsigned Poly::total_degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms) d = std::max(d, mono_degree(m));
  return d;
}

Poly poly_zero() { return Poly{}; }

Poly poly_const(const PolyRing& ring, const Scalar& c) {
  Poly p;
  if (!c.is_zero()) p.terms.emplace(Mono(ring.nvars(), 0), c);
  return p;
}

Poly poly_var(const PolyRing& ring, std::size_t var) {
  Poly p;
  Mono m(ring.nvars(), 0);
  m[var] = 1;
  p.terms.emplace(std::move(m), ring.tower->one());
  return p;
}

void poly_add_term(const PolyRing& ring, Poly& p, const Mono& m, const Scalar& c) {
  if (c.is_zero()) return;
  auto it = p.terms.find(m);
  if (it == p.terms.end()) {
    p.terms.emplace(m, ring.tower->lift(c));
    return;
  }
  Scalar s = it->second + c;
  if (s.is_zero())
    p.terms.erase(it);
  else
    it->second = s;
}

Poly poly_add(const PolyRing& ring, const Poly& a, const Poly& b) {
  Poly r = a;
  for (const auto& [m, c] : b.terms) poly_add_term(ring, r, m, c);
  return r;
}

Poly poly_sub(const PolyRing& ring, const Poly& a, const Poly& b) {
  return poly_add(ring, a, poly_neg(b));
}

Poly poly_neg(const Poly& a) {
  Poly r = a;
  for (auto& [m, c] : r.terms) c = -c;
  return r;
}

Poly poly_mul(const PolyRing& ring, const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ma, ca] : a.terms)
    for (const auto& [mb, cb] : b.terms) poly_add_term(ring, r, mono_mul(ma, mb), ca * cb);
  return r;
}

Poly poly_scale(const PolyRing& ring, const Poly& a, const Scalar& c) {
  Poly r;
  for (const auto& [m, v] : a.terms) poly_add_term(ring, r, m, v * c);
  return r;
}

std::pair<Mono, Scalar> leading_term(const Poly& p, MonoOrder order) {
  if (p.is_zero()) throw error("leading term of zero polynomial");
  auto best = p.terms.begin();
  for (auto it = std::next(p.terms.begin()); it != p.terms.end(); ++it)
    if (mono_less(best->first, it->first, order)) best = it;
  return *best;
}

Scalar poly_eval(const PolyRing& ring, const Poly& p,
                 const std::vector<std::optional<Scalar>>& assignment) {
  Scalar acc = ring.tower->zero();
  for (const auto& [m, c] : p.terms) {
    Scalar term = c;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (!assignment[i].has_value()) throw error("unassigned variable in poly_eval");
      term = term * pow(*assignment[i], m[i]);
    }
    acc = acc + term;
  }
  return acc;
}

Poly poly_partial_eval(const PolyRing& ring, const Poly& p,
                       const std::vector<std::optional<Scalar>>& assignment) {
  Poly r;
  for (const auto& [m, c] : p.terms) {
    Scalar coef = c;
    Mono rest(m.size(), 0);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (assignment[i].has_value())
        coef = coef * pow(*assignment[i], m[i]);
      else
        rest[i] = m[i];
    }
    poly_add_term(ring, r, rest, coef);
  }
  return r;
}

PolySystem make_system(PolyRingPtr ring, std::vector<Poly> polys) {
  PolySystem s;
  s.ring = std::move(ring);
  for (auto& p : polys)
    if (!p.is_zero()) s.polys.push_back(std::move(p));
  return s;
}

void check_system_guards(const PolySystem& sys) {
  std::set<std::size_t> used;
  for (const auto& p : sys.polys) {
    if (p.total_degree() > kMaxInputDegree)
      throw guard_error("polynomial exceeds degree guard (" +
                        std::to_string(kMaxInputDegree) + ")");
    for (const auto& [m, c] : p.terms)
      for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i]) used.insert(i);
  }
  if (used.size() > kMaxSystemVars)
    throw guard_error("system exceeds variable guard (" +
                      std::to_string(kMaxSystemVars) + ")");
}

VarSubst identity_subst(const PolyRing& ring) {
  VarSubst s;
  for (std::size_t i = 0; i < ring.nvars(); ++i) s.map.emplace_back(i, ring.tower->one());
  return s;
}

Poly poly_substitute(const PolyRing& ring, const Poly& p, const VarSubst& subst) {
  Poly r;
  for (const auto& [m, c] : p.terms) {
    Scalar coef = c;
    Mono target(ring.nvars(), 0);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      const auto& [tv, tc] = subst.map[i];
      target[tv] = static_cast<std::uint16_t>(target[tv] + m[i]);
      coef = coef * pow(tc, m[i]);
    }
    poly_add_term(ring, r, target, coef);
  }
  return r;
}

PolySystem system_substitute(const PolySystem& sys, const VarSubst& subst) {
  PolySystem out;
  out.ring = sys.ring;
  for (const auto& p : sys.polys) {
    Poly q = poly_substitute(*sys.ring, p, subst);
    if (!q.is_zero()) out.polys.push_back(std::move(q));
  }
  return out;
}

Poly poly_reindex(const Poly& p, const std::vector<std::size_t>& to_index,
                  std::size_t target_nvars) {
  Poly r;
  for (const auto& [m, c] : p.terms) {
    Mono t(target_nvars, 0);
    // accumulate: distinct source variables may be identified
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i]) t[to_index[i]] = static_cast<std::uint16_t>(t[to_index[i]] + m[i]);
    auto it = r.terms.find(t);
    if (it == r.terms.end()) {
      r.terms.emplace(std::move(t), c);
    } else {
      Scalar sum = it->second + c;
      if (sum.is_zero())
        r.terms.erase(it);
      else
        it->second = sum;
    }
  }
  return r;
}

std::string poly_to_string(const PolyRing& ring, const Poly& p) {
  if (p.is_zero()) return "0";
  // grevlex-descending for readability
  std::vector<const std::pair<const Mono, Scalar>*> ts;
  for (const auto& t : p.terms) ts.push_back(&t);
  std::sort(ts.begin(), ts.end(), [](auto* a, auto* b) {
    return mono_less(b->first, a->first, MonoOrder::grevlex);
  });
  auto composite = [](const std::string& s) {
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      char ch = s[i];
      if (ch == '(' || ch == '{') ++depth;
      if (ch == ')' || ch == '}') --depth;
      if (depth == 0 && i > 0 && (ch == '+' || ch == '-')) return true;
      if (depth == 0 && (ch == '*' || ch == '/')) return true;
    }
    return false;
  };
  std::ostringstream out;
  bool first = true;
  for (auto* tp : ts) {
    const Mono& m = tp->first;
    std::string cs = tp->second.to_string();
    std::string vars;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i]) continue;
      if (!vars.empty()) vars += "*";
      vars += ring.vars[i];
      if (m[i] > 1) vars += "^" + std::to_string(m[i]);
    }
    std::string term;
    if (vars.empty()) {
      term = composite(cs) ? "(" + cs + ")" : cs;
    } else if (cs == "1") {
      term = vars;
    } else if (cs == "-1") {
      term = "-" + vars;
    } else {
      term = (composite(cs) ? "(" + cs + ")" : cs) + "*" + vars;
    }
    if (first) {
      out << term;
      first = false;
    } else if (!term.empty() && term[0] == '-') {
      out << term;
    } else {
      out << "+" << term;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Polynomial parser.

namespace {

struct PolyParser {
  const std::string& s;
  std::size_t pos = 0;
  const std::vector<std::string>& vars;
  TowerPtr& tower;
  std::size_t nv;

  PolyParser(const std::string& text, const std::vector<std::string>& v, TowerPtr& tw)
      : s(text), vars(v), tower(tw), nv(v.size()) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) throw parse_error(std::string("expected '") + c + "'", pos);
  }

  PolyRing ring() const { return PolyRing{tower, vars}; }

  Poly parse_expr() {
    Poly acc = parse_term();
    for (;;) {
      skip_ws();
      if (eat('+')) {
        Poly rhs = parse_term();  // may extend the tower; build ring after
        PolyRing r = ring();
        acc = poly_add(r, acc, rhs);
      } else if (pos < s.size() && s[pos] == '-') {
        ++pos;
        Poly rhs = parse_term();
        PolyRing r = ring();
        acc = poly_sub(r, acc, rhs);
      } else {
        return acc;
      }
    }
  }

  Poly parse_term() {
    Poly acc = parse_factor();
    for (;;) {
      skip_ws();
      if (eat('*')) {
        Poly rhs = parse_factor();
        PolyRing r = ring();
        acc = poly_mul(r, acc, rhs);
      } else if (eat('/')) {
        Poly d = parse_factor();
        if (d.terms.size() != 1 || mono_degree(d.terms.begin()->first) != 0)
          throw parse_error("division only by scalar constants", pos);
        PolyRing r = ring();
        acc = poly_scale(r, acc, inv(d.terms.begin()->second));
      } else {
        return acc;
      }
    }
  }

  Poly parse_factor() {
    skip_ws();
    if (eat('-')) {
      return poly_neg(parse_factor());
    }
    Poly v = parse_primary();
    skip_ws();
    if (eat('^')) {
      skip_ws();
      if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
        throw parse_error("expected exponent", pos);
      unsigned e = 0;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        e = e * 10 + static_cast<unsigned>(s[pos] - '0');
        if (e > 64) throw parse_error("exponent too large", pos);
        ++pos;
      }
      PolyRing r = ring();
      Poly acc = poly_const(r, tower->one());
      for (unsigned i = 0; i < e; ++i) acc = poly_mul(r, acc, v);
      return acc;
    }
    return v;
  }

  Poly parse_primary() {
    skip_ws();
    if (pos >= s.size()) throw parse_error("unexpected end of polynomial", pos);
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      PolyRing r = ring();
      return poly_const(r, tower->from_rat(Rat(s.substr(start, pos - start))));
    }
    if (c == '(') {
      ++pos;
      Poly v = parse_expr();
      expect(')');
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      std::string word = s.substr(start, pos - start);
      if (word == "zeta") {
        PolyRing r = ring();
        return poly_const(r, tower->zeta());
      }
      if (word == "t") {
        PolyRing r = ring();
        return poly_const(r, tower->transcendental());
      }
      if (word == "sqrt") {
        skip_ws();
        if (pos >= s.size() || s[pos] != '{') throw parse_error("expected '{'", pos);
        // find the matching brace
        int depth = 0;
        std::size_t open = pos;
        std::size_t close = pos;
        for (; close < s.size(); ++close) {
          if (s[close] == '{') ++depth;
          if (s[close] == '}') {
            --depth;
            if (depth == 0) break;
          }
        }
        if (depth != 0) throw parse_error("unbalanced '{'", open);
        std::string inner = s.substr(open + 1, close - open - 1);
        pos = close + 1;
        Scalar r = parse_scalar(inner, tower);
        auto res = Tower::adjoin_sqrt(tower, r);
        tower = res.tower;
        PolyRing rr = ring();
        return poly_const(rr, res.root);
      }
      for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i] == word) {
          PolyRing r = ring();
          return poly_var(r, i);
        }
      }
      throw parse_error("unknown identifier '" + word + "'", start);
    }
    throw parse_error("unexpected character in polynomial", pos);
  }
};

}  // namespace

Poly parse_poly(const std::string& text, const std::vector<std::string>& vars,
                TowerPtr& tower) {
  PolyParser p(text, vars, tower);
  Poly v = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) throw parse_error("trailing input after polynomial", p.pos);
  // lift all coefficients to the final tower (sqrt may have extended it)
  PolyRing r{tower, vars};
  Poly out;
  for (const auto& [m, c] : v.terms) poly_add_term(r, out, m, tower->lift(c));
  return out;
}

}  // namespace qho
