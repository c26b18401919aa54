#include "formula.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace qho {

namespace {

const char* kHFamilies[] = {"e", "f", "g", "h", "p", "q"};
const char* kFFamilies[] = {"alpha", "gamma",  "delta", "epsilon", "b", "m",
                            "o",     "lambda", "mu",    "a",       "c"};

int family_rank(const std::string& fam) {
  int r = 0;
  for (const char* f : kFFamilies) {
    if (fam == f) return r;
    ++r;
  }
  for (const char* f : kHFamilies) {
    if (fam == f) return 100 + r;
    ++r;
  }
  return 1000;
}

// Canonical order of polynomial-atom variables, shared by the builders and
// the parser so round trips agree: field families first by rank and index,
// p(h) pseudo variables last.
bool atom_var_less(const std::string& a, const std::string& b) {
  auto key = [](const std::string& n) {
    if (n.rfind("p(", 0) == 0) {
      VarId inner = parse_var_id(n.substr(2, n.size() - 3));
      return std::pair<int, VarId>(500, inner);
    }
    return std::pair<int, VarId>(0, parse_var_id(n));
  };
  auto [ra, va] = key(a);
  auto [rb, vb] = key(b);
  if (ra != rb) return ra < rb;
  return va < vb;
}

}  // namespace

bool is_h_family(const std::string& family) {
  for (const char* f : kHFamilies)
    if (family == f) return true;
  return false;
}

bool is_f_family(const std::string& family) {
  for (const char* f : kFFamilies)
    if (family == f) return true;
  return false;
}

std::string VarId::name() const {
  std::string s = family;
  for (unsigned i : idx) s += "_" + std::to_string(i);
  return s;
}

bool VarId::operator<(const VarId& o) const {
  int ra = family_rank(family), rb = family_rank(o.family);
  if (ra != rb) return ra < rb;
  if (family != o.family) return family < o.family;
  return idx < o.idx;
}

SortTag sort_of(const VarId& v) {
  if (is_h_family(v.family)) return SortTag::H;
  if (is_f_family(v.family)) return SortTag::F;
  throw parse_error("unknown variable family: " + v.family);
}

VarId parse_var_id(const std::string& name) {
  std::size_t us = name.find('_');
  VarId v;
  v.family = name.substr(0, us);
  if (!is_h_family(v.family) && !is_f_family(v.family))
    throw parse_error("unknown variable family in '" + name + "'");
  std::size_t pos = us;
  while (pos != std::string::npos && pos < name.size()) {
    std::size_t next = name.find('_', pos + 1);
    std::string part = name.substr(pos + 1, next == std::string::npos
                                                ? std::string::npos
                                                : next - pos - 1);
    if (part.empty()) throw parse_error("malformed variable '" + name + "'");
    v.idx.push_back(static_cast<unsigned>(std::stoul(part)));
    pos = next;
  }
  return v;
}

FTerm FTerm::of_var(VarId v) {
  FTerm t;
  t.kind = Kind::var;
  t.var = std::move(v);
  return t;
}

FTerm FTerm::of_scalar(Scalar s) {
  FTerm t;
  t.kind = Kind::scalar;
  t.value = std::move(s);
  return t;
}

FTerm FTerm::of_proj(VarId h) {
  FTerm t;
  t.kind = Kind::proj;
  t.proj_arg = std::move(h);
  return t;
}

bool FTerm::operator==(const FTerm& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::var:
      return var == o.var;
    case Kind::scalar:
      return value == o.value;
    case Kind::proj:
      return proj_arg == o.proj_arg;
  }
  return false;
}

std::string FTerm::to_string() const {
  switch (kind) {
    case Kind::var:
      return var.name();
    case Kind::proj:
      return "p(" + proj_arg.name() + ")";
    case Kind::scalar: {
      std::string s = value.to_string();
      int depth = 0;
      bool composite = false;
      for (std::size_t i = 0; i < s.size(); ++i) {
        char ch = s[i];
        if (ch == '(' || ch == '{') ++depth;
        if (ch == ')' || ch == '}') --depth;
        if (depth == 0 && i > 0 && (ch == '+' || ch == '-')) composite = true;
      }
      return composite ? "(" + s + ")" : s;
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Formula construction.

namespace {

std::shared_ptr<Formula> node(Formula::Kind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}

}  // namespace

FormulaPtr f_true() {
  auto f = node(Formula::Kind::truth);
  f->truth_value = true;
  return f;
}

FormulaPtr f_false() {
  auto f = node(Formula::Kind::truth);
  f->truth_value = false;
  return f;
}

FormulaPtr f_and(std::vector<FormulaPtr> children) {
  std::vector<FormulaPtr> flat;
  for (auto& c : children) {
    if (!c) continue;
    if (c->kind == Formula::Kind::truth && c->truth_value) continue;
    if (c->kind == Formula::Kind::conj)
      flat.insert(flat.end(), c->children.begin(), c->children.end());
    else
      flat.push_back(c);
  }
  if (flat.empty()) return f_true();
  if (flat.size() == 1) return flat[0];
  auto f = node(Formula::Kind::conj);
  f->children = std::move(flat);
  return f;
}

FormulaPtr f_or(std::vector<FormulaPtr> children) {
  std::vector<FormulaPtr> flat;
  for (auto& c : children) {
    if (!c) continue;
    if (c->kind == Formula::Kind::truth && !c->truth_value) continue;
    if (c->kind == Formula::Kind::disj)
      flat.insert(flat.end(), c->children.begin(), c->children.end());
    else
      flat.push_back(c);
  }
  if (flat.empty()) return f_false();
  if (flat.size() == 1) return flat[0];
  auto f = node(Formula::Kind::disj);
  f->children = std::move(flat);
  return f;
}

FormulaPtr f_not(FormulaPtr x) {
  auto f = node(Formula::Kind::neg);
  f->children.push_back(std::move(x));
  return f;
}

FormulaPtr f_exists(std::vector<VarId> binders, FormulaPtr body) {
  if (binders.empty()) return body;
  auto f = node(Formula::Kind::exists);
  f->binders = std::move(binders);
  f->children.push_back(std::move(body));
  return f;
}

FormulaPtr f_atom_e(HTerm h, FTerm fiber) {
  auto f = node(Formula::Kind::atom_e);
  f->e_arg = std::move(h);
  f->e_fiber = std::move(fiber);
  return f;
}

FormulaPtr f_atom_ladder(bool dagger, unsigned steps, HTerm from, FTerm coef, HTerm to) {
  auto f = node(Formula::Kind::atom_ladder);
  f->dagger = dagger;
  f->steps = steps;
  f->lad_from = std::move(from);
  f->lad_coef = std::move(coef);
  f->lad_to = std::move(to);
  return f;
}

FormulaPtr f_atom_heq(HTerm lhs, std::optional<FTerm> coef, HTerm rhs) {
  auto f = node(Formula::Kind::atom_heq);
  f->heq_lhs = std::move(lhs);
  f->heq_coef = std::move(coef);
  f->heq_rhs = std::move(rhs);
  return f;
}

FormulaPtr f_atom_poly(PolyAtom atom) {
  auto f = node(Formula::Kind::atom_poly);
  f->poly = std::move(atom);
  return f;
}

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::truth:
      return a->truth_value == b->truth_value;
    case Formula::Kind::conj:
    case Formula::Kind::disj: {
      if (a->children.size() != b->children.size()) return false;
      for (std::size_t i = 0; i < a->children.size(); ++i)
        if (!formula_equal(a->children[i], b->children[i])) return false;
      return true;
    }
    case Formula::Kind::neg:
      return formula_equal(a->children[0], b->children[0]);
    case Formula::Kind::exists:
      return a->binders == b->binders && formula_equal(a->children[0], b->children[0]);
    case Formula::Kind::atom_e:
      return a->e_arg == b->e_arg && a->e_fiber == b->e_fiber;
    case Formula::Kind::atom_ladder:
      return a->dagger == b->dagger && a->steps == b->steps && a->lad_from == b->lad_from &&
             a->lad_coef == b->lad_coef && a->lad_to == b->lad_to;
    case Formula::Kind::atom_heq:
      return a->heq_lhs == b->heq_lhs && a->heq_coef == b->heq_coef &&
             a->heq_rhs == b->heq_rhs;
    case Formula::Kind::atom_poly:
      return a->poly == b->poly;
  }
  return false;
}

namespace {

void collect_free(const FormulaPtr& f, std::vector<VarId>& bound, std::vector<VarId>& out) {
  auto add = [&](const VarId& v) {
    if (std::find(bound.begin(), bound.end(), v) != bound.end()) return;
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  auto add_fterm = [&](const FTerm& t) {
    if (t.kind == FTerm::Kind::var) add(t.var);
    if (t.kind == FTerm::Kind::proj) add(t.proj_arg);
  };
  switch (f->kind) {
    case Formula::Kind::truth:
      break;
    case Formula::Kind::conj:
    case Formula::Kind::disj:
      for (const auto& c : f->children) collect_free(c, bound, out);
      break;
    case Formula::Kind::neg:
      collect_free(f->children[0], bound, out);
      break;
    case Formula::Kind::exists: {
      std::size_t before = bound.size();
      for (const auto& v : f->binders) bound.push_back(v);
      collect_free(f->children[0], bound, out);
      bound.resize(before);
      break;
    }
    case Formula::Kind::atom_e:
      add(f->e_arg.var);
      add_fterm(f->e_fiber);
      break;
    case Formula::Kind::atom_ladder:
      add(f->lad_from.var);
      add_fterm(f->lad_coef);
      add(f->lad_to.var);
      break;
    case Formula::Kind::atom_heq:
      add(f->heq_lhs.var);
      if (f->heq_coef) add_fterm(*f->heq_coef);
      add(f->heq_rhs.var);
      break;
    case Formula::Kind::atom_poly:
      for (const auto& name : f->poly.vars) {
        if (name.rfind("p(", 0) == 0) {
          add(parse_var_id(name.substr(2, name.size() - 3)));
        } else {
          add(parse_var_id(name));
        }
      }
      break;
  }
}

}  // namespace

std::vector<VarId> Formula::free_vars() const {
  std::vector<VarId> bound, out;
  collect_free(std::make_shared<Formula>(*this), bound, out);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Printer.

namespace {

void print_rec(const FormulaPtr& f, std::ostream& out) {
  switch (f->kind) {
    case Formula::Kind::truth:
      out << (f->truth_value ? "true" : "false");
      return;
    case Formula::Kind::conj: {
      bool first = true;
      for (const auto& c : f->children) {
        if (!first) out << " & ";
        first = false;
        if (c->kind == Formula::Kind::disj) {
          out << "(";
          print_rec(c, out);
          out << ")";
        } else {
          print_rec(c, out);
        }
      }
      return;
    }
    case Formula::Kind::disj: {
      bool first = true;
      for (const auto& c : f->children) {
        if (!first) out << " | ";
        first = false;
        print_rec(c, out);
      }
      return;
    }
    case Formula::Kind::neg: {
      const auto& c = f->children[0];
      bool atomic = c->kind != Formula::Kind::conj && c->kind != Formula::Kind::disj;
      out << "~";
      if (atomic) {
        print_rec(c, out);
      } else {
        out << "(";
        print_rec(c, out);
        out << ")";
      }
      return;
    }
    case Formula::Kind::exists: {
      out << "exists";
      for (const auto& v : f->binders) out << " " << v.name();
      out << " (";
      print_rec(f->children[0], out);
      out << ")";
      return;
    }
    case Formula::Kind::atom_e:
      out << "E(" << f->e_arg.var.name() << ", " << f->e_fiber.to_string() << ")";
      return;
    case Formula::Kind::atom_ladder: {
      out << (f->dagger ? "adag" : "a");
      if (f->steps != 1) out << "^" << f->steps;
      out << "(" << f->lad_from.var.name() << ") = " << f->lad_coef.to_string() << "*"
          << f->lad_to.var.name();
      return;
    }
    case Formula::Kind::atom_heq: {
      out << f->heq_lhs.var.name() << " = ";
      if (f->heq_coef) out << f->heq_coef->to_string() << "*";
      out << f->heq_rhs.var.name();
      return;
    }
    case Formula::Kind::atom_poly: {
      PolyRing ring;
      ring.vars = f->poly.vars;
      out << poly_to_string(ring, f->poly.lhs) << (f->poly.negated ? " != " : " = ")
          << poly_to_string(ring, f->poly.rhs);
      return;
    }
  }
}

}  // namespace

std::string print_formula(const FormulaPtr& f) {
  std::ostringstream out;
  print_rec(f, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// Parser.

namespace {

// Polynomial expression over named variables, used while parsing atoms
// (the variable set is discovered on the fly).
struct DynPoly {
  // monomial: name -> exponent
  std::map<std::map<std::string, unsigned>, Scalar> terms;
};

struct FormulaParser {
  const std::string& s;
  std::size_t pos = 0;
  TowerPtr& tower;

  FormulaParser(const std::string& text, TowerPtr& tw) : s(text), tower(tw) {}

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

  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  std::string peek_word() {
    skip_ws();
    std::size_t p = pos;
    std::string w;
    while (p < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[p])) || s[p] == '_')) {
      w += s[p];
      ++p;
    }
    return w;
  }

  std::string read_word() {
    skip_ws();
    std::string w;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) {
      w += s[pos];
      ++pos;
    }
    if (w.empty()) throw parse_error("expected identifier", pos);
    return w;
  }

  unsigned read_uint() {
    skip_ws();
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
      throw parse_error("expected integer", pos);
    unsigned v = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      v = v * 10 + static_cast<unsigned>(s[pos] - '0');
      ++pos;
    }
    return v;
  }

  FormulaPtr parse_disj() {
    std::vector<FormulaPtr> parts{parse_conj()};
    while (eat('|')) parts.push_back(parse_conj());
    return f_or(std::move(parts));
  }

  FormulaPtr parse_conj() {
    std::vector<FormulaPtr> parts{parse_unary()};
    while (eat('&')) parts.push_back(parse_unary());
    return f_and(std::move(parts));
  }

  FormulaPtr parse_unary() {
    skip_ws();
    if (eat('~')) return f_not(parse_unary());
    std::string w = peek_word();
    if (w == "exists") {
      read_word();
      std::vector<VarId> binders;
      for (;;) {
        skip_ws();
        if (peek() == '(') break;
        binders.push_back(parse_var_id(read_word()));
      }
      expect('(');
      FormulaPtr body = parse_disj();
      expect(')');
      return f_exists(std::move(binders), std::move(body));
    }
    if (w == "true") {
      read_word();
      return f_true();
    }
    if (w == "false") {
      read_word();
      return f_false();
    }
    if (peek() == '(') {
      // could be a parenthesized formula or a parenthesized polynomial
      std::size_t save = pos;
      try {
        expect('(');
        FormulaPtr f = parse_disj();
        expect(')');
        // a formula in parens must not be followed by polynomial syntax
        skip_ws();
        char c = peek();
        if (c == '=' || c == '!' || c == '*' || c == '+' || c == '-' || c == '^' ||
            c == '/')
          throw parse_error("parenthesized polynomial", pos);
        return f;
      } catch (const parse_error&) {
        pos = save;
        return parse_poly_atom();
      }
    }
    return parse_atom();
  }

  FormulaPtr parse_atom() {
    std::string w = peek_word();
    if (w == "E") {
      read_word();
      expect('(');
      HTerm h = parse_hterm();
      expect(',');
      FTerm f = parse_fterm();
      expect(')');
      return f_atom_e(std::move(h), std::move(f));
    }
    if (w == "a" || w == "adag") {
      // ladder application: a(...)/a^n(...), vs the field variable a_1
      std::size_t save = pos;
      read_word();
      skip_ws();
      if (pos < s.size() && (s[pos] == '(' || s[pos] == '^')) {
        unsigned steps = 1;
        if (eat('^')) steps = read_uint();
        expect('(');
        HTerm from = parse_hterm();
        expect(')');
        expect('=');
        FTerm coef = parse_fterm();
        expect('*');
        HTerm to = parse_hterm();
        return f_atom_ladder(w == "adag", steps, std::move(from), std::move(coef),
                             std::move(to));
      }
      pos = save;
    }
    if (!w.empty()) {
      std::size_t us = w.find('_');
      std::string fam = w.substr(0, us);
      if (is_h_family(fam) && us != std::string::npos) {
        HTerm lhs = parse_hterm();
        expect('=');
        // rhs: hterm or fterm * hterm
        std::string nxt = peek_word();
        std::size_t nus = nxt.find('_');
        if (!nxt.empty() && nus != std::string::npos && is_h_family(nxt.substr(0, nus))) {
          HTerm rhs = parse_hterm();
          return f_atom_heq(std::move(lhs), std::nullopt, std::move(rhs));
        }
        FTerm coef = parse_fterm();
        expect('*');
        HTerm rhs = parse_hterm();
        return f_atom_heq(std::move(lhs), std::move(coef), std::move(rhs));
      }
    }
    return parse_poly_atom();
  }

  HTerm parse_hterm() {
    VarId v = parse_var_id(read_word());
    if (sort_of(v) != SortTag::H) throw parse_error("expected H-sort term", pos);
    return HTerm{std::move(v)};
  }

  FTerm parse_fterm() {
    skip_ws();
    std::string w = peek_word();
    if (w == "p") {
      std::size_t save = pos;
      read_word();
      if (eat('(')) {
        HTerm h = parse_hterm();
        expect(')');
        return FTerm::of_proj(h.var);
      }
      pos = save;
    }
    if (!w.empty() && w != "zeta" && w != "t" && w != "sqrt" &&
        !std::isdigit(static_cast<unsigned char>(w[0]))) {
      VarId v = parse_var_id(read_word());
      if (sort_of(v) != SortTag::F) throw parse_error("expected field-sort term", pos);
      return FTerm::of_var(std::move(v));
    }
    return FTerm::of_scalar(parse_scalar_coefficient());
  }

  // Scalar literal in coefficient position: stops before '*' followed by an
  // H-sort identifier.
  Scalar parse_scalar_coefficient() {
    Scalar acc = parse_scalar_factor();
    for (;;) {
      skip_ws();
      if (pos < s.size() && s[pos] == '/') {
        ++pos;
        acc = acc * inv(parse_scalar_factor());
        continue;
      }
      if (pos < s.size() && s[pos] == '*') {
        std::size_t save = pos;
        ++pos;
        std::string nxt = peek_word();
        std::size_t nus = nxt.find('_');
        if (!nxt.empty() && nus != std::string::npos && is_h_family(nxt.substr(0, nus))) {
          pos = save;
          return acc;
        }
        acc = acc * parse_scalar_factor();
        continue;
      }
      return acc;
    }
  }

  Scalar parse_scalar_factor() {
    skip_ws();
    if (eat('-')) return -parse_scalar_factor();
    Scalar v = parse_scalar_primary();
    skip_ws();
    if (pos < s.size() && s[pos] == '^') {
      ++pos;
      unsigned e = read_uint();
      v = pow(v, static_cast<long>(e));
    }
    return v;
  }

  Scalar parse_scalar_primary() {
    skip_ws();
    if (pos >= s.size()) throw parse_error("unexpected end of scalar", pos);
    if (std::isdigit(static_cast<unsigned char>(s[pos]))) {
      std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      return tower->from_rat(Rat(s.substr(start, pos - start)));
    }
    std::string w = peek_word();
    if (w == "zeta") {
      read_word();
      return tower->zeta();
    }
    if (w == "t") {
      read_word();
      return tower->transcendental();
    }
    if (w == "sqrt") {
      read_word();
      skip_ws();
      if (pos >= s.size() || s[pos] != '{') throw parse_error("expected '{'", pos);
      int depth = 0;
      std::size_t open = pos, close = pos;
      for (; close < s.size(); ++close) {
        if (s[close] == '{') ++depth;
        if (s[close] == '}') {
          if (--depth == 0) break;
        }
      }
      if (depth != 0) throw parse_error("unbalanced '{'", open);
      std::string inner = s.substr(open + 1, close - open - 1);
      pos = close + 1;
      Scalar r = parse_scalar(inner, tower);
      auto res = Tower::adjoin_sqrt(tower, r);
      tower = res.tower;
      return res.root;
    }
    if (eat('(')) {
      // full scalar expression in parens
      Scalar acc = parse_scalar_sum();
      expect(')');
      return acc;
    }
    throw parse_error("expected scalar literal", pos);
  }

  Scalar parse_scalar_sum() {
    Scalar acc = parse_scalar_coefficient();
    for (;;) {
      skip_ws();
      if (eat('+')) {
        acc = acc + parse_scalar_coefficient();
      } else if (pos < s.size() && s[pos] == '-') {
        ++pos;
        acc = acc - parse_scalar_coefficient();
      } else {
        return acc;
      }
    }
  }

  // ---- polynomial atoms ----

  FormulaPtr parse_poly_atom() {
    DynPoly lhs = parse_pexpr();
    skip_ws();
    bool negated = false;
    if (eat('!')) {
      expect('=');
      negated = true;
    } else {
      expect('=');
    }
    DynPoly rhs = parse_pexpr();
    return f_atom_poly(dyn_to_atom(lhs, rhs, negated));
  }

  DynPoly dyn_const(const Scalar& c) {
    DynPoly p;
    if (!c.is_zero()) p.terms.emplace(std::map<std::string, unsigned>{}, c);
    return p;
  }

  DynPoly dyn_var(const std::string& name) {
    DynPoly p;
    p.terms.emplace(std::map<std::string, unsigned>{{name, 1}}, tower->one());
    return p;
  }

  static void dyn_add_term(DynPoly& p, const std::map<std::string, unsigned>& m,
                           const Scalar& c) {
    if (c.is_zero()) return;
    auto it = p.terms.find(m);
    if (it == p.terms.end()) {
      p.terms.emplace(m, c);
      return;
    }
    Scalar sum = it->second + c;
    if (sum.is_zero())
      p.terms.erase(it);
    else
      it->second = sum;
  }

  static DynPoly dyn_add(const DynPoly& a, const DynPoly& b) {
    DynPoly r = a;
    for (const auto& [m, c] : b.terms) dyn_add_term(r, m, c);
    return r;
  }

  static DynPoly dyn_neg(const DynPoly& a) {
    DynPoly r = a;
    for (auto& [m, c] : r.terms) c = -c;
    return r;
  }

  static DynPoly dyn_mul(const DynPoly& a, const DynPoly& b) {
    DynPoly r;
    for (const auto& [ma, ca] : a.terms) {
      for (const auto& [mb, cb] : b.terms) {
        std::map<std::string, unsigned> m = ma;
        for (const auto& [v, e] : mb) m[v] += e;
        dyn_add_term(r, m, ca * cb);
      }
    }
    return r;
  }

  DynPoly parse_pexpr() {
    DynPoly acc = parse_pterm();
    for (;;) {
      skip_ws();
      if (eat('+')) {
        acc = dyn_add(acc, parse_pterm());
      } else if (pos < s.size() && s[pos] == '-') {
        ++pos;
        acc = dyn_add(acc, dyn_neg(parse_pterm()));
      } else {
        return acc;
      }
    }
  }

  DynPoly parse_pterm() {
    DynPoly acc = parse_pfactor();
    for (;;) {
      skip_ws();
      if (eat('*')) {
        acc = dyn_mul(acc, parse_pfactor());
      } else if (pos < s.size() && s[pos] == '/') {
        ++pos;
        DynPoly d = parse_pfactor();
        if (d.terms.size() != 1 || !d.terms.begin()->first.empty())
          throw parse_error("division only by scalar constants", pos);
        acc = dyn_mul(acc, dyn_const(inv(d.terms.begin()->second)));
      } else {
        return acc;
      }
    }
  }

  DynPoly parse_pfactor() {
    skip_ws();
    if (eat('-')) return dyn_neg(parse_pfactor());
    DynPoly v = parse_pprimary();
    skip_ws();
    if (pos < s.size() && s[pos] == '^') {
      ++pos;
      unsigned e = read_uint();
      DynPoly acc = dyn_const(tower->one());
      for (unsigned i = 0; i < e; ++i) acc = dyn_mul(acc, v);
      return acc;
    }
    return v;
  }

  DynPoly parse_pprimary() {
    skip_ws();
    if (pos >= s.size()) throw parse_error("unexpected end of polynomial", pos);
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) return dyn_const(parse_scalar_primary());
    if (c == '(') {
      ++pos;
      DynPoly v = parse_pexpr();
      expect(')');
      return v;
    }
    std::string w = peek_word();
    if (w == "zeta" || w == "sqrt" || w == "t") return dyn_const(parse_scalar_primary());
    if (w == "p") {
      std::size_t save = pos;
      read_word();
      if (eat('(')) {
        HTerm h = parse_hterm();
        expect(')');
        return dyn_var("p(" + h.var.name() + ")");
      }
      pos = save;
    }
    VarId v = parse_var_id(read_word());
    if (sort_of(v) != SortTag::F)
      throw parse_error("H-sort variable in polynomial position: " + v.name(), pos);
    return dyn_var(v.name());
  }

  PolyAtom dyn_to_atom(const DynPoly& lhs, const DynPoly& rhs, bool negated) {
    std::vector<std::string> names;
    auto collect = [&](const DynPoly& p) {
      for (const auto& [m, c] : p.terms)
        for (const auto& [v, e] : m)
          if (std::find(names.begin(), names.end(), v) == names.end()) names.push_back(v);
    };
    collect(lhs);
    collect(rhs);
    std::sort(names.begin(), names.end(), atom_var_less);
    PolyAtom atom;
    atom.vars = names;
    atom.negated = negated;
    PolyRing ring{tower, names};
    auto convert = [&](const DynPoly& p) {
      Poly out;
      for (const auto& [m, c] : p.terms) {
        Mono mono(names.size(), 0);
        for (const auto& [v, e] : m) {
          auto it = std::find(names.begin(), names.end(), v);
          mono[static_cast<std::size_t>(it - names.begin())] =
              static_cast<std::uint16_t>(e);
        }
        poly_add_term(ring, out, mono, tower->lift(c));
      }
      return out;
    };
    atom.lhs = convert(lhs);
    atom.rhs = convert(rhs);
    return atom;
  }
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, TowerPtr& tower) {
  FormulaParser p(text, tower);
  FormulaPtr f = p.parse_disj();
  p.skip_ws();
  if (p.pos != text.size()) throw parse_error("trailing input after formula", p.pos);
  return f;
}

// ---------------------------------------------------------------------------
// Builders.

unsigned PartitionEnumeration::n() const {
  unsigned v = 0;
  for (unsigned x : class_sizes) v += x;
  return v;
}

unsigned PartitionEnumeration::r() const {
  unsigned v = 0;
  for (unsigned x : param_sizes) v += x;
  return v;
}

namespace {

VarId vid(std::string family, std::initializer_list<unsigned> idx) {
  VarId v;
  v.family = std::move(family);
  v.idx = idx;
  return v;
}

PolyAtom square_atom(const TowerPtr& tower, const VarId& cvar, const VarId& alpha,
                     unsigned shift) {
  // cvar^2 = alpha + shift
  PolyAtom atom;
  atom.vars = {alpha.name(), cvar.name()};
  std::sort(atom.vars.begin(), atom.vars.end(), atom_var_less);
  PolyRing ring{tower, atom.vars};
  std::size_t ci = static_cast<std::size_t>(ring.index_of(cvar.name()));
  std::size_t ai = static_cast<std::size_t>(ring.index_of(alpha.name()));
  Mono c2(atom.vars.size(), 0);
  c2[ci] = 2;
  poly_add_term(ring, atom.lhs, c2, tower->one());
  Mono a1(atom.vars.size(), 0);
  a1[ai] = 1;
  poly_add_term(ring, atom.rhs, a1, tower->one());
  if (shift)
    poly_add_term(ring, atom.rhs, Mono(atom.vars.size(), 0), tower->from_int(shift));
  return atom;
}

// cvar^2 = p(h_i) + shift, with the projection as a pseudo variable.
PolyAtom square_atom_param(const TowerPtr& tower, const VarId& cvar, const VarId& hparam,
                           unsigned shift) {
  PolyAtom atom;
  std::string pname = "p(" + hparam.name() + ")";
  atom.vars = {cvar.name(), pname};
  std::sort(atom.vars.begin(), atom.vars.end(), atom_var_less);
  PolyRing ring{tower, atom.vars};
  Mono c2(2, 0);
  c2[0] = 2;
  poly_add_term(ring, atom.lhs, c2, tower->one());
  Mono p1(2, 0);
  p1[1] = 1;
  poly_add_term(ring, atom.rhs, p1, tower->one());
  if (shift) poly_add_term(ring, atom.rhs, Mono(2, 0), tower->from_int(shift));
  return atom;
}

PolyAtom product_atom(const TowerPtr& tower, const std::vector<VarId>& cvars,
                      const VarId& target) {
  // c_1 * ... * c_n = target
  PolyAtom atom;
  for (const auto& c : cvars) atom.vars.push_back(c.name());
  atom.vars.push_back(target.name());
  std::sort(atom.vars.begin(), atom.vars.end(), atom_var_less);
  PolyRing ring{tower, atom.vars};
  Mono prod(atom.vars.size(), 0);
  for (const auto& c : cvars)
    prod[static_cast<std::size_t>(ring.index_of(c.name()))] += 1;
  poly_add_term(ring, atom.lhs, prod, tower->one());
  Mono tg(atom.vars.size(), 0);
  tg[static_cast<std::size_t>(ring.index_of(target.name()))] = 1;
  poly_add_term(ring, atom.rhs, tg, tower->one());
  return atom;
}

// One chain block: exists c (/\ c_k^2 = base + k-1 ^ prod c_k = target ^ tail).
// `base` is either an alpha variable or an h parameter (projection).
FormulaPtr chain_block(const TowerPtr& tower, const std::string& cfam, unsigned i, unsigned j,
                       unsigned n, const std::optional<VarId>& alpha,
                       const std::optional<VarId>& hparam, const VarId& target,
                       std::vector<FormulaPtr> tail) {
  std::vector<VarId> cvars;
  for (unsigned k = 1; k <= n; ++k) cvars.push_back(vid(cfam, {i, j, k}));
  std::vector<FormulaPtr> parts;
  for (unsigned k = 1; k <= n; ++k) {
    if (alpha)
      parts.push_back(f_atom_poly(square_atom(tower, cvars[k - 1], *alpha, k - 1)));
    else
      parts.push_back(f_atom_poly(square_atom_param(tower, cvars[k - 1], *hparam, k - 1)));
  }
  parts.push_back(f_atom_poly(product_atom(tower, cvars, target)));
  for (auto& t : tail) parts.push_back(std::move(t));
  return f_exists(std::move(cvars), f_and(std::move(parts)));
}

}  // namespace

FormulaPtr build_A_sigma(const PartitionEnumeration& part, const ChainMap& sigma,
                         const TowerPtr& tower) {
  unsigned s = part.s();
  for (const auto& [ij, n] : sigma) {
    if (ij.first < 1 || ij.first > s || ij.second < 1 || ij.second > s || n < 1)
      throw bad_index("sigma index out of range");
  }
  std::vector<FormulaPtr> parts;
  for (unsigned i = 1; i <= s; ++i)
    parts.push_back(f_atom_e(HTerm{vid("f", {i})}, FTerm::of_var(vid("alpha", {i}))));
  // G^Sigma
  for (const auto& [ij, n] : sigma) {
    auto [i, j] = ij;
    VarId g = vid("g", {i, j});
    VarId b = vid("b", {i, j});
    std::vector<FormulaPtr> tail;
    tail.push_back(f_atom_e(HTerm{g}, FTerm::of_var(vid("alpha", {j}))));
    tail.push_back(f_atom_ladder(false, n, HTerm{vid("f", {i})}, FTerm::of_var(b), HTerm{g}));
    tail.push_back(f_atom_ladder(true, n, HTerm{g}, FTerm::of_var(b), HTerm{vid("f", {i})}));
    tail.push_back(
        f_atom_heq(HTerm{g}, FTerm::of_var(vid("gamma", {i, j})), HTerm{vid("f", {j})}));
    parts.push_back(
        chain_block(tower, "c", i, j, n, vid("alpha", {i}), std::nullopt, b, std::move(tail)));
  }
  for (unsigned i = 1; i <= s; ++i)
    for (unsigned j = 1; j <= part.class_sizes[i - 1]; ++j)
      parts.push_back(f_atom_heq(HTerm{vid("e", {i, j})},
                                 FTerm::of_var(vid("lambda", {i, j})),
                                 HTerm{vid("f", {i})}));
  return f_and(std::move(parts));
}

FormulaPtr build_B(const PartitionEnumeration& part) {
  unsigned s = part.s();
  std::vector<FormulaPtr> parts;
  for (unsigned i = 1; i <= part.t(); ++i)
    for (unsigned j = 1; j <= part.param_sizes[i - 1]; ++j)
      parts.push_back(f_atom_heq(HTerm{vid("e", {s + i, j})},
                                 FTerm::of_var(vid("mu", {i, j})), HTerm{vid("h", {i})}));
  return f_and(std::move(parts));
}

FormulaPtr build_D1(const PartitionEnumeration& part, const ChainMap& delta1,
                    const TowerPtr& tower) {
  std::vector<FormulaPtr> parts;
  for (const auto& [ij, n] : delta1) {
    auto [i, j] = ij;
    if (i < 1 || i > part.s() || j < 1 || j > part.t() || n < 1)
      throw bad_index("delta1 index out of range");
    VarId p = vid("p", {i, j});
    VarId m = vid("m", {i, j});
    std::vector<FormulaPtr> tail;
    tail.push_back(f_atom_e(HTerm{p}, FTerm::of_proj(vid("h", {j}))));
    tail.push_back(f_atom_ladder(false, n, HTerm{vid("f", {i})}, FTerm::of_var(m), HTerm{p}));
    tail.push_back(f_atom_ladder(true, n, HTerm{p}, FTerm::of_var(m), HTerm{vid("f", {i})}));
    tail.push_back(
        f_atom_heq(HTerm{p}, FTerm::of_var(vid("delta", {i, j})), HTerm{vid("h", {j})}));
    parts.push_back(
        chain_block(tower, "c", i, j, n, vid("alpha", {i}), std::nullopt, m, std::move(tail)));
  }
  return f_and(std::move(parts));
}

FormulaPtr build_D2(const PartitionEnumeration& part, const ChainMap& delta2,
                    const TowerPtr& tower) {
  std::vector<FormulaPtr> parts;
  for (const auto& [ij, n] : delta2) {
    auto [i, j] = ij;
    if (i < 1 || i > part.t() || j < 1 || j > part.s() || n < 1)
      throw bad_index("delta2 index out of range");
    VarId q = vid("q", {i, j});
    VarId o = vid("o", {i, j});
    std::vector<FormulaPtr> tail;
    tail.push_back(f_atom_e(HTerm{q}, FTerm::of_var(vid("alpha", {j}))));
    tail.push_back(f_atom_ladder(false, n, HTerm{vid("h", {i})}, FTerm::of_var(o), HTerm{q}));
    tail.push_back(f_atom_ladder(true, n, HTerm{q}, FTerm::of_var(o), HTerm{vid("h", {i})}));
    tail.push_back(
        f_atom_heq(HTerm{q}, FTerm::of_var(vid("epsilon", {i, j})), HTerm{vid("f", {j})}));
    parts.push_back(chain_block(tower, "c", i, j, n, std::nullopt, vid("h", {i}), o,
                                std::move(tail)));
  }
  return f_and(std::move(parts));
}

FormulaPtr pred_to_formula(const Pred& pred) {
  const PolyRing& ring = *pred.ring;
  auto poly_to_atom = [&](const Poly& p, bool negated) {
    PolyAtom atom;
    // restrict the variable list to the ones occurring
    std::vector<std::size_t> used;
    for (const auto& [m, c] : p.terms)
      for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i] && std::find(used.begin(), used.end(), i) == used.end()) used.push_back(i);
    std::sort(used.begin(), used.end(), [&](std::size_t a, std::size_t b) {
      return atom_var_less(ring.vars[a], ring.vars[b]);
    });
    std::vector<std::size_t> to_index(ring.nvars(), 0);
    for (std::size_t k = 0; k < used.size(); ++k) {
      atom.vars.push_back(ring.vars[used[k]]);
      to_index[used[k]] = k;
    }
    atom.lhs = poly_reindex(p, to_index, atom.vars.size());
    atom.rhs = Poly{};
    atom.negated = negated;
    return atom;
  };
  std::vector<FormulaPtr> cells;
  for (const auto& cell : pred.cells) {
    std::vector<FormulaPtr> parts;
    for (const auto& q : cell.eqs) parts.push_back(f_atom_poly(poly_to_atom(q, false)));
    for (const auto& neg : cell.negs) {
      if (neg.size() == 1) {
        parts.push_back(f_atom_poly(poly_to_atom(neg[0], true)));
      } else {
        std::vector<FormulaPtr> inner;
        for (const auto& q : neg) inner.push_back(f_atom_poly(poly_to_atom(q, false)));
        parts.push_back(f_not(f_and(std::move(inner))));
      }
    }
    cells.push_back(f_and(std::move(parts)));
  }
  FormulaPtr body = f_or(std::move(cells));
  std::vector<VarId> binders;
  for (const auto& b : pred.bound) binders.push_back(parse_var_id(b));
  return f_exists(std::move(binders), std::move(body));
}

FormulaPtr build_general_core(const PartitionEnumeration& part, const ChainMap& sigma,
                              const ChainMap& delta1, const ChainMap& delta2,
                              const Pred& r, const TowerPtr& tower) {
  FormulaPtr a = build_A_sigma(part, sigma, tower);
  FormulaPtr d1 = build_D1(part, delta1, tower);
  FormulaPtr d2 = build_D2(part, delta2, tower);
  FormulaPtr b = build_B(part);
  FormulaPtr rf = pred_to_formula(r);

  std::vector<VarId> binders;
  for (unsigned i = 1; i <= part.s(); ++i) binders.push_back(vid("f", {i}));
  for (const auto& [ij, n] : sigma) binders.push_back(vid("g", {ij.first, ij.second}));
  for (unsigned i = 1; i <= part.s(); ++i) binders.push_back(vid("alpha", {i}));
  for (const auto& [ij, n] : sigma) binders.push_back(vid("gamma", {ij.first, ij.second}));
  for (const auto& [ij, n] : delta1) binders.push_back(vid("delta", {ij.first, ij.second}));
  for (const auto& [ij, n] : delta2) binders.push_back(vid("epsilon", {ij.first, ij.second}));
  for (const auto& [ij, n] : sigma) binders.push_back(vid("b", {ij.first, ij.second}));
  for (const auto& [ij, n] : delta1) binders.push_back(vid("p", {ij.first, ij.second}));
  for (const auto& [ij, n] : delta2) binders.push_back(vid("q", {ij.first, ij.second}));
  for (const auto& [ij, n] : delta1) binders.push_back(vid("m", {ij.first, ij.second}));
  for (const auto& [ij, n] : delta2) binders.push_back(vid("o", {ij.first, ij.second}));
  for (unsigned i = 1; i <= part.s(); ++i)
    for (unsigned j = 1; j <= part.class_sizes[i - 1]; ++j)
      binders.push_back(vid("lambda", {i, j}));
  for (unsigned i = 1; i <= part.t(); ++i)
    for (unsigned j = 1; j <= part.param_sizes[i - 1]; ++j)
      binders.push_back(vid("mu", {i, j}));

  return f_exists(std::move(binders), f_and({a, d1, d2, b, rf}));
}

}  // namespace qho
