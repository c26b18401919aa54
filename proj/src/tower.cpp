#include "tower.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cctype>
#include <numbers>
#include <sstream>

namespace qho {

namespace {

void add_into(const CycloCtx& ctx, Coords& out, std::uint32_t mask, const RatF& v) {
  if (v.is_zero()) return;
  auto it = out.find(mask);
  if (it == out.end()) {
    out.emplace(mask, v);
    return;
  }
  it->second = rf_add(ctx, it->second, v);
  if (it->second.is_zero()) out.erase(it);
}

Coords coords_add(const CycloCtx& ctx, const Coords& a, const Coords& b) {
  Coords out = a;
  for (const auto& [m, v] : b) add_into(ctx, out, m, v);
  return out;
}

Coords coords_neg(const Coords& a) {
  Coords out;
  for (const auto& [m, v] : a) out.emplace(m, rf_neg(v));
  return out;
}

Coords coords_mul(const Tower& tw, const Coords& a, const Coords& b) {
  const CycloCtx& ctx = tw.cyclo();
  Coords out;
  for (const auto& [ma, va] : a) {
    for (const auto& [mb, vb] : b) {
      std::uint32_t common = ma & mb;
      std::uint32_t sym = ma ^ mb;
      RatF coef = rf_mul(ctx, va, vb);
      if (coef.is_zero()) continue;
      if (common == 0) {
        add_into(ctx, out, sym, coef);
        continue;
      }
      // Squares of shared generators reduce to their radicands.
      Coords term{{sym, coef}};
      std::uint32_t c = common;
      while (c) {
        unsigned i = static_cast<unsigned>(std::countr_zero(c));
        c &= c - 1;
        term = coords_mul(tw, term, tw.gens()[i].radicand);
      }
      for (const auto& [mt, vt] : term) add_into(ctx, out, mt, vt);
    }
  }
  return out;
}

Coords coords_sub(const CycloCtx& ctx, const Coords& a, const Coords& b) {
  return coords_add(ctx, a, coords_neg(b));
}

Coords coords_inv(const Tower& tw, const Coords& x) {
  const CycloCtx& ctx = tw.cyclo();
  if (x.empty()) throw zero_inversion();
  std::uint32_t all = 0;
  for (const auto& [m, v] : x) all |= m;
  if (all == 0) return Coords{{0u, rf_inv(ctx, x.at(0u))}};
  unsigned h = 31u - static_cast<unsigned>(std::countl_zero(all));
  std::uint32_t bit = 1u << h;
  Coords u, v;
  for (const auto& [m, c] : x) {
    if (m & bit)
      v.emplace(m & ~bit, c);
    else
      u.emplace(m, c);
  }
  const Coords& rad = tw.gens()[h].radicand;
  if (u.empty()) {
    // x = v * g_h, so 1/x = g_h / (v * r_h).
    Coords vr = coords_mul(tw, v, rad);
    return coords_mul(tw, Coords{{bit, RatF::from_rat(Rat(1))}}, coords_inv(tw, vr));
  }
  Coords norm = coords_sub(ctx, coords_mul(tw, u, u), coords_mul(tw, coords_mul(tw, v, v), rad));
  if (!norm.empty()) {
    Coords conj = u;
    for (const auto& [m, c] : v) add_into(ctx, conj, m | bit, rf_neg(c));
    return coords_mul(tw, conj, coords_inv(tw, norm));
  }
  // Zero divisor: (u/v)^2 = r_h, so g_h is already in the lower tower.
  // Resolve along the branch g_h = u/v, which keeps x nonzero.
  Coords w = coords_mul(tw, u, coords_inv(tw, v));
  throw branch_split(tw.resolve(h, w), h);
}

Coords substitute_resolved(const Tower& tw, const Coords& c, unsigned gen) {
  std::uint32_t bit = 1u << gen;
  const Coords& value = tw.gens()[gen].value;
  Coords out;
  for (const auto& [m, v] : c) {
    if (!(m & bit)) {
      add_into(tw.cyclo(), out, m, v);
      continue;
    }
    Coords term = coords_mul(tw, Coords{{m & ~bit, v}}, value);
    for (const auto& [mt, vt] : term) add_into(tw.cyclo(), out, mt, vt);
  }
  return out;
}

std::complex<double> coords_approx(const Tower& tw, const Coords& c);

std::complex<double> gen_approx(const Tower& tw, unsigned i) {
  return std::sqrt(coords_approx(tw, tw.gens()[i].radicand));
}

// The transcendental embeds as pi for the numeric sanity harness.
constexpr double kTranscendentalValue = 3.14159265358979323846;

std::complex<double> coords_approx(const Tower& tw, const Coords& c) {
  std::complex<double> acc(0.0, 0.0);
  for (const auto& [m, v] : c) {
    std::complex<double> term = rf_approx(tw.cyclo(), v, {kTranscendentalValue, 0.0});
    std::uint32_t mm = m;
    while (mm) {
      unsigned i = static_cast<unsigned>(std::countr_zero(mm));
      mm &= mm - 1;
      term *= gen_approx(tw, i);
    }
    acc += term;
  }
  return acc;
}

// m = a^2 * k with k square-free (up to a trial-division bound; exactness
// of m = a^2 k holds regardless).
void extract_square(const mpz_class& m, mpz_class& a, mpz_class& k) {
  a = 1;
  k = 1;
  mpz_class rest = m;
  for (mpz_class p = 2; p * p <= rest && p < 1000000; p += (p == 2 ? 1 : 2)) {
    if (rest % p != 0) continue;
    unsigned e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    for (unsigned i = 0; i < e / 2; ++i) a *= p;
    if (e % 2) k *= p;
  }
  if (rest > 1) {
    if (mpz_perfect_square_p(rest.get_mpz_t())) {
      mpz_class s;
      mpz_sqrt(s.get_mpz_t(), rest.get_mpz_t());
      a *= s;
    } else {
      k *= rest;
    }
  }
}

}  // namespace

branch_split::branch_split(TowerPtr tower, unsigned g)
    : error("branch split on generator " + std::to_string(g)),
      resolved_tower(std::move(tower)),
      gen(g) {}

TowerPtr Tower::make(unsigned n) {
  auto t = std::shared_ptr<Tower>(new Tower());
  t->n_ = n;
  t->cyclo_ = std::make_shared<CycloCtx>(n);
  return t;
}

Scalar Tower::zero() const { return Scalar(shared_from_this(), Coords{}); }

Scalar Tower::one() const { return from_rat(Rat(1)); }

Scalar Tower::from_rat(const Rat& r) const {
  Coords c;
  if (r != 0) c.emplace(0u, RatF::from_rat(r));
  return Scalar(shared_from_this(), std::move(c));
}

Scalar Tower::from_int(long v) const { return from_rat(Rat(v)); }

Scalar Tower::zeta() const { return zeta_pow(1); }

Scalar Tower::zeta_pow(long k) const {
  long n = static_cast<long>(n_);
  long r = ((k % n) + n) % n;
  Cyc z = cyc_zeta_pow(*cyclo_, static_cast<unsigned>(r));
  Coords c;
  if (!z.is_zero()) c.emplace(0u, RatF::from_cyc(z));
  return Scalar(shared_from_this(), std::move(c));
}

Scalar Tower::transcendental() const {
  return Scalar(shared_from_this(), Coords{{0u, RatF::t()}});
}

Scalar Tower::gen_scalar(unsigned i) const {
  if (i >= gens_.size()) throw bad_index("generator index out of range");
  if (gens_[i].resolved) return Scalar(shared_from_this(), gens_[i].value);
  return Scalar(shared_from_this(), Coords{{1u << i, RatF::from_rat(Rat(1))}});
}

Scalar Tower::radicand(unsigned i) const {
  if (i >= gens_.size()) throw bad_index("generator index out of range");
  return Scalar(shared_from_this(), gens_[i].radicand);
}

Tower::AdjoinResult Tower::adjoin_sqrt(TowerPtr t, const Scalar& r_in) {
  Scalar r = t->lift(r_in);
  if (r.is_zero()) return {t, t->zero()};

  Coords radicand;
  Scalar coef = t->one();
  if (r.is_rational()) {
    Rat q = r.to_rat();
    mpz_class m = q.get_num() * q.get_den();
    bool neg = m < 0;
    mpz_class am = neg ? mpz_class(-m) : m;
    mpz_class a, k;
    extract_square(am, a, k);
    // sqrt(p/q) = sqrt(p*q)/q = (a/q) * sqrt(sign * k)
    coef = t->from_rat(Rat(a) / Rat(q.get_den()));
    if (k == 1 && !neg) return {t, coef};
    if (k == 1 && neg && t->n_ % 4 == 0) {
      return {t, coef * t->zeta_pow(static_cast<long>(t->n_ / 4))};
    }
    Rat core = neg ? Rat(-k) : Rat(k);
    radicand.emplace(0u, RatF::from_rat(core));
  } else {
    radicand = r.coords();
  }

  for (unsigned i = 0; i < t->gens_.size(); ++i) {
    if (t->gens_[i].radicand == radicand) return {t, coef * t->gen_scalar(i)};
  }

  auto res = adjoin_sqrt_formal(t, Scalar(t, radicand));
  return {res.tower, res.tower->lift(coef) * res.root};
}

Tower::AdjoinResult Tower::adjoin_sqrt_formal(TowerPtr t, const Scalar& r_in) {
  Scalar r = t->lift(r_in);
  if (r.is_zero()) return {t, t->zero()};
  if (t->gens_.size() >= 32) throw guard_error("tower generator limit (32) exceeded");
  auto child = std::shared_ptr<Tower>(new Tower());
  child->n_ = t->n_;
  child->cyclo_ = t->cyclo_;
  child->gens_ = t->gens_;
  child->gens_.push_back(Gen{r.coords(), false, {}});
  child->parent_ = t;
  child->lineage_depth_ = t->lineage_depth_ + 1;
  child->step_ = Step::add_gen;
  child->step_gen_ = static_cast<unsigned>(child->gens_.size() - 1);
  TowerPtr ct = child;
  return {ct, ct->gen_scalar(child->step_gen_)};
}

TowerPtr Tower::resolve(unsigned gen, const Coords& value) const {
  if (gen >= gens_.size()) throw bad_index("generator index out of range");
  auto child = std::shared_ptr<Tower>(new Tower());
  child->n_ = n_;
  child->cyclo_ = cyclo_;
  child->gens_ = gens_;
  child->gens_[gen].resolved = true;
  child->gens_[gen].value = value;
  child->parent_ = shared_from_this();
  child->lineage_depth_ = lineage_depth_ + 1;
  child->step_ = Step::resolve_gen;
  child->step_gen_ = gen;
  return child;
}

bool Tower::is_ancestor_of(const Tower* other) const {
  const Tower* cur = other;
  while (cur) {
    if (cur == this) return true;
    cur = cur->parent_.get();
  }
  return false;
}

Scalar Tower::lift(const Scalar& x) const {
  if (!x.valid()) throw error("invalid scalar");
  if (x.tower().get() == this) return x;
  std::vector<const Tower*> chain;
  const Tower* cur = this;
  while (cur && cur != x.tower().get()) {
    chain.push_back(cur);
    cur = cur->parent_.get();
  }
  if (!cur) throw error("scalar does not belong to an ancestor tower");
  Coords c = x.coords();
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    if ((*it)->step_ == Step::resolve_gen)
      c = substitute_resolved(**it, c, (*it)->step_gen_);
  }
  return Scalar(shared_from_this(), std::move(c));
}

namespace {

// Lift both operands to the deeper tower; towers must be lineage-related.
std::pair<Scalar, Scalar> align(const Scalar& a, const Scalar& b) {
  if (!a.valid() || !b.valid()) throw error("invalid scalar");
  if (a.tower() == b.tower()) return {a, b};
  const Tower* ta = a.tower().get();
  const Tower* tb = b.tower().get();
  if (ta->lineage_depth() >= tb->lineage_depth()) return {a, ta->lift(b)};
  return {tb->lift(a), b};
}

}  // namespace

bool Scalar::is_rational() const {
  if (c_.empty()) return true;
  if (c_.size() != 1) return false;
  const auto& [m, v] = *c_.begin();
  return m == 0 && v.is_rational();
}

bool Scalar::is_integer() const {
  if (!is_rational()) return false;
  return to_rat().get_den() == 1;
}

Rat Scalar::to_rat() const {
  if (c_.empty()) return Rat(0);
  const auto& [m, v] = *c_.begin();
  if (m != 0 || !v.is_rational()) throw error("scalar is not rational");
  return v.constant().rat();
}

Scalar Scalar::operator-() const { return Scalar(tw_, coords_neg(c_)); }

Scalar operator+(const Scalar& a, const Scalar& b) {
  auto [x, y] = align(a, b);
  return Scalar(x.tower(), coords_add(x.tower()->cyclo(), x.coords(), y.coords()));
}

Scalar operator-(const Scalar& a, const Scalar& b) {
  auto [x, y] = align(a, b);
  return Scalar(x.tower(), coords_sub(x.tower()->cyclo(), x.coords(), y.coords()));
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  auto [x, y] = align(a, b);
  return Scalar(x.tower(), coords_mul(*x.tower(), x.coords(), y.coords()));
}

bool operator==(const Scalar& a, const Scalar& b) {
  auto [x, y] = align(a, b);
  return x.coords() == y.coords();
}

Scalar inv(const Scalar& x) {
  if (!x.valid()) throw error("invalid scalar");
  return Scalar(x.tower(), coords_inv(*x.tower(), x.coords()));
}

Scalar pow(const Scalar& x, long e) {
  if (e < 0) return inv(pow(x, -e));
  Scalar acc = x.tower()->one();
  Scalar base = x;
  unsigned long n = static_cast<unsigned long>(e);
  while (n) {
    if (n & 1) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return acc;
}

std::string Scalar::to_string() const {
  if (c_.empty()) return "0";
  auto composite = [](const std::string& s) {
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      char ch = s[i];
      if (ch == '(' || ch == '{') ++depth;
      if (ch == ')' || ch == '}') --depth;
      if (depth == 0 && i > 0 && (ch == '+' || ch == '-')) return true;
    }
    return false;
  };
  std::ostringstream out;
  bool first = true;
  for (const auto& [mask, coef] : c_) {
    std::string cs = rf_to_string(coef);
    std::string term;
    if (mask == 0) {
      term = cs;
    } else {
      std::string prefix;
      if (cs == "1") {
        prefix = "";
      } else if (cs == "-1") {
        prefix = "-";
      } else {
        prefix = (composite(cs) ? "(" + cs + ")" : cs) + "*";
      }
      std::string factors;
      std::uint32_t mm = mask;
      while (mm) {
        unsigned i = static_cast<unsigned>(std::countr_zero(mm));
        mm &= mm - 1;
        if (!factors.empty()) factors += "*";
        factors += "sqrt{" + Scalar(tw_, tw_->gens()[i].radicand).to_string() + "}";
      }
      term = prefix + factors;
    }
    if (first) {
      out << term;
      first = false;
    } else {
      if (!term.empty() && term[0] == '-')
        out << term;
      else
        out << "+" << term;
    }
  }
  return out.str();
}

std::complex<double> Scalar::approx() const { return coords_approx(*tw_, c_); }

bool scalar_less(const Scalar& a, const Scalar& b) {
  auto [x, y] = align(a, b);
  const Coords& ca = x.coords();
  const Coords& cb = y.coords();
  auto ia = ca.begin();
  auto ib = cb.begin();
  auto cyc_cmp = [](const Cyc& p, const Cyc& q) {
    if (p.c.size() != q.c.size()) return p.c.size() < q.c.size() ? -1 : 1;
    for (std::size_t i = 0; i < p.c.size(); ++i) {
      int c = cmp(p.c[i], q.c[i]);
      if (c) return c;
    }
    return 0;
  };
  auto poly_cmp = [&](const std::vector<Cyc>& p, const std::vector<Cyc>& q) {
    if (p.size() != q.size()) return p.size() < q.size() ? -1 : 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
      int c = cyc_cmp(p[i], q[i]);
      if (c) return c;
    }
    return 0;
  };
  for (; ia != ca.end() && ib != cb.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return ia->first < ib->first;
    int c = poly_cmp(ia->second.num, ib->second.num);
    if (c) return c < 0;
    c = poly_cmp(ia->second.den, ib->second.den);
    if (c) return c < 0;
  }
  return ca.size() < cb.size();
}

// ---------------------------------------------------------------------------
// Scalar expression parser.

namespace {

struct ScalarParser {
  const std::string& s;
  std::size_t pos = 0;
  TowerPtr& tower;

  ScalarParser(const std::string& text, TowerPtr& tw) : s(text), tower(tw) {}

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

  bool eat_word(const char* w) {
    skip_ws();
    std::size_t len = std::string(w).size();
    if (s.compare(pos, len, w) != 0) return false;
    std::size_t end = pos + len;
    if (end < s.size() && (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_'))
      return false;
    pos = end;
    return true;
  }

  Scalar parse_expr() {
    Scalar acc = parse_term();
    for (;;) {
      skip_ws();
      if (eat('+'))
        acc = acc + parse_term();
      else if (pos < s.size() && s[pos] == '-') {
        ++pos;
        acc = acc - parse_term();
      } else {
        return acc;
      }
    }
  }

  Scalar parse_term() {
    Scalar acc = parse_factor();
    for (;;) {
      skip_ws();
      if (eat('*'))
        acc = acc * parse_factor();
      else if (eat('/'))
        acc = acc * inv(parse_factor());
      else
        return acc;
    }
  }

  Scalar parse_factor() {
    skip_ws();
    if (eat('-')) return -parse_factor();
    Scalar v = parse_primary();
    skip_ws();
    if (eat('^')) {
      bool neg = eat('-');
      long e = parse_uint();
      v = pow(v, neg ? -e : e);
    }
    return v;
  }

  long parse_uint() {
    skip_ws();
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
      throw parse_error("expected integer", pos);
    long v = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      v = v * 10 + (s[pos] - '0');
      if (v > 1000000000L) throw parse_error("integer literal too large", pos);
      ++pos;
    }
    return v;
  }

  Scalar parse_primary() {
    skip_ws();
    if (pos >= s.size()) throw parse_error("unexpected end of scalar", pos);
    if (std::isdigit(static_cast<unsigned char>(s[pos]))) {
      std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      return tower->from_rat(Rat(s.substr(start, pos - start)));
    }
    if (eat_word("zeta")) return tower->zeta();
    if (eat_word("t")) return tower->transcendental();
    if (eat_word("sqrt")) {
      expect('{');
      Scalar r = parse_expr();
      expect('}');
      auto res = Tower::adjoin_sqrt(tower, r);
      tower = res.tower;
      return res.root;
    }
    if (eat('(')) {
      Scalar v = parse_expr();
      expect(')');
      return v;
    }
    throw parse_error("unexpected character in scalar", pos);
  }
};

}  // namespace

Scalar parse_scalar(const std::string& text, TowerPtr& tower) {
  ScalarParser p(text, tower);
  Scalar v = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) throw parse_error("trailing input after scalar", p.pos);
  return tower->lift(v);
}

}  // namespace qho
