#include "cyclotomic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "errors.hpp"

namespace qho {

namespace {

using Vec = std::vector<Rat>;

void trim(Vec& v) {
  while (!v.empty() && v.back() == 0) v.pop_back();
}

Vec poly_mul(const Vec& a, const Vec& b) {
  if (a.empty() || b.empty()) return {};
  Vec r(a.size() + b.size() - 1, Rat(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

// Exact division, remainder asserted zero (used for Phi_N only).
Vec poly_div_exact(Vec num, const Vec& den) {
  Vec q(num.size() >= den.size() ? num.size() - den.size() + 1 : 0, Rat(0));
  while (num.size() >= den.size() && !num.empty()) {
    Rat c = num.back() / den.back();
    std::size_t shift = num.size() - den.size();
    q[shift] = c;
    for (std::size_t i = 0; i < den.size(); ++i) num[shift + i] -= c * den[i];
    trim(num);
  }
  return q;
}

Vec cyclotomic_poly(unsigned n) {
  // x^n - 1 divided by all proper cyclotomic factors.
  Vec num(n + 1, Rat(0));
  num[0] = -1;
  num[n] = 1;
  for (unsigned d = 1; d < n; ++d)
    if (n % d == 0) num = poly_div_exact(std::move(num), cyclotomic_poly(d));
  return num;
}

}  // namespace

CycloCtx::CycloCtx(unsigned n) : n_(n) {
  if (n == 0) throw error("cyclotomic order must be positive");
  phi_ = cyclotomic_poly(n);
  degree_ = static_cast<unsigned>(phi_.size() - 1);
  // Powers z^k mod Phi_N for k up to 2*(degree-1).
  unsigned top = degree_ == 0 ? 0 : 2 * (degree_ - 1);
  powers_.resize(top + 1);
  Vec cur{Rat(1)};
  for (unsigned k = 0; k <= top; ++k) {
    powers_[k] = cur;
    // multiply by z, reduce
    cur.insert(cur.begin(), Rat(0));
    if (cur.size() > degree_) {
      Rat lead = cur.back();
      cur.pop_back();
      for (unsigned i = 0; i < degree_; ++i) cur[i] -= lead * phi_[i];
    }
    trim(cur);
    if (cur.empty()) cur = Vec{Rat(0)};
  }
}

Cyc Cyc::from_rat(const Rat& r) {
  Cyc x;
  if (r != 0) x.c.push_back(r);
  return x;
}

Cyc cyc_add(const Cyc& a, const Cyc& b) {
  Cyc r;
  r.c.resize(std::max(a.c.size(), b.c.size()), Rat(0));
  for (std::size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
  for (std::size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
  trim(r.c);
  return r;
}

Cyc cyc_sub(const Cyc& a, const Cyc& b) { return cyc_add(a, cyc_neg(b)); }

Cyc cyc_neg(const Cyc& a) {
  Cyc r = a;
  for (auto& x : r.c) x = -x;
  return r;
}

Cyc cyc_mul(const CycloCtx& ctx, const Cyc& a, const Cyc& b) {
  if (a.is_zero() || b.is_zero()) return Cyc{};
  if (a.is_rational()) {
    Cyc r = b;
    for (auto& x : r.c) x *= a.c[0];
    return r;
  }
  if (b.is_rational()) return cyc_mul(ctx, b, a);
  Vec prod = poly_mul(a.c, b.c);
  Cyc r;
  r.c.assign(ctx.degree(), Rat(0));
  for (std::size_t k = 0; k < prod.size(); ++k) {
    if (prod[k] == 0) continue;
    const Vec& zk = ctx.power(static_cast<unsigned>(k));
    for (std::size_t i = 0; i < zk.size(); ++i) r.c[i] += prod[k] * zk[i];
  }
  trim(r.c);
  return r;
}

Cyc cyc_inv(const CycloCtx& ctx, const Cyc& a) {
  if (a.is_zero()) throw zero_inversion();
  if (a.is_rational()) return Cyc::from_rat(Rat(1) / a.c[0]);
  // Extended Euclid in Q[z]: s*a + t*Phi = gcd = const.
  Vec r0 = ctx.minimal_poly(), r1 = a.c;
  Vec s0{}, s1{Rat(1)};
  while (!r1.empty()) {
    // divide r0 by r1
    Vec q(r0.size() >= r1.size() ? r0.size() - r1.size() + 1 : 0, Rat(0));
    Vec rem = r0;
    while (rem.size() >= r1.size() && !rem.empty()) {
      Rat c = rem.back() / r1.back();
      std::size_t shift = rem.size() - r1.size();
      q[shift] += c;
      for (std::size_t i = 0; i < r1.size(); ++i) rem[shift + i] -= c * r1[i];
      trim(rem);
    }
    Vec s2 = s0;  // s2 = s0 - q*s1
    Vec qs = poly_mul(q, s1);
    s2.resize(std::max(s2.size(), qs.size()), Rat(0));
    for (std::size_t i = 0; i < qs.size(); ++i) s2[i] -= qs[i];
    trim(s2);
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  // r0 is a nonzero constant gcd (Phi_N irreducible); inverse = s0 / r0.
  if (r0.size() != 1) throw error("cyclotomic inverse: unexpected gcd degree");
  Cyc inv;
  inv.c = s0;
  for (auto& x : inv.c) x /= r0[0];
  trim(inv.c);
  return inv;
}

Cyc cyc_zeta(const CycloCtx& ctx) { return cyc_zeta_pow(ctx, 1); }

Cyc cyc_zeta_pow(const CycloCtx& ctx, unsigned k) {
  k %= ctx.order();
  Cyc base;
  if (ctx.degree() == 1) {
    // zeta is rational: 1 for N=1, -1 for N=2 (and the power table is moot).
    Rat z = ctx.order() == 2 ? Rat(-1) : Rat(1);
    Rat v(1);
    for (unsigned i = 0; i < k; ++i) v *= z;
    return Cyc::from_rat(v);
  }
  Cyc z;
  z.c = {Rat(0), Rat(1)};
  Cyc r = Cyc::one();
  for (unsigned i = 0; i < k; ++i) r = cyc_mul(ctx, r, z);
  return r;
}

std::complex<double> cyc_approx(const CycloCtx& ctx, const Cyc& a) {
  std::complex<double> zeta = std::polar(1.0, 2.0 * std::numbers::pi / ctx.order());
  std::complex<double> acc(0.0, 0.0), p(1.0, 0.0);
  for (const auto& coef : a.c) {
    acc += coef.get_d() * p;
    p *= zeta;
  }
  return acc;
}

std::string cyc_to_string(const Cyc& a) {
  if (a.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    const Rat& coef = a.c[i];
    if (coef == 0) continue;
    Rat abs = coef < 0 ? Rat(-coef) : coef;
    if (first) {
      if (coef < 0) out << "-";
      first = false;
    } else {
      out << (coef < 0 ? "-" : "+");
    }
    bool unit = abs == 1;
    if (i == 0) {
      out << abs.get_str();
    } else {
      if (!unit) out << abs.get_str() << "*";
      out << "zeta";
      if (i > 1) out << "^" << i;
    }
  }
  return out.str();
}

}  // namespace qho
