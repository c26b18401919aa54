#include "ratfunc.hpp"

#include <sstream>

#include "errors.hpp"

namespace qho {

namespace {

using PolyT = std::vector<Cyc>;

void trim(PolyT& v) {
  while (!v.empty() && v.back().is_zero()) v.pop_back();
}

PolyT pmul(const CycloCtx& ctx, const PolyT& a, const PolyT& b) {
  if (a.empty() || b.empty()) return {};
  PolyT r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      r[i + j] = cyc_add(r[i + j], cyc_mul(ctx, a[i], b[j]));
  trim(r);
  return r;
}

PolyT padd(const PolyT& a, const PolyT& b) {
  PolyT r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = cyc_add(r[i], a[i]);
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = cyc_add(r[i], b[i]);
  trim(r);
  return r;
}

PolyT pneg(const PolyT& a) {
  PolyT r = a;
  for (auto& c : r) c = cyc_neg(c);
  return r;
}

// Remainder of a mod b (b nonzero), Euclidean division over the field.
PolyT pmod(const CycloCtx& ctx, PolyT a, const PolyT& b) {
  Cyc lead_inv = cyc_inv(ctx, b.back());
  while (a.size() >= b.size() && !a.empty()) {
    Cyc c = cyc_mul(ctx, a.back(), lead_inv);
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i)
      a[shift + i] = cyc_sub(a[shift + i], cyc_mul(ctx, c, b[i]));
    trim(a);
  }
  return a;
}

PolyT pgcd(const CycloCtx& ctx, PolyT a, PolyT b) {
  while (!b.empty()) {
    PolyT r = pmod(ctx, std::move(a), b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

PolyT pdiv_exact(const CycloCtx& ctx, PolyT a, const PolyT& b) {
  if (b.empty()) throw zero_inversion();
  PolyT q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0);
  Cyc lead_inv = cyc_inv(ctx, b.back());
  while (a.size() >= b.size() && !a.empty()) {
    Cyc c = cyc_mul(ctx, a.back(), lead_inv);
    std::size_t shift = a.size() - b.size();
    q[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i)
      a[shift + i] = cyc_sub(a[shift + i], cyc_mul(ctx, c, b[i]));
    trim(a);
  }
  trim(q);
  return q;
}

RatF normalized(const CycloCtx& ctx, PolyT num, PolyT den) {
  if (den.empty()) throw zero_inversion();
  RatF r;
  if (num.empty()) return r;
  if (den.size() > 1 || num.size() > 1) {
    PolyT g = pgcd(ctx, num, den);
    if (g.size() > 1) {
      num = pdiv_exact(ctx, std::move(num), g);
      den = pdiv_exact(ctx, std::move(den), g);
    }
  }
  // make denominator monic
  if (!(den.back() == Cyc::one())) {
    Cyc inv = cyc_inv(ctx, den.back());
    for (auto& c : num) c = cyc_mul(ctx, c, inv);
    for (auto& c : den) c = cyc_mul(ctx, c, inv);
  }
  r.num = std::move(num);
  r.den = std::move(den);
  return r;
}

std::string poly_t_to_string(const PolyT& p) {
  if (p.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].is_zero()) continue;
    std::string cs = cyc_to_string(p[i]);
    bool compound = cs.find('+') != std::string::npos ||
                    cs.find('-', 1) != std::string::npos;
    if (!first) {
      if (!compound && !cs.empty() && cs[0] == '-') {
        out << "-";
        cs = cs.substr(1);
      } else {
        out << "+";
      }
    }
    first = false;
    if (i == 0) {
      out << (compound ? "(" + cs + ")" : cs);
    } else {
      if (cs == "1") {
      } else if (cs == "-1") {
        out << "-";
      } else {
        out << (compound ? "(" + cs + ")" : cs) << "*";
      }
      out << "t";
      if (i > 1) out << "^" << i;
    }
  }
  return out.str();
}

}  // namespace

RatF RatF::from_cyc(const Cyc& c) {
  RatF r;
  if (!c.is_zero()) r.num = {c};
  return r;
}

RatF RatF::t() {
  RatF r;
  r.num = {Cyc::zero(), Cyc::one()};
  return r;
}

RatF rf_add(const CycloCtx& ctx, const RatF& a, const RatF& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den.size() == 1 && b.den.size() == 1 && a.den[0] == Cyc::one() &&
      b.den[0] == Cyc::one()) {
    RatF r;
    r.num = padd(a.num, b.num);
    return r;
  }
  PolyT num = padd(pmul(ctx, a.num, b.den), pmul(ctx, b.num, a.den));
  PolyT den = pmul(ctx, a.den, b.den);
  return normalized(ctx, std::move(num), std::move(den));
}

RatF rf_sub(const CycloCtx& ctx, const RatF& a, const RatF& b) {
  return rf_add(ctx, a, rf_neg(b));
}

RatF rf_neg(const RatF& a) {
  RatF r = a;
  r.num = pneg(r.num);
  return r;
}

RatF rf_mul(const CycloCtx& ctx, const RatF& a, const RatF& b) {
  if (a.is_zero() || b.is_zero()) return RatF();
  if (a.is_constant() && b.is_constant()) {
    RatF r;
    r.num = {cyc_mul(ctx, a.num[0], b.num[0])};
    return r;
  }
  return normalized(ctx, pmul(ctx, a.num, b.num), pmul(ctx, a.den, b.den));
}

RatF rf_inv(const CycloCtx& ctx, const RatF& a) {
  if (a.is_zero()) throw zero_inversion();
  return normalized(ctx, a.den, a.num);
}

std::complex<double> rf_approx(const CycloCtx& ctx, const RatF& a,
                               std::complex<double> t_value) {
  auto eval = [&](const PolyT& p) {
    std::complex<double> acc(0.0, 0.0), pw(1.0, 0.0);
    for (const auto& c : p) {
      acc += cyc_approx(ctx, c) * pw;
      pw *= t_value;
    }
    return acc;
  };
  return eval(a.num) / eval(a.den);
}

std::string rf_to_string(const RatF& a) {
  if (a.is_zero()) return "0";
  std::string num = poly_t_to_string(a.num);
  if (a.den.size() == 1 && a.den[0] == Cyc::one()) return num;
  std::string den = poly_t_to_string(a.den);
  auto paren = [](const std::string& s) {
    bool atomic = s.find('+') == std::string::npos &&
                  s.find('-', 1) == std::string::npos &&
                  s.find('*') == std::string::npos &&
                  s.find('/') == std::string::npos;
    return atomic ? s : "(" + s + ")";
  };
  return paren(num) + "/" + paren(den);
}

}  // namespace qho
