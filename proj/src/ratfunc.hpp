#ifndef QHO_RATFUNC_HPP
#define QHO_RATFUNC_HPP

#include <complex>
#include <string>
#include <vector>

#include "cyclotomic.hpp"

namespace qho {

// Element of Q(zeta_N)(t): a normalized fraction of polynomials in the
// formal transcendental t. Invariants: den is monic, gcd(num, den) = 1,
// zero is num = {} with den = {1}. Scalars that never touch t stay at
// degree 0, which the arithmetic fast-paths.
struct RatF {
  std::vector<Cyc> num;
  std::vector<Cyc> den;  // never empty; monic

  RatF() : den{Cyc::one()} {}

  bool is_zero() const { return num.empty(); }
  bool is_constant() const { return num.size() <= 1 && den.size() == 1; }
  bool is_rational() const { return is_constant() && (num.empty() || num[0].is_rational()); }
  Cyc constant() const { return num.empty() ? Cyc::zero() : num[0]; }

  static RatF from_cyc(const Cyc& c);
  static RatF from_rat(const Rat& r) { return from_cyc(Cyc::from_rat(r)); }
  static RatF t();

  bool operator==(const RatF& o) const { return num == o.num && den == o.den; }
  bool operator!=(const RatF& o) const { return !(*this == o); }
};

RatF rf_add(const CycloCtx& ctx, const RatF& a, const RatF& b);
RatF rf_sub(const CycloCtx& ctx, const RatF& a, const RatF& b);
RatF rf_neg(const RatF& a);
RatF rf_mul(const CycloCtx& ctx, const RatF& a, const RatF& b);
RatF rf_inv(const CycloCtx& ctx, const RatF& a);  // throws zero_inversion

std::complex<double> rf_approx(const CycloCtx& ctx, const RatF& a, std::complex<double> t_value);

// "(t^2+1)/(t-2)", "3/2", "zeta*t". Parenthesizes compound num/den.
std::string rf_to_string(const RatF& a);

}  // namespace qho

#endif
