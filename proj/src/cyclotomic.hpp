#ifndef QHO_CYCLOTOMIC_HPP
#define QHO_CYCLOTOMIC_HPP

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace qho {

using Rat = mpq_class;

// Q(zeta_N) = Q[z] / Phi_N(z). Elements are coefficient vectors of length
// phi(N) = deg Phi_N. For N = 1, 2 this degenerates to Q.
class CycloCtx {
 public:
  explicit CycloCtx(unsigned n);

  unsigned order() const { return n_; }
  unsigned degree() const { return degree_; }

  // Monic minimal polynomial of zeta_N, constant term first.
  const std::vector<Rat>& minimal_poly() const { return phi_; }

  // z^k reduced mod Phi_N, for 0 <= k <= 2*(degree-1).
  const std::vector<Rat>& power(unsigned k) const { return powers_[k]; }

 private:
  unsigned n_;
  unsigned degree_;
  std::vector<Rat> phi_;
  std::vector<std::vector<Rat>> powers_;
};

// Element of Q(zeta_N): dense coefficient vector, trailing zeros trimmed.
// All operations take the context explicitly; Cyc itself is plain data.
struct Cyc {
  std::vector<Rat> c;

  bool is_zero() const { return c.empty(); }
  bool is_rational() const { return c.size() <= 1; }
  Rat rat() const { return c.empty() ? Rat(0) : c[0]; }

  static Cyc from_rat(const Rat& r);
  static Cyc zero() { return Cyc{}; }
  static Cyc one() { return from_rat(Rat(1)); }

  bool operator==(const Cyc& o) const { return c == o.c; }
  bool operator!=(const Cyc& o) const { return c != o.c; }
};

Cyc cyc_add(const Cyc& a, const Cyc& b);
Cyc cyc_sub(const Cyc& a, const Cyc& b);
Cyc cyc_neg(const Cyc& a);
Cyc cyc_mul(const CycloCtx& ctx, const Cyc& a, const Cyc& b);
// Throws zero_inversion on zero. Phi_N is irreducible over Q, so every
// nonzero element is invertible.
Cyc cyc_inv(const CycloCtx& ctx, const Cyc& a);

// zeta_N itself (the class of z); equals 1 for N = 1 and -1 for N = 2.
Cyc cyc_zeta(const CycloCtx& ctx);
Cyc cyc_zeta_pow(const CycloCtx& ctx, unsigned k);

std::complex<double> cyc_approx(const CycloCtx& ctx, const Cyc& a);

// Prints as a polynomial in `zeta`, e.g. "1/2-3*zeta+zeta^2".
std::string cyc_to_string(const Cyc& a);

}  // namespace qho

#endif
