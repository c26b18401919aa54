#ifndef QHO_POLY_HPP
#define QHO_POLY_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tower.hpp"

namespace qho {

// Desk-scale guardrails for user-facing systems. Internal computations
// (S-polynomials, tag variables, product ideals) are not re-checked.
inline constexpr std::size_t kMaxSystemVars = 16;
inline constexpr unsigned kMaxInputDegree = 8;

// Exponent vector; size equals the ring's variable count.
using Mono = std::vector<std::uint16_t>;

unsigned mono_degree(const Mono& m);
Mono mono_mul(const Mono& a, const Mono& b);
bool mono_divides(const Mono& a, const Mono& b);  // a | b
Mono mono_div(const Mono& b, const Mono& a);      // b / a, assumes divisibility
Mono mono_lcm(const Mono& a, const Mono& b);

enum class MonoOrder { grevlex, lex };

// Strict order under the given scheme; variable 0 is most significant.
bool mono_less(const Mono& a, const Mono& b, MonoOrder order);

// The coefficient/variable context polynomials live in. Variable names
// carry their sort family as a prefix (alpha_1, gamma_1_2, b_1_2,
// lambda_1_1, mu_1_1, a_1, ...). Index 0 is the most significant variable.
struct PolyRing {
  TowerPtr tower;
  std::vector<std::string> vars;

  int index_of(const std::string& name) const;
  std::size_t nvars() const { return vars.size(); }
};
using PolyRingPtr = std::shared_ptr<const PolyRing>;

PolyRingPtr make_ring(TowerPtr tower, std::vector<std::string> vars);

// Multivariate polynomial: monomial -> nonzero coefficient. Stored under a
// fixed canonical key order so the representation is independent of the
// monomial order in force; Groebner routines scan for leading terms.
struct Poly {
  std::map<Mono, Scalar> terms;

  bool is_zero() const { return terms.empty(); }
  unsigned total_degree() const;
  bool operator==(const Poly& o) const { return terms == o.terms; }
};

Poly poly_zero();
Poly poly_const(const PolyRing& ring, const Scalar& c);
Poly poly_var(const PolyRing& ring, std::size_t var);
void poly_add_term(const PolyRing& ring, Poly& p, const Mono& m, const Scalar& c);
Poly poly_add(const PolyRing& ring, const Poly& a, const Poly& b);
Poly poly_sub(const PolyRing& ring, const Poly& a, const Poly& b);
Poly poly_neg(const Poly& a);
Poly poly_mul(const PolyRing& ring, const Poly& a, const Poly& b);
Poly poly_scale(const PolyRing& ring, const Poly& a, const Scalar& c);

// Leading term under the order (largest monomial).
std::pair<Mono, Scalar> leading_term(const Poly& p, MonoOrder order);

// Full evaluation; assignment maps variable index to value. Every variable
// occurring in p must be assigned.
Scalar poly_eval(const PolyRing& ring, const Poly& p,
                 const std::vector<std::optional<Scalar>>& assignment);
// Partial evaluation: assigned variables are substituted, the result lives
// in the same ring (assigned variables simply no longer occur).
Poly poly_partial_eval(const PolyRing& ring, const Poly& p,
                       const std::vector<std::optional<Scalar>>& assignment);

// A finite system of polynomial equations { p = 0 }.
struct PolySystem {
  PolyRingPtr ring;
  std::vector<Poly> polys;
};

PolySystem make_system(PolyRingPtr ring, std::vector<Poly> polys);
// Guard check used by parsers and public entry points.
void check_system_guards(const PolySystem& sys);

// Invertible per-variable substitution x -> c * y where c is a unit scalar
// and y a variable of the target ring (identity on unmapped variables).
struct VarSubst {
  // target variable index and unit coefficient, per source variable
  std::vector<std::pair<std::size_t, Scalar>> map;
};
VarSubst identity_subst(const PolyRing& ring);
Poly poly_substitute(const PolyRing& ring, const Poly& p, const VarSubst& subst);
PolySystem system_substitute(const PolySystem& sys, const VarSubst& subst);

// Rename/permute variables into another ring; `to_index[i]` locates source
// variable i in the target ring.
Poly poly_reindex(const Poly& p, const std::vector<std::size_t>& to_index,
                  std::size_t target_nvars);

std::string poly_to_string(const PolyRing& ring, const Poly& p);
// Infix parser; unknown identifiers must be ring variables. The tower may
// grow through sqrt{...} coefficients, in which case the caller rebuilds
// the ring afterwards.
Poly parse_poly(const std::string& text, const std::vector<std::string>& vars,
                TowerPtr& tower);

}  // namespace qho

#endif
