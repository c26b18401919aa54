#ifndef QHO_TOWER_HPP
#define QHO_TOWER_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ratfunc.hpp"

namespace qho {

class Tower;
using TowerPtr = std::shared_ptr<const Tower>;

// Coordinates of a tower element: square-free monomials in the adjoined
// square-root generators (bitmask over generator indices) with coefficients
// in Q(zeta_N)(t). No zero coefficients are stored, and no resolved
// generator bit ever appears in a mask; together with the RatF invariants
// this makes the representation a unique normal form.
using Coords = std::map<std::uint32_t, RatF>;

class Scalar;

// Raised when inverting a nonzero element exposes a zero divisor: the top
// generator of the element is actually an element of the lower tower. The
// exception carries the branch that keeps the dividend nonzero; callers
// migrate their scalars with Tower::lift and retry.
class branch_split : public error {
 public:
  branch_split(TowerPtr tower, unsigned gen);
  TowerPtr resolved_tower;
  unsigned gen;
};

// An exact element of a tower. Immutable value type; arithmetic between
// scalars lifts to the deeper of the two towers (which must be related).
class Scalar {
 public:
  Scalar() = default;  // invalid until assigned; only for containers
  Scalar(TowerPtr tw, Coords c) : tw_(std::move(tw)), c_(std::move(c)) {}

  const TowerPtr& tower() const { return tw_; }
  const Coords& coords() const { return c_; }
  bool valid() const { return tw_ != nullptr; }

  bool is_zero() const { return c_.empty(); }
  bool is_rational() const;
  bool is_integer() const;
  Rat to_rat() const;  // requires is_rational()

  Scalar operator-() const;
  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend bool operator==(const Scalar& a, const Scalar& b);
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  std::string to_string() const;
  std::complex<double> approx() const;

 private:
  TowerPtr tw_;
  Coords c_;
};

// A finitely generated field: Q(zeta_N)(t) extended by square roots
// g_i^2 = r_i where each radicand r_i mentions only generators with smaller
// index. Immutable; adjunctions and branch splits produce new towers that
// share their prefix. Lineage is tracked so scalars lift across compatible
// towers automatically.
class Tower : public std::enable_shared_from_this<Tower> {
 public:
  struct Gen {
    Coords radicand;
    bool resolved = false;
    Coords value;  // meaningful when resolved
  };

  static TowerPtr make(unsigned n);

  unsigned root_order() const { return n_; }
  const CycloCtx& cyclo() const { return *cyclo_; }
  const std::vector<Gen>& gens() const { return gens_; }
  unsigned lineage_depth() const { return lineage_depth_; }
  TowerPtr parent() const { return parent_; }

  // Scalar factories.
  Scalar zero() const;
  Scalar one() const;
  Scalar from_rat(const Rat& r) const;
  Scalar from_int(long v) const;
  // Primitive N-th root of unity: order exactly N.
  Scalar zeta() const;
  Scalar zeta_pow(long k) const;
  Scalar transcendental() const;
  Scalar gen_scalar(unsigned i) const;
  Scalar radicand(unsigned i) const;

  // Adjoin a square root of r (which must live over `t`). Rational
  // radicands are reduced to their square-free core first, so perfect
  // squares come back as plain rationals and re-adjoining an equivalent
  // radicand reuses the generator. Everything else is adjoined formally;
  // collisions surface later as branch splits.
  struct AdjoinResult {
    TowerPtr tower;
    Scalar root;
  };
  static AdjoinResult adjoin_sqrt(TowerPtr t, const Scalar& r);

  // Adjoins a fresh generator with radicand r unconditionally, without the
  // square-free reduction or generator reuse. Radicands that turn out to be
  // squares make the quotient a ring with zero divisors; the collision is
  // then discovered at inversion time as a branch_split.
  static AdjoinResult adjoin_sqrt_formal(TowerPtr t, const Scalar& r);

  // Tower with generator `gen` resolved to `value` (a branch choice).
  TowerPtr resolve(unsigned gen, const Coords& value) const;

  // Rewrites a scalar from an ancestor tower into this tower's normal form.
  // Throws if the scalar's tower is not an ancestor (or this tower itself).
  Scalar lift(const Scalar& x) const;

  bool is_ancestor_of(const Tower* other) const;

 private:
  Tower() = default;

  unsigned n_ = 1;
  std::shared_ptr<const CycloCtx> cyclo_;
  std::vector<Gen> gens_;
  TowerPtr parent_;
  unsigned lineage_depth_ = 0;
  // lineage step that produced this tower from parent_
  enum class Step { root, add_gen, resolve_gen } step_ = Step::root;
  unsigned step_gen_ = 0;
};

// Exact inverse. Throws zero_inversion on zero and branch_split when the
// representation is not a field at x.
Scalar inv(const Scalar& x);
Scalar pow(const Scalar& x, long e);

// Deterministic total order on normal forms (not numeric order).
bool scalar_less(const Scalar& a, const Scalar& b);

// Textual syntax: rationals `p/q`, `zeta`, `t`, `sqrt{<expr>}`, `+ - * / ^`,
// parentheses. Parsing may extend the tower (sqrt adjunction); the pointer
// is updated in place. Round trip print -> parse is exact.
Scalar parse_scalar(const std::string& text, TowerPtr& tower);

}  // namespace qho

#endif
