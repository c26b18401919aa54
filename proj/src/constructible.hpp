#ifndef QHO_CONSTRUCTIBLE_HPP
#define QHO_CONSTRUCTIBLE_HPP

#include "groebner.hpp"
#include "poly.hpp"

namespace qho {

// One constructible cell: V(eqs) minus the union of the V(neg) for each
// negated system. No negations means a closed cell.
struct Cell {
  std::vector<Poly> eqs;
  std::vector<std::vector<Poly>> negs;
};

// A constructible predicate: a finite union of cells over `ring`, with an
// optional block of existentially quantified variables (introduced by
// projection). Bound variables are decided over the algebraically closed
// ambient field, not the finitely generated tower.
struct Pred {
  PolyRingPtr ring;
  std::vector<std::string> bound;
  std::vector<Cell> cells;

  bool is_true() const;
  bool is_false() const { return cells.empty(); }
};

Pred pred_true(PolyRingPtr ring);
Pred pred_false(PolyRingPtr ring);
Pred pred_from_system(const PolySystem& sys);
Pred pred_from_cell(PolyRingPtr ring, Cell cell);

// Single positive cell without negations or quantifiers (a closed set).
bool pred_is_closed_system(const Pred& p);
PolySystem pred_positive_system(const Pred& p);  // requires pred_is_closed_system

Pred pred_conjoin(const Pred& a, const Pred& b);
Pred pred_union(const Pred& a, const Pred& b);
// Union of two closed systems as a closed system (ideal intersection).
PolySystem closed_union(const PolySystem& a, const PolySystem& b);

// Substitution on free variables (identity on bound ones).
Pred pred_substitute(const Pred& p, const VarSubst& subst);

// Decide p at a point: `assignment` fixes every free variable; bound
// variables are decided algebraically (Nullstellensatz / radical
// membership).
bool pred_eval(const Pred& p, const std::vector<std::optional<Scalar>>& assignment);

// Does the cell contain a point over the algebraic closure?
bool cell_nonempty(const PolyRing& ring, const Cell& cell);

// Normal form: per-cell reduced bases, degenerate cells and negations
// dropped, duplicates removed, deterministic cell order.
Pred pred_canonical(const Pred& p);
// Equality of canonical forms: exact for quantifier-free predicates whose
// cells match up to ideal equality (the artifact's per-cell criterion);
// for quantified predicates it compares bodies, which is sound but not
// complete.
bool pred_equal(const Pred& a, const Pred& b);

// Rebase the predicate onto a new ring; to_index maps old variable indices
// to new ones. The bound list is carried over by name.
Pred pred_map_vars(const Pred& p, PolyRingPtr new_ring,
                   const std::vector<std::size_t>& to_index);

// Quantify additional variables existentially (they must be ring vars).
Pred pred_quantify(const Pred& p, const std::vector<std::string>& vars);

std::string pred_to_string(const Pred& p);

}  // namespace qho

#endif
