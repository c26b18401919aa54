#ifndef QHO_FORMULA_HPP
#define QHO_FORMULA_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "constructible.hpp"
#include "tower.hpp"

namespace qho {

// Sorted variable identifier: family prefix plus indices, e.g. e_1_2,
// alpha_1, c_1_2_3. H-sort families: e f g h p q; field-sort families:
// alpha gamma delta epsilon b m o lambda mu a c.
struct VarId {
  std::string family;
  std::vector<unsigned> idx;

  std::string name() const;
  bool operator==(const VarId& o) const = default;
  bool operator<(const VarId& o) const;
};

enum class SortTag { H, F };
bool is_h_family(const std::string& family);
bool is_f_family(const std::string& family);
SortTag sort_of(const VarId& v);
VarId parse_var_id(const std::string& name);

struct HTerm {
  VarId var;
  bool operator==(const HTerm& o) const = default;
};

// Field-sort term: a variable, a scalar literal, or the projection p(h) of
// an H-sort term to its base point.
struct FTerm {
  enum class Kind { var, scalar, proj };
  Kind kind = Kind::var;
  VarId var;       // Kind::var
  Scalar value;    // Kind::scalar
  VarId proj_arg;  // Kind::proj

  static FTerm of_var(VarId v);
  static FTerm of_scalar(Scalar s);
  static FTerm of_proj(VarId h);
  bool operator==(const FTerm& o) const;
  std::string to_string() const;
};

// Polynomial atom lhs REL rhs over field-sort variables and p(h) pseudo
// variables. Sides are canonical polynomials over the atom's variable
// list (canonically ordered); the pseudo variable p(h_i) is the ring
// variable named "p(h_i)".
struct PolyAtom {
  std::vector<std::string> vars;
  Poly lhs, rhs;
  bool negated = false;  // != instead of =

  bool operator==(const PolyAtom& o) const {
    return vars == o.vars && lhs == o.lhs && rhs == o.rhs && negated == o.negated;
  }
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
 public:
  enum class Kind {
    truth,        // constant true/false
    conj,         // children
    disj,         // children
    neg,          // children[0]
    exists,       // binders, children[0]
    atom_e,       // E(e_arg, e_fiber)
    atom_ladder,  // [a|adag]^steps(lad_from) = lad_coef * lad_to
    atom_heq,     // heq_lhs = [heq_coef *] heq_rhs
    atom_poly,    // poly
  };

  Kind kind = Kind::truth;
  bool truth_value = true;
  std::vector<FormulaPtr> children;
  std::vector<VarId> binders;
  HTerm e_arg;
  FTerm e_fiber;
  bool dagger = false;
  unsigned steps = 1;
  HTerm lad_from, lad_to;
  FTerm lad_coef;
  HTerm heq_lhs, heq_rhs;
  std::optional<FTerm> heq_coef;
  PolyAtom poly;

  // Free variables of each sort, in canonical order.
  std::vector<VarId> free_vars() const;
};

FormulaPtr f_true();
FormulaPtr f_false();
FormulaPtr f_and(std::vector<FormulaPtr> children);  // flattens; empty -> true
FormulaPtr f_or(std::vector<FormulaPtr> children);   // flattens; empty -> false
FormulaPtr f_not(FormulaPtr f);
FormulaPtr f_exists(std::vector<VarId> binders, FormulaPtr body);
FormulaPtr f_atom_e(HTerm h, FTerm fiber);
FormulaPtr f_atom_ladder(bool dagger, unsigned steps, HTerm from, FTerm coef, HTerm to);
FormulaPtr f_atom_heq(HTerm lhs, std::optional<FTerm> coef, HTerm rhs);
FormulaPtr f_atom_poly(PolyAtom atom);

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);
std::string print_formula(const FormulaPtr& f);
// Parses the DSL; sqrt{...} literals may extend the tower in place.
FormulaPtr parse_formula(const std::string& text, TowerPtr& tower);

// --------------------------------------------------------------------------
// Builders for the core-formula scaffolding.

using IndexPair = std::pair<unsigned, unsigned>;
// (i,j) -> chain length n_(i,j) >= 1
using ChainMap = std::map<IndexPair, unsigned>;

// The partitioning enumeration of an H-variable tuple: n variables grouped
// as {e_ij : 1 <= i <= s, 1 <= j <= s_i}, plus the parameter block
// {e_{s+i,j} : 1 <= i <= t, 1 <= j <= t_i}.
struct PartitionEnumeration {
  std::vector<unsigned> class_sizes;  // s_i
  std::vector<unsigned> param_sizes;  // t_i

  unsigned s() const { return static_cast<unsigned>(class_sizes.size()); }
  unsigned t() const { return static_cast<unsigned>(param_sizes.size()); }
  unsigned n() const;
  unsigned r() const;
};

// A^Sigma = /\ E(f_i, alpha_i) ^ G^Sigma ^ /\ e_ij = lambda_ij f_i.
// The chain clause of G^Sigma reads (c^(i,j)_k)^2 = alpha_i + (k-1): the
// k-th witness of the ladder walk squares to the base reached after k-1
// raising steps, matching the b^2 = a axiom.
FormulaPtr build_A_sigma(const PartitionEnumeration& part, const ChainMap& sigma,
                         const TowerPtr& tower);
// B(e, h, mu) = /\ e_{s+i,j} = mu_ij h_i.
FormulaPtr build_B(const PartitionEnumeration& part);
// D_1: chains from f_i landing on parameter fibers (E(p_(i,j), p(h_j))).
FormulaPtr build_D1(const PartitionEnumeration& part, const ChainMap& delta1,
                    const TowerPtr& tower);
// D_2: chains from the parameters h_i landing on f_j fibers.
FormulaPtr build_D2(const PartitionEnumeration& part, const ChainMap& delta2,
                    const TowerPtr& tower);

// Constructible predicate as a formula (union of conjunction cells).
FormulaPtr pred_to_formula(const Pred& pred);

// The general core formula in display form: the quantifier block over
// A^Sigma ^ D_1 ^ D_2 ^ B ^ R.
FormulaPtr build_general_core(const PartitionEnumeration& part, const ChainMap& sigma,
                              const ChainMap& delta1, const ChainMap& delta2,
                              const Pred& r, const TowerPtr& tower);

}  // namespace qho

#endif
