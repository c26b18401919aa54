#ifndef QHO_ENGINE_HPP
#define QHO_ENGINE_HPP

#include "gcf.hpp"

namespace qho {

inline constexpr unsigned kDefaultBlowupGuard = 4096;

// ---------------------------------------------------------------------------
// Semantic oracle.
//
// Decides whether the general core formula holds of (e, a) in the fragment
// by enumerating the canonical-basis choices per partition class (N per
// class) together with the basis choices of the chain targets, computing
// the forced scalar witnesses, and evaluating R exactly. Every syntactic
// transformation below is validated against this.
// e is the full (n + r)-tuple in partition order (class-major), a the free
// field tuple.
bool evaluate(const GeneralCoreFormula& gcf, const Fragment& frag,
              const std::vector<BundleVector>& e, const std::vector<Scalar>& a);

// ---------------------------------------------------------------------------
// The delta action and invariance.

// R^delta for delta in F[N]^s: the invertible substitution recording a
// change of canonical basis f_i -> d_i f_i,
//   gamma_ij -> (d_i d_j^-1) gamma_ij,  lambda_ij -> d_i^-1 lambda_ij,
//   delta_ij -> d_i delta_ij,           epsilon_ij -> d_j^-1 epsilon_ij,
// identity on alpha, b, m, o, mu, a and on R's bound block.
GeneralCoreFormula delta_action(const GeneralCoreFormula& gcf,
                                const std::vector<Scalar>& delta);

// R replaced by the union over all N^s delta-translates. Closed systems
// stay closed (ideal intersection); general predicates become cell unions.
GeneralCoreFormula invariant_closure(const GeneralCoreFormula& gcf,
                                     unsigned guard = kDefaultBlowupGuard);

bool is_invariant(const GeneralCoreFormula& gcf, unsigned guard = kDefaultBlowupGuard);

// ---------------------------------------------------------------------------
// The Stab(Delta) negation normal form, anchored at a concrete field tuple
// (the fragment-scale surrogate for the complete type). Both systems live
// over the gcf's predicate ring; the context assigns every free variable.
struct NnfResult {
  PolySystem r;  // R' = R ^ /\_{delta not in Stab} T^delta
  PolySystem s;  // S' = /\_delta T^delta, F[N]-invariant
};
NnfResult negation_normal_form(const GeneralCoreFormula& context, const PolySystem& r,
                               const PolySystem& s, const std::vector<Scalar>& at,
                               unsigned guard = kDefaultBlowupGuard);

// ---------------------------------------------------------------------------
// Lemma operations.

// exists f (R1 ^ R2) from exists f R1 and exists f R2 with R2 invariant;
// index data must coincide.
GeneralCoreFormula conj_split(const GeneralCoreFormula& a, const GeneralCoreFormula& b,
                              const Fragment& frag);

// Rewrites b's predicate over a's parameter tuple (same fibers), absorbing
// the group shifts into delta/epsilon/mu.
GeneralCoreFormula align_params(const GeneralCoreFormula& a, const GeneralCoreFormula& b,
                                const Fragment& frag);

// The tilde-merge: one general core formula over the finest common
// coarsening of the two partitions, predicate (R ^ S) with the equality
// clauses realized by variable identification. Both predicates must be
// invariant and the parameters aligned.
GeneralCoreFormula merge(const GeneralCoreFormula& a, const GeneralCoreFormula& b,
                         const Fragment& frag);

// exists e_{k,l}: the four-case projection lemma. k is 1-based over the
// s + t classes; l the 1-based member indices to remove. The quantified
// variables move into R's bound block; when R is a pure equation system an
// optional elimination pass replaces the bound block by its elimination
// ideal (the Zariski closure of the projection).
GeneralCoreFormula project(const GeneralCoreFormula& gcf, unsigned k,
                           const std::vector<unsigned>& l, const Fragment& frag,
                           bool eliminate_pass = false);

// Substitution of fragment vectors for e-variables of a core formula
// (t = 0): the disjunction over canonical-basis choices of the touched
// fibers, each disjunct a general core formula with parameters.
std::vector<GeneralCoreFormula> substitute_params(const GeneralCoreFormula& gcf,
                                                  const std::vector<unsigned>& positions,
                                                  const std::vector<BundleVector>& values,
                                                  const Fragment& frag);

// Diagnostic: the closure of V_R = { alpha : exists gamma b lambda a R }
// by elimination (closed systems only).
PolySystem v_r_closure(const GeneralCoreFormula& gcf);

}  // namespace qho

#endif
