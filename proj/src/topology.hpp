#ifndef QHO_TOPOLOGY_HPP
#define QHO_TOPOLOGY_HPP

#include "engine.hpp"

namespace qho {

// A basic closed set: a general core formula whose predicate is an
// F[N]-invariant system of polynomial equations (single cell, no
// negations, no bound block).
struct BasicClosedSet {
  GeneralCoreFormula gcf;
};

// Validates closedness and invariance.
BasicClosedSet make_basic_closed(GeneralCoreFormula gcf, const Fragment& frag);

// The universe of the geometry with one H-variable: the canonical-basis
// locus lambda^N = 1 over a free base coordinate (the image of L in H).
BasicClosedSet full_structure(const Fragment& frag);
// A single point: alpha and lambda pinned.
BasicClosedSet point_set(const Fragment& frag, const Scalar& alpha, const Scalar& lambda);
BasicClosedSet empty_set(const Fragment& frag);

// Intersection via the tilde-merge (parameters aligned first when needed),
// re-invariantized if the merge disturbed invariance.
BasicClosedSet intersect(const BasicClosedSet& a, const BasicClosedSet& b,
                         const Fragment& frag);

// Fixed point of the class-fusion refinement: classes whose base
// coordinates are forced equal by R are merged. dim is defined on
// canonical sets.
BasicClosedSet canonicalize(const BasicClosedSet& c, const Fragment& frag);
bool is_canonical(const BasicClosedSet& c, const Fragment& frag);

// Krull dimension of the associated variety P(F).
int dim(const BasicClosedSet& c, const Fragment& frag);

// First index from which the descending chain is constant (ideal
// equality); throws not_descending if containment fails at ideal level.
std::size_t chain_stabilizes(const std::vector<BasicClosedSet>& chain);

// Ideal-level containment V(b) subseteq V(a) of two sets with one shape.
bool closed_contains(const BasicClosedSet& outer, const BasicClosedSet& inner);
bool closed_equal(const BasicClosedSet& a, const BasicClosedSet& b);

std::string chain_report_json(const std::vector<BasicClosedSet>& chain,
                              const Fragment& frag);

}  // namespace qho

#endif
