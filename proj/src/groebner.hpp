#ifndef QHO_GROEBNER_HPP
#define QHO_GROEBNER_HPP

#include "poly.hpp"

namespace qho {

// Remainder of p on division by the (not necessarily Groebner) family basis.
Poly normal_form(const PolyRing& ring, const Poly& p, const std::vector<Poly>& basis,
                 MonoOrder order);

// Reduced Groebner basis of the ideal generated by sys under the order:
// monic, auto-reduced, sorted by leading monomial. Unique for the ideal,
// which makes ideal equality a plain comparison. Coefficient inversion may
// raise branch_split; it propagates to the caller.
PolySystem buchberger(const PolySystem& sys, MonoOrder order = MonoOrder::grevlex);

bool ideal_member(const PolySystem& sys, const Poly& p, MonoOrder order = MonoOrder::grevlex);
bool ideal_equal(const PolySystem& a, const PolySystem& b, MonoOrder order = MonoOrder::grevlex);
// Ideal is (1), i.e. the variety is empty over the algebraic closure.
bool ideal_trivial(const PolySystem& sys);
// I(a) contains I(b)'s variety: V(a) \supseteq V(b), decided as radical
// containment of the generators of a in sqrt(I(b)).
bool variety_contains(const PolySystem& outer, const PolySystem& inner);

// f in sqrt(I): Rabinowitsch trick.
bool radical_member(const PolySystem& sys, const Poly& f);

// Generators of the elimination ideal after dropping the named variables;
// the result ring is the original minus `drop` (original order preserved).
PolySystem eliminate(const PolySystem& sys, const std::set<std::string>& drop);

// Generators of I(a) \cap I(b) (whose variety is the union). Both systems
// must share a ring.
PolySystem ideal_intersect(const PolySystem& a, const PolySystem& b);

// Krull dimension of V(sys): max size of a variable subset independent
// modulo the initial ideal; -1 for the empty variety.
int ideal_dimension(const PolySystem& sys);

}  // namespace qho

#endif
