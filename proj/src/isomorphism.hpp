#ifndef QHO_ISOMORPHISM_HPP
#define QHO_ISOMORPHISM_HPP

#include "fragment.hpp"

namespace qho {

// A structure map between two fragments with the same shape: per fiber it
// is a rotation, phi(e_a[k]) = e'_a[k + offset(a)]. sign_trace records the
// epsilon in {1,-1} chosen at each inductive step, in build order
// (seed-major, upward steps then downward steps).
struct StructureMap {
  std::vector<unsigned> offset;  // indexed by base_id
  std::vector<int> sign_trace;
};

// Extends the identity on base points to a structure isomorphism that
// absorbs differing square-root choices into per-step signs. Throws
// odd_n_obstruction when a -1 sign is needed but -1 is not an N-th root of
// unity; throws qho::error when the fragments do not share their shape.
StructureMap extend_isomorphism(const Fragment& a, const Fragment& b);

struct IsoReport {
  bool pass = true;
  std::string detail;
};

// Exhaustive verification: pi-commutation, action equivariance, and that
// the image of every witness triple satisfies the witness relation of the
// target fragment (including the even-N sign rule).
IsoReport verify_isomorphism(const StructureMap& map, const Fragment& a, const Fragment& b);

// Composition A->B->C of maps over fragments of equal shape.
StructureMap compose(const StructureMap& ab, const StructureMap& bc, unsigned n);

std::string sign_trace_json(const StructureMap& map);

}  // namespace qho

#endif
