#ifndef QHO_FRAGMENT_HPP
#define QHO_FRAGMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tower.hpp"

namespace qho {

// A point of the projective line: a field value or the distinguished
// infinity (whose Z-orbit is a singleton: infinity + 1 = infinity).
struct BasePoint {
  bool infinite = false;
  Scalar value;  // valid iff !infinite

  static BasePoint inf() { return BasePoint{true, Scalar()}; }
  static BasePoint at(Scalar v) { return BasePoint{false, std::move(v)}; }
};

// A point of the cover L, addressed inside a fragment: fiber points over
// base `base_id` are labelled by powers of the fixed primitive root,
// point k = zeta^k . section_point.
struct LinePoint {
  std::size_t base_id = 0;
  unsigned index = 0;  // mod N

  bool operator==(const LinePoint& o) const {
    return base_id == o.base_id && index == o.index;
  }
};

// An element of the bundle H: the equivalence class [(e, x)]. Stored in
// normal form: index 0 representative, zero scalar forces index 0 as well,
// so classes are equal iff the fields are equal.
struct BundleVector {
  std::size_t base_id = 0;
  Scalar scalar;  // coordinate against the index-0 section point

  bool is_zero() const { return scalar.is_zero(); }
  bool operator==(const BundleVector& o) const {
    return base_id == o.base_id && scalar == o.scalar;
  }
  bool operator!=(const BundleVector& o) const { return !(*this == o); }
};

// One generator of the witness relation orbit over a consecutive base pair
// (a, a+1): A(e_a[e_index], e_{a+1}[eup_index], b) with b^2 = a. The full
// relation is its closure under the group action (and the sign rule for
// even N).
struct LadderWitness {
  std::size_t base_id = 0;  // the lower base a
  unsigned e_index = 0;
  unsigned eup_index = 0;
  Scalar b;
};

struct SqrtPolicy {
  enum class Kind { canonical, random_sign, explicit_signs };
  Kind kind = Kind::canonical;
  std::uint64_t seed = 0;          // random_sign
  std::vector<int> signs;          // explicit_signs, +1/-1 in build order

  static SqrtPolicy canonical() { return SqrtPolicy{}; }
  static SqrtPolicy random(std::uint64_t seed);
  static SqrtPolicy explicit_list(std::vector<int> signs);
  // "canonical" | "random:<seed>" | "signs:+1,-1,..."
  static SqrtPolicy parse(const std::string& text);
};

// A finite generated piece of the model: Z-coset segments of base points
// (plus the infinity fiber), N-point fibers, and one ladder witness orbit
// per consecutive base pair. Plain data; check_axioms validates, mutation
// tests perturb copies.
struct Fragment {
  unsigned n = 1;
  TowerPtr tower;
  std::vector<Scalar> seeds;
  unsigned depth = 0;
  unsigned depth_below = 0;              // in-memory extension, not serialized
  std::vector<BasePoint> bases;          // finite bases in build order, then infinity
  std::vector<std::optional<std::size_t>> up;    // base_id of a+1
  std::vector<std::optional<std::size_t>> down;  // base_id of a-1
  std::vector<std::optional<LadderWitness>> witness;  // by lower base_id
  bool include_sign_orbit = true;        // even N; mutation tests may clear

  std::size_t infinity_id() const { return bases.size() - 1; }
  std::size_t base_count() const { return bases.size(); }
  bool is_infinite(std::size_t id) const { return bases[id].infinite; }
  const Scalar& base_value(std::size_t id) const { return bases[id].value; }
  std::optional<std::size_t> find_base(const Scalar& v) const;

  // Class of (e_{base}[index], x), normalized.
  BundleVector vector(std::size_t base_id, unsigned index, const Scalar& x) const;
  BundleVector zero_vector(std::size_t base_id) const;
  // The canonical basis element (e_{base}[index], 1).
  BundleVector basis_element(std::size_t base_id, unsigned index) const;
  bool is_canonical_basis(const BundleVector& v) const;
  // index k with v = basis_element(base, k), if v is canonical.
  std::optional<unsigned> basis_index(const BundleVector& v) const;
};

Fragment build_fragment(unsigned n, const std::vector<Scalar>& seeds, unsigned depth,
                        const SqrtPolicy& policy = SqrtPolicy::canonical(),
                        unsigned depth_below = 0);

// Bundle operations: lambda*(e,x) = (e, lambda*x), (e,x)+(e,y) = (e, x+y).
BundleVector bundle_scale(const Fragment& frag, const Scalar& lambda, const BundleVector& v);
BundleVector bundle_add(const Fragment& frag, const BundleVector& a, const BundleVector& b);

// The raising map V_a -> V_{a+1} (witness scalar b, b^2 = a) and the
// lowering map V_{a+1} -> V_a with the same witness scalar.
BundleVector apply_a(const Fragment& frag, const BundleVector& v);
BundleVector apply_adag(const Fragment& frag, const BundleVector& v);
// n-fold application; n = 0 is the identity.
BundleVector apply_a_pow(const Fragment& frag, const BundleVector& v, unsigned n);
BundleVector apply_adag_pow(const Fragment& frag, const BundleVector& v, unsigned n);

// pi(v) + 1/2; throws infinite_point at infinity.
Scalar hamiltonian_eigenvalue(const Fragment& frag, const BundleVector& v);

// Repeated lowering; returns the step at which the zero vector appears, or
// max_steps if it never does (also when the chain exits the fragment).
std::pair<unsigned, BundleVector> lower_to_ground(const Fragment& frag,
                                                  const BundleVector& v,
                                                  unsigned max_steps);

// Fragment bases that are non-negative integers, ascending.
std::vector<Scalar> real_part(const Fragment& frag);

struct AxiomCheck {
  int axiom = 0;  // 3..6
  bool pass = true;
  std::string detail;
};

struct AxiomReport {
  std::vector<AxiomCheck> checks;
  bool all_pass() const;
  std::string to_string() const;
};

// Exhaustive check of axioms 3-6 over the fragment domain, with a concrete
// counterexample on failure.
AxiomReport check_axioms(const Fragment& frag);

// Materialized witness relation triples for a base pair, for checks and
// the oracle: (e_index, eup_index, b) with implicit group shift.
struct WitnessTriple {
  unsigned e_index;
  unsigned eup_index;
  Scalar b;
};
// All (e, e', b) with pi(e) = a for the pair (a, a+1), e at fiber index k.
std::vector<WitnessTriple> witness_triples_at(const Fragment& frag, std::size_t base_id,
                                              unsigned k);

std::string fragment_to_json(const Fragment& frag);
Fragment fragment_from_json(const std::string& json);

}  // namespace qho

#endif
