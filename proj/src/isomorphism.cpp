#include "isomorphism.hpp"

#include <sstream>

#include <json.hpp>

namespace qho {

namespace {

// Fragments built over the same seeds have twin towers (identical
// generator lists) but distinct lineages, so scalars are compared
// structurally.
bool same_value(const Scalar& x, const Scalar& y) { return x.coords() == y.coords(); }

void check_shapes(const Fragment& a, const Fragment& b) {
  if (a.n != b.n) throw error("fragments have different N");
  if (a.base_count() != b.base_count() || a.seeds.size() != b.seeds.size())
    throw error("fragments have different shapes");
  for (std::size_t i = 0; i < a.seeds.size(); ++i)
    if (!same_value(a.seeds[i], b.seeds[i])) throw error("fragments have different seeds");
  if (a.depth != b.depth || a.depth_below != b.depth_below)
    throw error("fragments have different depths");
  const auto& ga = a.tower->gens();
  const auto& gb = b.tower->gens();
  if (ga.size() != gb.size()) throw error("fragments have different towers");
  for (std::size_t i = 0; i < ga.size(); ++i)
    if (!(ga[i].radicand == gb[i].radicand))
      throw error("fragments have different towers");
}

}  // namespace

StructureMap extend_isomorphism(const Fragment& a, const Fragment& b) {
  check_shapes(a, b);
  unsigned n = a.n;
  StructureMap map;
  map.offset.assign(a.base_count(), 0u);

  std::size_t span = a.depth + a.depth_below + 1;
  for (std::size_t s = 0; s < a.seeds.size(); ++s) {
    std::size_t seed_id = s * span + a.depth_below;  // offset 0 base of the coset
    map.offset[seed_id] = 0;

    auto step = [&](std::size_t lower, std::size_t upper, bool upward) {
      const LadderWitness& wa = *a.witness[lower];
      const LadderWitness& wb = *b.witness[lower];
      unsigned da = (wa.eup_index + n - wa.e_index % n) % n;
      unsigned db = (wb.eup_index + n - wb.e_index % n) % n;
      int eps;
      if (same_value(wa.b, wb.b)) {
        eps = 1;
      } else if (same_value(wa.b, -wb.b)) {
        if (n % 2 != 0)
          throw odd_n_obstruction(
              "square-root choices differ at base " + a.base_value(lower).to_string() +
              " (" + wa.b.to_string() + " vs " + wb.b.to_string() +
              ") and -1 is not an N-th root of unity for N = " + std::to_string(n));
        eps = -1;
      } else {
        throw error("witness scalars are not sign-related at base " +
                    a.base_value(lower).to_string());
      }
      unsigned half = eps == -1 ? n / 2 : 0;
      if (upward) {
        unsigned sigma = map.offset[lower];
        map.offset[upper] = (sigma + db + n - da % n + half) % n;
      } else {
        unsigned sigma = map.offset[upper];
        map.offset[lower] = (sigma + da + n - db % n + (n - half) % n) % n;
      }
      map.sign_trace.push_back(eps);
    };

    // upward induction from the representative
    std::size_t cur = seed_id;
    while (a.up[cur].has_value()) {
      step(cur, *a.up[cur], true);
      cur = *a.up[cur];
    }
    // downward induction
    cur = seed_id;
    while (a.down[cur].has_value()) {
      step(*a.down[cur], cur, false);
      cur = *a.down[cur];
    }
  }
  // the infinity orbit maps identically
  map.offset[a.infinity_id()] = 0;
  return map;
}

IsoReport verify_isomorphism(const StructureMap& map, const Fragment& a, const Fragment& b) {
  IsoReport rep;
  try {
    check_shapes(a, b);
  } catch (const error& e) {
    return {false, e.what()};
  }
  if (map.offset.size() != a.base_count()) return {false, "map shape mismatch"};
  unsigned n = a.n;

  // action equivariance: phi(zeta^m . e[k]) = zeta^m . phi(e[k]) holds for
  // rotations; confirm at the class level.
  for (std::size_t id = 0; id < a.base_count(); ++id) {
    unsigned sigma = map.offset[id];
    for (unsigned k = 0; k < n; ++k) {
      BundleVector lhs = b.basis_element(id, (k + 1 + sigma) % n);
      BundleVector rhs = bundle_scale(b, b.tower->zeta(), b.basis_element(id, (k + sigma) % n));
      if (!(lhs == rhs))
        return {false, "action equivariance fails over base " + std::to_string(id)};
    }
  }

  // witness preservation, both relations, all gamma
  for (std::size_t id = 0; id < a.base_count(); ++id) {
    if (a.is_infinite(id) || !a.witness[id].has_value()) continue;
    if (!b.witness[id].has_value())
      return {false, "target fragment lacks a witness over base " +
                         b.base_value(id).to_string()};
    std::size_t up_id = *a.up[id];
    unsigned sigma = map.offset[id];
    unsigned sigma_up = map.offset[up_id];
    for (unsigned k = 0; k < n; ++k) {
      for (const auto& tr : witness_triples_at(a, id, k)) {
        unsigned image_e = (k + sigma) % n;
        unsigned image_eup = (tr.eup_index + sigma_up) % n;
        bool found = false;
        for (const auto& cand : witness_triples_at(b, id, image_e)) {
          if (cand.eup_index == image_eup && same_value(cand.b, tr.b)) found = true;
        }
        if (!found) {
          std::ostringstream out;
          out << "witness triple is not preserved at base " << a.base_value(id).to_string()
              << ": A(e[" << k << "], e'[" << tr.eup_index << "], " << tr.b.to_string()
              << ") has no image";
          return {false, out.str()};
        }
      }
    }
  }
  return rep;
}

StructureMap compose(const StructureMap& ab, const StructureMap& bc, unsigned n) {
  if (ab.offset.size() != bc.offset.size()) throw error("composing maps of different shapes");
  StructureMap out;
  out.offset.resize(ab.offset.size());
  for (std::size_t i = 0; i < ab.offset.size(); ++i)
    out.offset[i] = (ab.offset[i] + bc.offset[i]) % n;
  return out;
}

std::string sign_trace_json(const StructureMap& map) {
  nlohmann::json j = nlohmann::json::array();
  for (int s : map.sign_trace) j.push_back(s);
  return j.dump();
}

}  // namespace qho
