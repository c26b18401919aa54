#include "fragment.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <json.hpp>

namespace qho {

SqrtPolicy SqrtPolicy::random(std::uint64_t seed) {
  SqrtPolicy p;
  p.kind = Kind::random_sign;
  p.seed = seed;
  return p;
}

SqrtPolicy SqrtPolicy::explicit_list(std::vector<int> signs) {
  SqrtPolicy p;
  p.kind = Kind::explicit_signs;
  p.signs = std::move(signs);
  return p;
}

SqrtPolicy SqrtPolicy::parse(const std::string& text) {
  if (text.empty() || text == "canonical") return canonical();
  if (text.rfind("random:", 0) == 0) {
    return random(std::stoull(text.substr(7)));
  }
  if (text.rfind("signs:", 0) == 0) {
    std::vector<int> signs;
    std::stringstream ss(text.substr(6));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == "+1" || item == "1")
        signs.push_back(1);
      else if (item == "-1")
        signs.push_back(-1);
      else
        throw parse_error("sqrt policy signs must be +1/-1");
    }
    return explicit_list(std::move(signs));
  }
  throw parse_error("unknown sqrt policy: " + text);
}

std::optional<std::size_t> Fragment::find_base(const Scalar& v) const {
  for (std::size_t i = 0; i < bases.size(); ++i)
    if (!bases[i].infinite && bases[i].value == v) return i;
  return std::nullopt;
}

BundleVector Fragment::vector(std::size_t base_id, unsigned index, const Scalar& x) const {
  BundleVector v;
  v.base_id = base_id;
  if (x.is_zero()) {
    v.scalar = tower->zero();
    return v;
  }
  // (zeta^k . e0, x) ~ (e0, zeta^k x)
  v.scalar = tower->zeta_pow(static_cast<long>(index % n)) * x;
  return v;
}

BundleVector Fragment::zero_vector(std::size_t base_id) const {
  return vector(base_id, 0, tower->zero());
}

BundleVector Fragment::basis_element(std::size_t base_id, unsigned index) const {
  return vector(base_id, index, tower->one());
}

bool Fragment::is_canonical_basis(const BundleVector& v) const {
  if (v.is_zero()) return false;
  return pow(v.scalar, n) == tower->one();
}

std::optional<unsigned> Fragment::basis_index(const BundleVector& v) const {
  if (v.is_zero()) return std::nullopt;
  for (unsigned k = 0; k < n; ++k)
    if (v.scalar == tower->zeta_pow(k)) return k;
  return std::nullopt;
}

namespace {

int next_sign(const SqrtPolicy& policy, std::mt19937_64& rng, std::size_t& cursor) {
  switch (policy.kind) {
    case SqrtPolicy::Kind::canonical:
      return 1;
    case SqrtPolicy::Kind::random_sign:
      return (rng() & 1) ? 1 : -1;
    case SqrtPolicy::Kind::explicit_signs:
      if (cursor >= policy.signs.size())
        throw error("sqrt policy sign list exhausted");
      return policy.signs[cursor++];
  }
  return 1;
}

}  // namespace

Fragment build_fragment(unsigned n, const std::vector<Scalar>& seeds, unsigned depth,
                        const SqrtPolicy& policy, unsigned depth_below) {
  if (n == 0) throw error("N must be positive");
  Fragment frag;
  frag.n = n;
  frag.depth = depth;
  frag.depth_below = depth_below;

  // adopt the (deepest) tower the seeds live in
  TowerPtr tower;
  for (const auto& s : seeds) {
    if (!s.valid()) continue;
    if (!tower || s.tower()->lineage_depth() > tower->lineage_depth()) tower = s.tower();
  }
  if (!tower) tower = Tower::make(n);
  if (tower->root_order() != n)
    throw error("seed scalars live in a tower with a different root order");
  frag.seeds.reserve(seeds.size());
  for (const auto& s : seeds) frag.seeds.push_back(tower->lift(s.valid() ? s : tower->zero()));

  // seeds must generate disjoint base segments
  long window = static_cast<long>(depth) + static_cast<long>(depth_below);
  for (std::size_t i = 0; i < frag.seeds.size(); ++i) {
    for (std::size_t j = i + 1; j < frag.seeds.size(); ++j) {
      Scalar d = frag.seeds[i] - frag.seeds[j];
      if (!d.is_integer()) continue;
      Rat r = d.to_rat();
      if (abs(r) <= window)
        throw seed_collision("seeds " + frag.seeds[i].to_string() + " and " +
                             frag.seeds[j].to_string() +
                             " lie in the same Z-coset within the fragment window");
    }
  }

  // bases in build order: seed-major, offset ascending
  for (const auto& s : frag.seeds) {
    for (long off = -static_cast<long>(depth_below); off <= static_cast<long>(depth); ++off) {
      frag.bases.push_back(BasePoint::at(tower->lift(s) + tower->from_int(off)));
    }
  }
  frag.bases.push_back(BasePoint::inf());

  std::size_t nb = frag.bases.size();
  frag.up.assign(nb, std::nullopt);
  frag.down.assign(nb, std::nullopt);
  std::size_t span = static_cast<std::size_t>(window) + 1;
  for (std::size_t s = 0; s < frag.seeds.size(); ++s) {
    for (std::size_t k = 0; k + 1 < span; ++k) {
      std::size_t id = s * span + k;
      frag.up[id] = id + 1;
      frag.down[id + 1] = id;
    }
  }

  // witnesses: adjoin sqrt(a) per pair, sign per policy
  frag.witness.assign(nb, std::nullopt);
  std::mt19937_64 rng(policy.seed);
  std::size_t cursor = 0;
  for (std::size_t id = 0; id < nb; ++id) {
    if (!frag.up[id].has_value() || frag.bases[id].infinite) continue;
    auto res = Tower::adjoin_sqrt(tower, frag.bases[id].value);
    tower = res.tower;
    int sign = next_sign(policy, rng, cursor);
    LadderWitness w;
    w.base_id = id;
    w.e_index = 0;
    w.eup_index = 0;
    w.b = sign > 0 ? res.root : -res.root;
    frag.witness[id] = std::move(w);
  }

  frag.tower = tower;
  for (auto& b : frag.bases)
    if (!b.infinite) b.value = tower->lift(b.value);
  for (auto& s : frag.seeds) s = tower->lift(s);
  for (auto& w : frag.witness)
    if (w) w->b = tower->lift(w->b);
  return frag;
}

BundleVector bundle_scale(const Fragment& frag, const Scalar& lambda, const BundleVector& v) {
  return frag.vector(v.base_id, 0, lambda * v.scalar);
}

BundleVector bundle_add(const Fragment& frag, const BundleVector& a, const BundleVector& b) {
  if (a.base_id != b.base_id)
    throw fiber_mismatch("bundle addition across distinct fibers");
  return frag.vector(a.base_id, 0, a.scalar + b.scalar);
}

std::vector<WitnessTriple> witness_triples_at(const Fragment& frag, std::size_t base_id,
                                              unsigned k) {
  std::vector<WitnessTriple> out;
  if (base_id >= frag.witness.size() || !frag.witness[base_id].has_value()) return out;
  const LadderWitness& w = *frag.witness[base_id];
  unsigned shift = (k + frag.n - (w.e_index % frag.n)) % frag.n;
  WitnessTriple base{k, (w.eup_index + shift) % frag.n, w.b};
  out.push_back(base);
  if (frag.n % 2 == 0 && frag.include_sign_orbit) {
    out.push_back(WitnessTriple{k, (base.eup_index + frag.n / 2) % frag.n, -w.b});
  }
  return out;
}

BundleVector apply_a(const Fragment& frag, const BundleVector& v) {
  if (frag.is_infinite(v.base_id))
    throw out_of_fragment("raising map is undefined over infinity");
  if (!frag.up[v.base_id].has_value())
    throw out_of_fragment("base " + frag.base_value(v.base_id).to_string() +
                          " + 1 is outside the fragment");
  if (!frag.witness[v.base_id].has_value())
    throw out_of_fragment("no ladder witness at base " +
                          frag.base_value(v.base_id).to_string());
  const LadderWitness& w = *frag.witness[v.base_id];
  std::size_t up_id = *frag.up[v.base_id];
  unsigned shift = (w.eup_index + frag.n - (w.e_index % frag.n)) % frag.n;
  return frag.vector(up_id, shift, w.b * v.scalar);
}

BundleVector apply_adag(const Fragment& frag, const BundleVector& v) {
  if (frag.is_infinite(v.base_id))
    throw out_of_fragment("lowering map is undefined over infinity");
  if (!frag.down[v.base_id].has_value())
    throw out_of_fragment("base " + frag.base_value(v.base_id).to_string() +
                          " - 1 is outside the fragment");
  std::size_t down_id = *frag.down[v.base_id];
  if (!frag.witness[down_id].has_value())
    throw out_of_fragment("no ladder witness at base " +
                          frag.base_value(down_id).to_string());
  const LadderWitness& w = *frag.witness[down_id];
  unsigned shift = (w.e_index + frag.n - (w.eup_index % frag.n)) % frag.n;
  return frag.vector(down_id, shift, w.b * v.scalar);
}

BundleVector apply_a_pow(const Fragment& frag, const BundleVector& v, unsigned n) {
  BundleVector r = v;
  for (unsigned i = 0; i < n; ++i) r = apply_a(frag, r);
  return r;
}

BundleVector apply_adag_pow(const Fragment& frag, const BundleVector& v, unsigned n) {
  BundleVector r = v;
  for (unsigned i = 0; i < n; ++i) r = apply_adag(frag, r);
  return r;
}

Scalar hamiltonian_eigenvalue(const Fragment& frag, const BundleVector& v) {
  if (frag.is_infinite(v.base_id)) throw infinite_point();
  return frag.base_value(v.base_id) + frag.tower->from_rat(Rat(1, 2));
}

std::pair<unsigned, BundleVector> lower_to_ground(const Fragment& frag,
                                                  const BundleVector& v,
                                                  unsigned max_steps) {
  BundleVector cur = v;
  if (cur.is_zero()) return {0, cur};
  for (unsigned step = 1; step <= max_steps; ++step) {
    if (frag.is_infinite(cur.base_id) || !frag.down[cur.base_id].has_value())
      return {max_steps, cur};
    cur = apply_adag(frag, cur);
    if (cur.is_zero()) return {step, cur};
  }
  return {max_steps, cur};
}

std::vector<Scalar> real_part(const Fragment& frag) {
  std::vector<Scalar> out;
  for (const auto& b : frag.bases) {
    if (b.infinite || !b.value.is_integer()) continue;
    if (b.value.to_rat() < 0) continue;
    out.push_back(b.value);
  }
  std::sort(out.begin(), out.end(),
            [](const Scalar& a, const Scalar& b) { return a.to_rat() < b.to_rat(); });
  return out;
}

bool AxiomReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string AxiomReport::to_string() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << "axiom " << c.axiom << ": " << (c.pass ? "pass" : "FAIL");
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << "\n";
  }
  return out.str();
}

AxiomReport check_axioms(const Fragment& frag) {
  AxiomReport report;

  // Axiom 3: pi is surjective onto the fragment bases: every base is hit by
  // its fiber points.
  {
    AxiomCheck c{3, true, ""};
    for (std::size_t id = 0; id < frag.base_count() && c.pass; ++id) {
      for (unsigned k = 0; k < frag.n && c.pass; ++k) {
        if (frag.basis_element(id, k).base_id != id) {
          c.pass = false;
          c.detail = "fiber point does not project to its base " + std::to_string(id);
        }
      }
    }
    report.checks.push_back(c);
  }

  // Axiom 4: the group of N-th roots acts freely and transitively on each
  // fiber; in particular every fiber has exactly N points.
  {
    AxiomCheck c{4, true, ""};
    Scalar p = frag.tower->one();
    for (unsigned k = 1; k < frag.n && c.pass; ++k) {
      p = p * frag.tower->zeta();
      if (p == frag.tower->one()) {
        c.pass = false;
        c.detail = "zeta has order < N";
      }
    }
    if (c.pass && !(p * frag.tower->zeta() == frag.tower->one())) {
      c.pass = false;
      c.detail = "zeta^N != 1";
    }
    for (std::size_t id = 0; id < frag.base_count() && c.pass; ++id) {
      // freeness: distinct classes zeta^k . e0 for 0 <= k < N
      std::vector<BundleVector> fiber;
      for (unsigned k = 0; k < frag.n; ++k) fiber.push_back(frag.basis_element(id, k));
      for (unsigned i = 0; i < frag.n && c.pass; ++i)
        for (unsigned j = i + 1; j < frag.n && c.pass; ++j)
          if (fiber[i] == fiber[j]) {
            c.pass = false;
            c.detail = "action is not free on fiber over base " + std::to_string(id);
          }
      // transitivity within the label set is index arithmetic mod N
      for (unsigned i = 0; i < frag.n && c.pass; ++i) {
        BundleVector moved =
            bundle_scale(frag, frag.tower->zeta_pow(static_cast<long>(i)),
                         frag.basis_element(id, 0));
        if (!(moved == fiber[i])) {
          c.pass = false;
          c.detail = "action is not transitive on fiber over base " + std::to_string(id);
        }
      }
    }
    report.checks.push_back(c);
  }

  // Axiom 5: every fiber point over a base a (with a+1 in the fragment)
  // has a witness pair (e', b), b^2 = a, working uniformly for all gamma.
  {
    AxiomCheck c{5, true, ""};
    for (std::size_t id = 0; id < frag.base_count() && c.pass; ++id) {
      if (frag.is_infinite(id) || !frag.up[id].has_value()) continue;
      if (!frag.witness[id].has_value()) {
        c.pass = false;
        c.detail = "missing witness over base " + frag.base_value(id).to_string();
        break;
      }
      for (unsigned k = 0; k < frag.n && c.pass; ++k) {
        auto triples = witness_triples_at(frag, id, k);
        bool found = false;
        for (const auto& tr : triples)
          if (tr.b * tr.b == frag.base_value(id)) found = true;
        if (!found) {
          c.pass = false;
          c.detail = "no witness with b^2 = a at base " + frag.base_value(id).to_string() +
                     ", fiber index " + std::to_string(k) + "; stored b = " +
                     frag.witness[id]->b.to_string();
        }
      }
    }
    report.checks.push_back(c);
  }

  // Axiom 6 (even N): the witness relation is closed under
  // (e, e', b) -> (e, -e', -b).
  {
    AxiomCheck c{6, true, ""};
    if (frag.n % 2 == 0) {
      for (std::size_t id = 0; id < frag.base_count() && c.pass; ++id) {
        if (frag.is_infinite(id) || !frag.witness[id].has_value()) continue;
        for (unsigned k = 0; k < frag.n && c.pass; ++k) {
          auto triples = witness_triples_at(frag, id, k);
          for (const auto& tr : triples) {
            unsigned flipped = (tr.eup_index + frag.n / 2) % frag.n;
            bool present = false;
            for (const auto& other : triples)
              if (other.eup_index == flipped && other.b == -tr.b) present = true;
            if (!present) {
              c.pass = false;
              c.detail = "sign orbit missing at base " + frag.base_value(id).to_string() +
                         ": no (e, -e', -b) companion for fiber index " + std::to_string(k);
              break;
            }
          }
        }
      }
    }
    report.checks.push_back(c);
  }

  return report;
}

// ---------------------------------------------------------------------------
// JSON serialization (schema: N, seeds, depth, witnesses, tower).

std::string fragment_to_json(const Fragment& frag) {
  if (frag.depth_below != 0)
    throw error(
        "fragments with a downward extension are in-memory only; the "
        "serialized schema covers upward segments");
  nlohmann::json j;
  j["N"] = frag.n;
  j["depth"] = frag.depth;
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& s : frag.seeds) seeds.push_back(s.to_string());
  j["seeds"] = seeds;
  nlohmann::json tower = nlohmann::json::array();
  for (const auto& g : frag.tower->gens())
    tower.push_back(Scalar(frag.tower, g.radicand).to_string());
  j["tower"] = tower;
  nlohmann::json ws = nlohmann::json::array();
  for (const auto& w : frag.witness) {
    if (!w) continue;
    nlohmann::json e;
    e["base"] = frag.base_value(w->base_id).to_string();
    e["b"] = w->b.to_string();
    e["e_index"] = w->e_index;
    e["eup_index"] = w->eup_index;
    ws.push_back(e);
  }
  j["witnesses"] = ws;
  return j.dump(2);
}

Fragment fragment_from_json(const std::string& json) {
  nlohmann::json j = nlohmann::json::parse(json);
  unsigned n = j.at("N").get<unsigned>();
  unsigned depth = j.at("depth").get<unsigned>();

  TowerPtr tower = Tower::make(n);
  std::vector<Scalar> seeds;
  for (const auto& s : j.at("seeds")) seeds.push_back(parse_scalar(s.get<std::string>(), tower));

  // replay the adjunction history
  for (const auto& r : j.at("tower")) {
    Scalar rad = parse_scalar(r.get<std::string>(), tower);
    auto res = Tower::adjoin_sqrt(tower, rad);
    tower = res.tower;
  }

  Fragment frag;
  frag.n = n;
  frag.depth = depth;
  frag.seeds.clear();
  for (auto& s : seeds) frag.seeds.push_back(tower->lift(s));
  for (const auto& s : frag.seeds) {
    for (long off = 0; off <= static_cast<long>(depth); ++off)
      frag.bases.push_back(BasePoint::at(s + tower->from_int(off)));
  }
  frag.bases.push_back(BasePoint::inf());
  std::size_t nb = frag.bases.size();
  frag.up.assign(nb, std::nullopt);
  frag.down.assign(nb, std::nullopt);
  std::size_t span = depth + 1;
  for (std::size_t s = 0; s < frag.seeds.size(); ++s) {
    for (std::size_t k = 0; k + 1 < span; ++k) {
      std::size_t id = s * span + k;
      frag.up[id] = id + 1;
      frag.down[id + 1] = id;
    }
  }
  frag.tower = tower;
  for (auto& b : frag.bases)
    if (!b.infinite) b.value = tower->lift(b.value);
  for (auto& s : frag.seeds) s = tower->lift(s);

  frag.witness.assign(nb, std::nullopt);
  for (const auto& e : j.at("witnesses")) {
    Scalar base = parse_scalar(e.at("base").get<std::string>(), tower);
    Scalar b = parse_scalar(e.at("b").get<std::string>(), tower);
    auto id = frag.find_base(base);
    if (!id) throw parse_error("witness references unknown base " + base.to_string());
    LadderWitness w;
    w.base_id = *id;
    w.e_index = e.at("e_index").get<unsigned>();
    w.eup_index = e.at("eup_index").get<unsigned>();
    w.b = b;
    frag.witness[*id] = std::move(w);
  }
  return frag;
}

}  // namespace qho
