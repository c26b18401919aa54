#include "qho/qho.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <json.hpp>

#include "engine.hpp"
#include "isomorphism.hpp"
#include "topology.hpp"

using namespace qho;

struct qho_fragment {
  Fragment frag;
};

struct qho_gcf {
  GeneralCoreFormula gcf;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

qho_status classify(const std::exception& e) {
  if (dynamic_cast<const parse_error*>(&e)) return QHO_ERR_PARSE;
  if (dynamic_cast<const odd_n_obstruction*>(&e)) return QHO_ERR_ODD_N;
  if (dynamic_cast<const not_invariant*>(&e)) return QHO_ERR_NOT_INVARIANT;
  if (dynamic_cast<const not_descending*>(&e)) return QHO_ERR_NOT_DESCENDING;
  if (dynamic_cast<const guard_error*>(&e)) return QHO_ERR_GUARD;
  if (dynamic_cast<const bad_index*>(&e)) return QHO_ERR_BAD_INDEX;
  if (dynamic_cast<const zero_inversion*>(&e)) return QHO_ERR_ZERO_DIVISION;
  if (dynamic_cast<const out_of_fragment*>(&e) || dynamic_cast<const infinite_point*>(&e) ||
      dynamic_cast<const fiber_mismatch*>(&e) || dynamic_cast<const seed_collision*>(&e) ||
      dynamic_cast<const param_mismatch*>(&e))
    return QHO_ERR_DOMAIN;
  return QHO_ERROR;
}

template <typename Fn>
qho_status guarded(Fn&& fn) {
  try {
    fn();
    return QHO_OK;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    const auto* err = dynamic_cast<const error*>(&e);
    return err ? classify(e) : QHO_ERROR;
  } catch (...) {
    g_last_error = "unknown error";
    return QHO_ERROR;
  }
}

BundleVector vector_from_json(const Fragment& frag, const nlohmann::json& j) {
  TowerPtr tower = frag.tower;
  Scalar base = parse_scalar(j.at("base").get<std::string>(), tower);
  auto id = frag.find_base(base);
  if (!id) throw parse_error("unknown base " + base.to_string());
  unsigned index = j.value("index", 0u);
  Scalar x = parse_scalar(j.value("scalar", std::string("1")), tower);
  return frag.vector(*id, index, frag.tower->lift(x));
}

nlohmann::json vector_to_json(const Fragment& frag, const BundleVector& v) {
  nlohmann::json j;
  j["base"] = frag.is_infinite(v.base_id) ? "inf" : frag.base_value(v.base_id).to_string();
  j["index"] = 0;
  j["scalar"] = v.scalar.to_string();
  return j;
}

std::vector<Scalar> parse_csv_scalars(const std::string& csv, TowerPtr& tower) {
  std::vector<Scalar> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string item =
        csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) out.push_back(parse_scalar(item, tower));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

nlohmann::json axiom_report_json(const AxiomReport& rep) {
  nlohmann::json j;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rep.checks) {
    nlohmann::json e;
    e["axiom"] = c.axiom;
    e["pass"] = c.pass;
    e["detail"] = c.detail;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["all_pass"] = rep.all_pass();
  return j;
}

}  // namespace

extern "C" {

const char* qho_last_error(void) { return g_last_error.c_str(); }

void qho_string_free(char* s) { std::free(s); }

qho_status qho_fragment_build(const char* spec_json, qho_fragment** out) {
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(spec_json);
    unsigned n = j.at("N").get<unsigned>();
    TowerPtr tower = Tower::make(n);
    std::vector<Scalar> seeds;
    for (const auto& s : j.at("seeds")) seeds.push_back(parse_scalar(s.get<std::string>(), tower));
    unsigned depth = j.at("depth").get<unsigned>();
    SqrtPolicy policy = SqrtPolicy::parse(j.value("sqrt_policy", std::string("canonical")));
    unsigned depth_below = j.value("depth_below", 0u);
    auto* h = new qho_fragment{build_fragment(n, seeds, depth, policy, depth_below)};
    *out = h;
  });
}

qho_status qho_fragment_parse(const char* json, qho_fragment** out) {
  return guarded([&] { *out = new qho_fragment{fragment_from_json(json)}; });
}

qho_status qho_fragment_to_json(const qho_fragment* frag, char** json) {
  return guarded([&] { *json = dup_string(fragment_to_json(frag->frag)); });
}

void qho_fragment_free(qho_fragment* frag) { delete frag; }

qho_status qho_check_axioms(const qho_fragment* frag, char** report_json, int* all_pass) {
  return guarded([&] {
    AxiomReport rep = check_axioms(frag->frag);
    if (report_json) *report_json = dup_string(axiom_report_json(rep).dump(2));
    if (all_pass) *all_pass = rep.all_pass() ? 1 : 0;
  });
}

qho_status qho_spectrum(const qho_fragment* frag, char** text) {
  return guarded([&] {
    std::string out;
    for (const auto& base : real_part(frag->frag)) {
      if (!out.empty()) out += ", ";
      out += (base + frag->frag.tower->from_rat(Rat(1, 2))).to_string();
    }
    *text = dup_string(out);
  });
}

qho_status qho_ladder(const qho_fragment* frag, const char* query_json, char** result_json) {
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(query_json);
    BundleVector v = vector_from_json(frag->frag, j);
    std::string op = j.at("op").get<std::string>();
    unsigned steps = j.value("steps", 1u);
    nlohmann::json out;
    if (op == "a") {
      out["vector"] = vector_to_json(frag->frag, apply_a_pow(frag->frag, v, steps));
    } else if (op == "adag") {
      out["vector"] = vector_to_json(frag->frag, apply_adag_pow(frag->frag, v, steps));
    } else if (op == "lower") {
      auto [count, w] = lower_to_ground(frag->frag, v, steps);
      out["steps"] = count;
      out["vector"] = vector_to_json(frag->frag, w);
    } else if (op == "eigenvalue") {
      out["value"] = hamiltonian_eigenvalue(frag->frag, v).to_string();
    } else {
      throw parse_error("unknown ladder op: " + op);
    }
    *result_json = dup_string(out.dump(2));
  });
}

qho_status qho_isomorphism(const qho_fragment* a, const qho_fragment* b, char** trace_json) {
  return guarded([&] {
    StructureMap m = extend_isomorphism(a->frag, b->frag);
    IsoReport rep = verify_isomorphism(m, a->frag, b->frag);
    if (!rep.pass) throw error("constructed map failed verification: " + rep.detail);
    nlohmann::json j;
    j["sign_trace"] = m.sign_trace;
    j["offsets"] = m.offset;
    *trace_json = dup_string(j.dump(2));
  });
}

qho_status qho_verify_isomorphism(const qho_fragment* a, const qho_fragment* b,
                                  const char* trace_json, char** report, int* verdict) {
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(trace_json);
    StructureMap m;
    m.offset = j.at("offsets").get<std::vector<unsigned>>();
    if (j.contains("sign_trace")) m.sign_trace = j.at("sign_trace").get<std::vector<int>>();
    IsoReport rep = verify_isomorphism(m, a->frag, b->frag);
    if (report) *report = dup_string(rep.detail);
    if (verdict) *verdict = rep.pass ? 1 : 0;
  });
}

qho_status qho_formula_normalize(const char* text, unsigned n, char** canonical) {
  return guarded([&] {
    TowerPtr tower = Tower::make(n == 0 ? 1 : n);
    FormulaPtr f = parse_formula(text, tower);
    *canonical = dup_string(print_formula(f));
  });
}

qho_status qho_gcf_parse(const char* json, const qho_fragment* frag, qho_gcf** out) {
  return guarded([&] { *out = new qho_gcf{gcf_from_json(json, frag->frag)}; });
}

qho_status qho_gcf_to_json(const qho_gcf* gcf, const qho_fragment* frag, char** json) {
  return guarded([&] { *json = dup_string(gcf_to_json(gcf->gcf, frag->frag)); });
}

qho_status qho_gcf_text(const qho_gcf* gcf, const qho_fragment* frag, char** text) {
  return guarded([&] {
    (void)frag;
    *text = dup_string(print_formula(gcf_to_formula(gcf->gcf, gcf->gcf.r.ring->tower)));
  });
}

void qho_gcf_free(qho_gcf* gcf) { delete gcf; }

qho_status qho_delta_action(const qho_gcf* gcf, const qho_fragment* frag,
                            const char* delta_csv, qho_gcf** out) {
  return guarded([&] {
    (void)frag;
    TowerPtr tower = gcf->gcf.r.ring->tower;
    std::vector<Scalar> delta = parse_csv_scalars(delta_csv, tower);
    *out = new qho_gcf{delta_action(gcf->gcf, delta)};
  });
}

qho_status qho_invariant_closure(const qho_gcf* gcf, const qho_fragment* frag,
                                 qho_gcf** out) {
  return guarded([&] {
    (void)frag;
    *out = new qho_gcf{invariant_closure(gcf->gcf)};
  });
}

qho_status qho_is_invariant(const qho_gcf* gcf, const qho_fragment* frag, int* out) {
  return guarded([&] {
    (void)frag;
    *out = is_invariant(gcf->gcf) ? 1 : 0;
  });
}

qho_status qho_align_params(const qho_gcf* to, const qho_gcf* gcf, const qho_fragment* frag,
                            qho_gcf** out) {
  return guarded([&] { *out = new qho_gcf{align_params(to->gcf, gcf->gcf, frag->frag)}; });
}

qho_status qho_merge(const qho_gcf* a, const qho_gcf* b, const qho_fragment* frag,
                     qho_gcf** out) {
  return guarded([&] { *out = new qho_gcf{merge(a->gcf, b->gcf, frag->frag)}; });
}

qho_status qho_project(const qho_gcf* gcf, const qho_fragment* frag, unsigned k,
                       const char* l_csv, int eliminate_pass, qho_gcf** out) {
  return guarded([&] {
    std::vector<unsigned> l;
    std::string csv(l_csv ? l_csv : "");
    std::size_t pos = 0;
    while (pos <= csv.size() && !csv.empty()) {
      std::size_t comma = csv.find(',', pos);
      std::string item =
          csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (!item.empty()) l.push_back(static_cast<unsigned>(std::stoul(item)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    *out = new qho_gcf{project(gcf->gcf, k, l, frag->frag, eliminate_pass != 0)};
  });
}

qho_status qho_substitute_params(const qho_gcf* gcf, const qho_fragment* frag,
                                 const char* subst_json, char** disjunction_json) {
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(subst_json);
    std::vector<unsigned> positions = j.at("positions").get<std::vector<unsigned>>();
    std::vector<BundleVector> values;
    for (const auto& v : j.at("values")) values.push_back(vector_from_json(frag->frag, v));
    auto disjuncts = substitute_params(gcf->gcf, positions, values, frag->frag);
    nlohmann::json out;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : disjuncts)
      arr.push_back(nlohmann::json::parse(gcf_to_json(d, frag->frag)));
    out["disjuncts"] = arr;
    *disjunction_json = dup_string(out.dump(2));
  });
}

qho_status qho_oracle_eval(const qho_gcf* gcf, const qho_fragment* frag,
                           const char* tuple_json, int* result) {
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(tuple_json);
    std::vector<BundleVector> e;
    if (j.contains("e"))
      for (const auto& v : j.at("e")) e.push_back(vector_from_json(frag->frag, v));
    std::vector<Scalar> a;
    TowerPtr tower = frag->frag.tower;
    if (j.contains("a"))
      for (const auto& s : j.at("a")) a.push_back(parse_scalar(s.get<std::string>(), tower));
    *result = evaluate(gcf->gcf, frag->frag, e, a) ? 1 : 0;
  });
}

qho_status qho_dim(const qho_gcf* gcf, const qho_fragment* frag, int* out) {
  return guarded([&] {
    BasicClosedSet c = make_basic_closed(gcf->gcf, frag->frag);
    BasicClosedSet k = canonicalize(c, frag->frag);
    *out = dim(k, frag->frag);
  });
}

qho_status qho_chain_check(const char* chain_json, const qho_fragment* frag,
                           char** report_json) {
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(chain_json);
    std::vector<BasicClosedSet> chain;
    for (const auto& g : j.at("chain"))
      chain.push_back(make_basic_closed(gcf_from_json(g.dump(), frag->frag), frag->frag));
    *report_json = dup_string(chain_report_json(chain, frag->frag));
  });
}

}  // extern "C"
