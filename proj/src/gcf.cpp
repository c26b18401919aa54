#include "gcf.hpp"

#include <json.hpp>

namespace qho {

std::vector<std::string> gcf_free_vars(const GeneralCoreFormula& gcf) {
  std::vector<std::string> vars;
  unsigned s = gcf.part.s();
  for (unsigned i = 1; i <= s; ++i) vars.push_back("alpha_" + std::to_string(i));
  auto pair_vars = [&](const ChainMap& m, const char* fam) {
    for (const auto& [ij, n] : m)
      vars.push_back(std::string(fam) + "_" + std::to_string(ij.first) + "_" +
                     std::to_string(ij.second));
  };
  pair_vars(gcf.sigma, "gamma");
  pair_vars(gcf.delta1, "delta");
  pair_vars(gcf.delta2, "epsilon");
  pair_vars(gcf.sigma, "b");
  pair_vars(gcf.delta1, "m");
  pair_vars(gcf.delta2, "o");
  for (unsigned i = 1; i <= s; ++i)
    for (unsigned j = 1; j <= gcf.part.class_sizes[i - 1]; ++j)
      vars.push_back("lambda_" + std::to_string(i) + "_" + std::to_string(j));
  for (unsigned i = 1; i <= gcf.part.t(); ++i)
    for (unsigned j = 1; j <= gcf.part.param_sizes[i - 1]; ++j)
      vars.push_back("mu_" + std::to_string(i) + "_" + std::to_string(j));
  for (unsigned k = 1; k <= gcf.num_a; ++k) vars.push_back("a_" + std::to_string(k));
  return vars;
}

PolyRingPtr gcf_ring(const GeneralCoreFormula& gcf, TowerPtr tower) {
  std::vector<std::string> vars = gcf_free_vars(gcf);
  for (const auto& b : gcf.r.bound) vars.push_back(b);
  return make_ring(std::move(tower), std::move(vars));
}

void gcf_validate(const GeneralCoreFormula& gcf, const Fragment& frag) {
  unsigned s = gcf.part.s();
  unsigned t = gcf.part.t();
  for (const auto& [ij, n] : gcf.sigma)
    if (ij.first < 1 || ij.first > s || ij.second < 1 || ij.second > s || n < 1)
      throw bad_index("sigma index out of range");
  for (const auto& [ij, n] : gcf.delta1)
    if (ij.first < 1 || ij.first > s || ij.second < 1 || ij.second > t || n < 1)
      throw bad_index("delta1 index out of range");
  for (const auto& [ij, n] : gcf.delta2)
    if (ij.first < 1 || ij.first > t || ij.second < 1 || ij.second > s || n < 1)
      throw bad_index("delta2 index out of range");
  if (gcf.params.size() != t) throw bad_index("parameter count does not match partition");
  for (const auto& h : gcf.params) {
    if (frag.is_infinite(h.base_id)) throw infinite_point();
    if (!frag.is_canonical_basis(h))
      throw error("parameter is not a canonical basis element");
  }
  std::vector<std::string> expect = gcf_free_vars(gcf);
  for (const auto& b : gcf.r.bound) expect.push_back(b);
  if (!gcf.r.ring || gcf.r.ring->vars != expect)
    throw error("predicate ring does not match the index data");
}

GeneralCoreFormula gcf_make(PartitionEnumeration part, ChainMap sigma, ChainMap delta1,
                            ChainMap delta2, std::vector<BundleVector> params,
                            unsigned num_a, TowerPtr tower) {
  GeneralCoreFormula g;
  g.part = std::move(part);
  g.sigma = std::move(sigma);
  g.delta1 = std::move(delta1);
  g.delta2 = std::move(delta2);
  g.params = std::move(params);
  g.num_a = num_a;
  g.r = pred_true(gcf_ring(g, std::move(tower)));
  return g;
}

FormulaPtr gcf_to_formula(const GeneralCoreFormula& gcf, const TowerPtr& tower) {
  return build_general_core(gcf.part, gcf.sigma, gcf.delta1, gcf.delta2, gcf.r, tower);
}

namespace {

nlohmann::json chainmap_json(const ChainMap& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [ij, n] : m) {
    nlohmann::json e;
    e["i"] = ij.first;
    e["j"] = ij.second;
    e["n"] = n;
    arr.push_back(e);
  }
  return arr;
}

ChainMap chainmap_from_json(const nlohmann::json& arr) {
  ChainMap m;
  for (const auto& e : arr)
    m[{e.at("i").get<unsigned>(), e.at("j").get<unsigned>()}] = e.at("n").get<unsigned>();
  return m;
}

}  // namespace

std::string gcf_to_json(const GeneralCoreFormula& gcf, const Fragment& frag) {
  nlohmann::json j;
  j["class_sizes"] = gcf.part.class_sizes;
  j["param_sizes"] = gcf.part.param_sizes;
  j["sigma"] = chainmap_json(gcf.sigma);
  j["delta1"] = chainmap_json(gcf.delta1);
  j["delta2"] = chainmap_json(gcf.delta2);
  nlohmann::json params = nlohmann::json::array();
  for (const auto& h : gcf.params) {
    nlohmann::json e;
    e["base"] = frag.base_value(h.base_id).to_string();
    auto k = frag.basis_index(h);
    e["index"] = k ? *k : 0u;
    params.push_back(e);
  }
  j["params"] = params;
  j["num_a"] = gcf.num_a;
  nlohmann::json r;
  r["bound"] = gcf.r.bound;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : gcf.r.cells) {
    nlohmann::json c;
    nlohmann::json eqs = nlohmann::json::array();
    for (const auto& p : cell.eqs) eqs.push_back(poly_to_string(*gcf.r.ring, p));
    c["eqs"] = eqs;
    nlohmann::json negs = nlohmann::json::array();
    for (const auto& neg : cell.negs) {
      nlohmann::json sys = nlohmann::json::array();
      for (const auto& p : neg) sys.push_back(poly_to_string(*gcf.r.ring, p));
      negs.push_back(sys);
    }
    c["negs"] = negs;
    cells.push_back(c);
  }
  r["cells"] = cells;
  j["R"] = r;
  return j.dump(2);
}

GeneralCoreFormula gcf_from_json(const std::string& json, const Fragment& frag) {
  nlohmann::json j = nlohmann::json::parse(json);
  GeneralCoreFormula g;
  g.part.class_sizes = j.at("class_sizes").get<std::vector<unsigned>>();
  g.part.param_sizes = j.at("param_sizes").get<std::vector<unsigned>>();
  g.sigma = chainmap_from_json(j.at("sigma"));
  g.delta1 = chainmap_from_json(j.at("delta1"));
  g.delta2 = chainmap_from_json(j.at("delta2"));
  TowerPtr tower = frag.tower;
  for (const auto& e : j.at("params")) {
    Scalar base = parse_scalar(e.at("base").get<std::string>(), tower);
    auto id = frag.find_base(base);
    if (!id) throw parse_error("parameter references unknown base " + base.to_string());
    g.params.push_back(frag.basis_element(*id, e.at("index").get<unsigned>()));
  }
  g.num_a = j.at("num_a").get<unsigned>();
  std::vector<std::string> bound;
  if (j.at("R").contains("bound")) bound = j.at("R").at("bound").get<std::vector<std::string>>();
  std::vector<std::string> vars = gcf_free_vars(g);
  for (const auto& b : bound) vars.push_back(b);

  std::vector<Cell> raw;
  for (const auto& c : j.at("R").at("cells")) {
    Cell cell;
    for (const auto& s : c.at("eqs"))
      cell.eqs.push_back(parse_poly(s.get<std::string>(), vars, tower));
    if (c.contains("negs")) {
      for (const auto& sys : c.at("negs")) {
        std::vector<Poly> neg;
        for (const auto& s : sys) neg.push_back(parse_poly(s.get<std::string>(), vars, tower));
        cell.negs.push_back(std::move(neg));
      }
    }
    raw.push_back(std::move(cell));
  }
  g.r.ring = make_ring(tower, vars);
  g.r.bound = bound;
  g.r.cells = std::move(raw);
  gcf_validate(g, frag);
  for (const auto& cell : g.r.cells) {
    PolySystem sys;
    sys.ring = g.r.ring;
    sys.polys = cell.eqs;
    check_system_guards(sys);
    for (const auto& neg : cell.negs) {
      sys.polys = neg;
      check_system_guards(sys);
    }
  }
  return g;
}

}  // namespace qho
