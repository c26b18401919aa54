#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "topology.hpp"

using namespace qho;

namespace {

Fragment frag_n(unsigned n, const std::vector<std::string>& seeds, unsigned depth) {
  TowerPtr t = Tower::make(n);
  std::vector<Scalar> ss;
  for (const auto& s : seeds) ss.push_back(parse_scalar(s, t));
  return build_fragment(n, ss, depth);
}

BasicClosedSet closed_of(const Fragment& frag, std::vector<unsigned> sizes,
                         const std::vector<std::string>& eqs) {
  PartitionEnumeration part;
  part.class_sizes = std::move(sizes);
  GeneralCoreFormula g = gcf_make(part, {}, {}, {}, {}, 0, frag.tower);
  TowerPtr tower = frag.tower;
  std::vector<std::string> vars = gcf_free_vars(g);
  Cell cell;
  for (const auto& e : eqs) cell.eqs.push_back(parse_poly(e, vars, tower));
  g.r.cells = {cell};
  return make_basic_closed(std::move(g), frag);
}

}  // namespace

TEST_CASE("dimension of the basic sets") {
  Fragment f = frag_n(2, {"0"}, 2);
  // the one-H-variable universe is one-dimensional
  CHECK(dim(full_structure(f), f) == 1);
  // a single point has dimension 0
  CHECK(dim(point_set(f, f.tower->from_int(2), f.tower->from_int(3)), f) == 0);
  CHECK(dim(point_set(f, f.tower->zero(), f.tower->zero()), f) == 0);
  // the empty set has dimension -1
  CHECK(dim(empty_set(f), f) == -1);

  Fragment f4 = frag_n(4, {"0"}, 2);
  CHECK(dim(full_structure(f4), f4) == 1);
}

TEST_CASE("intersection") {
  Fragment f = frag_n(2, {"0"}, 2);
  BasicClosedSet c1 = closed_of(f, {1}, {"lambda_1_1^2-4"});
  BasicClosedSet c2 = closed_of(f, {1}, {"alpha_1-1"});

  // idempotence up to ideal equality
  BasicClosedSet self = intersect(c1, c1, f);
  CHECK(closed_equal(self, c1));

  // with the full space: unchanged
  BasicClosedSet full = closed_of(f, {1}, {});
  CHECK(closed_equal(intersect(c1, full, f), c1));

  BasicClosedSet both = intersect(c1, c2, f);
  BasicClosedSet expect = closed_of(f, {1}, {"lambda_1_1^2-4", "alpha_1-1"});
  CHECK(closed_equal(both, expect));
  CHECK(dim(both, f) == 0);
  CHECK(dim(both, f) <= std::min(dim(c1, f), dim(c2, f)));

  CHECK_THROWS_AS(make_basic_closed(
                      [&] {
                        GeneralCoreFormula g = c1.gcf;
                        TowerPtr tw = f.tower;
                        g.r.cells[0].eqs = {
                            parse_poly("lambda_1_1-2", gcf_free_vars(g), tw)};
                        return g;
                      }(),
                      f),
                  not_invariant);
}

TEST_CASE("canonicalize fuses forced classes") {
  Fragment f = frag_n(2, {"0"}, 2);
  // two classes with alpha_1 = alpha_2 forced
  BasicClosedSet c =
      closed_of(f, {1, 1}, {"alpha_1-alpha_2", "lambda_1_1^2-lambda_2_1^2"});
  CHECK(!is_canonical(c, f));
  BasicClosedSet k = canonicalize(c, f);
  CHECK(is_canonical(k, f));
  CHECK(k.gcf.part.class_sizes == std::vector<unsigned>{2});
  // idempotent
  BasicClosedSet k2 = canonicalize(k, f);
  CHECK(closed_equal(k, k2));
  CHECK(k2.gcf.part.class_sizes == k.gcf.part.class_sizes);

  // already canonical: unchanged
  BasicClosedSet c2 = closed_of(f, {1, 1}, {"alpha_1-alpha_2-1"});
  CHECK(is_canonical(c2, f));

  // dim before/after canonicalization of the fused diagonal
  CHECK(dim(k, f) == 2);  // alpha free, two lambdas tied by one equation
}

TEST_CASE("intersection with parameters") {
  Fragment f = frag_n(4, {"0"}, 2);
  PartitionEnumeration part;
  part.class_sizes = {1};
  part.param_sizes = {1};
  auto with_params = [&](unsigned pindex, const std::string& eq) {
    GeneralCoreFormula g =
        gcf_make(part, {}, {}, {}, {f.basis_element(1, pindex)}, 0, f.tower);
    TowerPtr tw = f.tower;
    Cell cell;
    cell.eqs.push_back(parse_poly(eq, gcf_free_vars(g), tw));
    g.r.cells = {cell};
    return make_basic_closed(std::move(g), f);
  };
  // mu is attached to the parameter, so pinning it is invariant
  BasicClosedSet c1 = with_params(0, "mu_1_1-2");
  // over h2 = zeta*h1, mu = 2*zeta describes e = 2*zeta^2*h1 = -2*h1:
  // a disjoint set, so the aligned intersection is empty
  BasicClosedSet c2 = with_params(1, "mu_1_1-2*zeta");
  BasicClosedSet both = intersect(c1, c2, f);
  CHECK(both.gcf.params[0] == c1.gcf.params[0]);
  CHECK(dim(both, f) == -1);

  // over h2, mu = 2*zeta^3 describes e = 2*zeta^4*h1 = 2*h1: the same set
  BasicClosedSet c3 = with_params(1, "mu_1_1-2*zeta^3");
  BasicClosedSet same = intersect(c1, c3, f);
  CHECK(closed_equal(same, c1));
}

TEST_CASE("chain stabilization") {
  Fragment f = frag_n(2, {"0"}, 2);
  BasicClosedSet c0 = closed_of(f, {1}, {"lambda_1_1^2-4"});
  BasicClosedSet c1 = closed_of(f, {1}, {"lambda_1_1^2-4", "alpha_1-1"});
  BasicClosedSet c2 = closed_of(f, {1}, {"lambda_1_1^2-4", "alpha_1-1", "alpha_1^2-1"});

  CHECK(chain_stabilizes({c0, c0, c0}) == 0);
  CHECK(chain_stabilizes({c0, c1, c1}) == 1);
  // strictly descending then constant (the last step cuts to the empty set)
  BasicClosedSet c3 = closed_of(f, {1}, {"lambda_1_1^2-4", "alpha_1-1", "1"});
  CHECK(chain_stabilizes({c0, c1, c3, c3}) == 2);

  // c1 and c2 are the same ideal (alpha^2-1 is implied)
  CHECK(chain_stabilizes({c1, c2}) == 0);

  CHECK_THROWS_AS(chain_stabilizes({c1, c0}), not_descending);
}

TEST_CASE("noetherian witness: generated chains stabilize") {
  Fragment f = frag_n(2, {"0"}, 2);
  std::vector<std::string> gens = {"alpha_1-1", "lambda_1_1^2-4", "lambda_1_1^4-16",
                                   "alpha_1*lambda_1_1^2-lambda_1_1^2"};
  std::vector<BasicClosedSet> chain;
  std::vector<std::string> acc;
  chain.push_back(closed_of(f, {1}, acc));
  for (const auto& g : gens) {
    acc.push_back(g);
    chain.push_back(closed_of(f, {1}, acc));
  }
  std::size_t idx = chain_stabilizes(chain);
  CHECK(idx < chain.size());
  // independent recomputation: last index with a strict drop
  std::size_t expect = 0;
  for (std::size_t i = 1; i < chain.size(); ++i)
    if (!closed_equal(chain[i - 1], chain[i])) expect = i;
  CHECK(idx == expect);
}
