#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "formula.hpp"

using namespace qho;

namespace {

FormulaPtr parse_in(TowerPtr t, const std::string& text) {
  TowerPtr tw = t;
  return parse_formula(text, tw);
}

Pred pred_of(TowerPtr t, const std::vector<std::string>& vars,
             const std::vector<std::string>& eqs) {
  TowerPtr tw = t;
  std::vector<Poly> ps;
  for (const auto& e : eqs) ps.push_back(parse_poly(e, vars, tw));
  PolySystem sys = make_system(make_ring(tw, vars), std::move(ps));
  return pred_from_system(sys);
}

}  // namespace

TEST_CASE("atom parsing") {
  TowerPtr t = Tower::make(2);
  FormulaPtr e = parse_in(t, "E(f_1, alpha_1)");
  CHECK(e->kind == Formula::Kind::atom_e);
  CHECK(e->e_arg.var.name() == "f_1");
  CHECK(e->e_fiber.var.name() == "alpha_1");

  FormulaPtr q = parse_in(t, "exists f_1 (E(f_1,alpha_1) & e_1_1 = lambda_1_1 * f_1)");
  CHECK(q->kind == Formula::Kind::exists);
  CHECK(q->binders.size() == 1);
  CHECK(q->children[0]->kind == Formula::Kind::conj);

  FormulaPtr lad = parse_in(t, "a^2(f_1) = b_1_2*g_1_2");
  CHECK(lad->kind == Formula::Kind::atom_ladder);
  CHECK(lad->steps == 2);
  CHECK(!lad->dagger);

  FormulaPtr lad2 = parse_in(t, "adag(g_1_2) = b_1_2*f_1");
  CHECK(lad2->dagger);
  CHECK(lad2->steps == 1);

  FormulaPtr pa = parse_in(t, "lambda_1_1^2 = 9");
  CHECK(pa->kind == Formula::Kind::atom_poly);
  CHECK(!pa->poly.negated);

  FormulaPtr pn = parse_in(t, "alpha_1 != 0");
  CHECK(pn->poly.negated);

  // field variable a_1 is not the ladder symbol
  FormulaPtr av = parse_in(t, "a_1 - 3 = 0");
  CHECK(av->kind == Formula::Kind::atom_poly);

  // projection pseudo-variable
  FormulaPtr pr = parse_in(t, "c_1_1_1^2 = p(h_1)+1");
  CHECK(pr->kind == Formula::Kind::atom_poly);
  CHECK(pr->poly.vars == std::vector<std::string>{"c_1_1_1", "p(h_1)"});

  CHECK_THROWS_AS(parse_in(t, "E(alpha_1, f_1)"), parse_error);
  CHECK_THROWS_AS(parse_in(t, "foo_1 = 0"), parse_error);
  CHECK_THROWS_AS(parse_in(t, "E(f_1, alpha_1) &"), parse_error);
}

TEST_CASE("print/parse round trip") {
  TowerPtr t = Tower::make(4);
  std::vector<std::string> texts = {
      "E(f_1, alpha_1)",
      "E(p_1_1, p(h_1))",
      "e_1_1 = lambda_1_1*f_1",
      "f_1 = f_2",
      "q_1_1 = epsilon_1_1*f_1",
      "e_2_1 = mu_1_1*h_1",
      "a(f_1) = b_1_2*g_1_2",
      "adag^3(g_1_2) = b_1_2*f_1",
      "lambda_1_1^2-9 = 0",
      "alpha_1+alpha_2 != 1/2",
      "c_1_2_1*c_1_2_2 = b_1_2",
      "exists f_1 f_2 (E(f_1, alpha_1) & (alpha_1 = 3 | alpha_2 = 4))",
      "~E(f_1, alpha_1)",
      "~(E(f_1, alpha_1) & alpha_1 = 0)",
      "exists c_1_1_1 (c_1_1_1^2 = alpha_1 & c_1_1_1 = b_1_1)",
      "e_1_1 = (1/2+zeta)*f_1",
      "e_1_1 = 3*f_1",
      "lambda_1_1^2 = sqrt{2}*alpha_1",
      "true",
      "(alpha_1+1)*alpha_2 = 0",
  };
  for (const auto& text : texts) {
    CAPTURE(text);
    TowerPtr tw = t;
    FormulaPtr f = parse_formula(text, tw);
    std::string printed = print_formula(f);
    TowerPtr tw2 = tw;
    FormulaPtr g = parse_formula(printed, tw2);
    CHECK(formula_equal(f, g));
    CHECK(print_formula(g) == printed);
  }
}

TEST_CASE("build_A_sigma") {
  TowerPtr t = Tower::make(2);
  PartitionEnumeration part;
  part.class_sizes = {1};

  FormulaPtr a = build_A_sigma(part, {}, t);
  FormulaPtr expect = parse_in(t, "E(f_1, alpha_1) & e_1_1 = lambda_1_1*f_1");
  CHECK(formula_equal(a, expect));

  PartitionEnumeration part2;
  part2.class_sizes = {1, 1};
  ChainMap sigma{{{1, 2}, 1}};
  FormulaPtr a2 = build_A_sigma(part2, sigma, t);
  std::string printed = print_formula(a2);
  CHECK(printed.find("g_1_2 = gamma_1_2*f_2") != std::string::npos);
  CHECK(printed.find("E(g_1_2, alpha_2)") != std::string::npos);
  CHECK(printed.find("a(f_1) = b_1_2*g_1_2") != std::string::npos);
  CHECK(printed.find("adag(g_1_2) = b_1_2*f_1") != std::string::npos);
  // chain clause: single witness squares to the starting base
  CHECK(printed.find("c_1_2_1^2 = alpha_1") != std::string::npos);

  ChainMap sigma2{{{1, 2}, 2}};
  FormulaPtr a3 = build_A_sigma(part2, sigma2, t);
  std::string p3 = print_formula(a3);
  CHECK(p3.find("c_1_2_1*c_1_2_2 = b_1_2") != std::string::npos);
  CHECK(p3.find("c_1_2_2^2 = alpha_1+1") != std::string::npos);

  // the builder's text parses back to the same AST
  TowerPtr tw = t;
  CHECK(formula_equal(parse_formula(p3, tw), a3));
}

TEST_CASE("build_general_core") {
  TowerPtr t = Tower::make(2);
  PartitionEnumeration part;
  part.class_sizes = {1};
  part.param_sizes = {1};

  // plain core formula: no parameters
  PartitionEnumeration core_part;
  core_part.class_sizes = {1};
  Pred r = pred_of(t, {"alpha_1", "lambda_1_1", "a_1"}, {"lambda_1_1-a_1"});
  FormulaPtr core = build_general_core(core_part, {}, {}, {}, r, t);
  CHECK(core->kind == Formula::Kind::exists);
  // free variables are exactly (e, a)
  auto fv = core->free_vars();
  for (const auto& v : fv) CHECK((v.family == "e" || v.family == "a"));

  // D1 clause: E(p_1_1, p(h_1))
  Pred r2 = pred_of(t, {"alpha_1", "delta_1_1", "m_1_1", "lambda_1_1", "mu_1_1"}, {});
  FormulaPtr d1 = build_general_core(part, {}, {{{1, 1}, 1}}, {}, r2, t);
  std::string pd1 = print_formula(d1);
  CHECK(pd1.find("E(p_1_1, p(h_1))") != std::string::npos);
  CHECK(pd1.find("p_1_1 = delta_1_1*h_1") != std::string::npos);
  CHECK(pd1.find("e_2_1 = mu_1_1*h_1") != std::string::npos);

  // D2 clause: q_1_1 = epsilon_1_1*f_1, chains from the parameter base
  FormulaPtr d2 = build_general_core(part, {}, {}, {{{1, 1}, 1}}, r2, t);
  std::string pd2 = print_formula(d2);
  CHECK(pd2.find("q_1_1 = epsilon_1_1*f_1") != std::string::npos);
  CHECK(pd2.find("c_1_1_1^2 = p(h_1)") != std::string::npos);
  CHECK(pd2.find("a(h_1) = o_1_1*q_1_1") != std::string::npos);

  // round trip through the printer
  TowerPtr tw = t;
  CHECK(formula_equal(parse_formula(pd1, tw), d1));
  CHECK(formula_equal(parse_formula(pd2, tw), d2));
}

TEST_CASE("pred_to_formula with negations and bound variables") {
  TowerPtr t = Tower::make(2);
  Pred p = pred_of(t, {"alpha_1", "lambda_1_1"}, {"alpha_1-1"});
  Cell neg_cell;
  neg_cell.negs.push_back(
      {parse_poly("lambda_1_1-2", {"alpha_1", "lambda_1_1"}, t)});
  Pred q = pred_from_cell(p.ring, neg_cell);
  Pred u = pred_union(p, q);
  FormulaPtr f = pred_to_formula(u);
  CHECK(f->kind == Formula::Kind::disj);
  std::string printed = print_formula(f);
  CHECK(printed.find("!=") != std::string::npos);

  Pred bounded = pred_quantify(p, {"lambda_1_1"});
  FormulaPtr g = pred_to_formula(bounded);
  CHECK(g->kind == Formula::Kind::exists);
  TowerPtr tw = t;
  CHECK(formula_equal(parse_formula(print_formula(g), tw), g));
}
