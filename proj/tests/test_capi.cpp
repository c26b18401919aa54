// Exercises the shared-library surface through the public header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "qho/qho.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  qho_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("fragment round trip and checks") {
  qho_fragment* frag = nullptr;
  REQUIRE(qho_fragment_build(R"({"N": 2, "seeds": ["0"], "depth": 3})", &frag) == QHO_OK);

  char* json = nullptr;
  REQUIRE(qho_fragment_to_json(frag, &json) == QHO_OK);
  std::string j1 = take(json);

  qho_fragment* frag2 = nullptr;
  REQUIRE(qho_fragment_parse(j1.c_str(), &frag2) == QHO_OK);
  REQUIRE(qho_fragment_to_json(frag2, &json) == QHO_OK);
  CHECK(take(json) == j1);

  int all_pass = 0;
  char* report = nullptr;
  REQUIRE(qho_check_axioms(frag, &report, &all_pass) == QHO_OK);
  CHECK(all_pass == 1);
  CHECK(take(report).find("\"all_pass\": true") != std::string::npos);

  char* text = nullptr;
  REQUIRE(qho_spectrum(frag, &text) == QHO_OK);
  CHECK(take(text) == "1/2, 3/2, 5/2, 7/2");

  char* lad = nullptr;
  REQUIRE(qho_ladder(frag, R"({"op":"a","base":"1","scalar":"1"})", &lad) == QHO_OK);
  std::string lads = take(lad);
  CHECK(lads.find("\"base\": \"2\"") != std::string::npos);

  qho_fragment_free(frag2);
  qho_fragment_free(frag);
}

TEST_CASE("error reporting") {
  qho_fragment* frag = nullptr;
  CHECK(qho_fragment_build(R"({"N": 2, "seeds": ["0","1"], "depth": 3})", &frag) ==
        QHO_ERR_DOMAIN);
  CHECK(std::string(qho_last_error()).find("coset") != std::string::npos);

  CHECK(qho_fragment_build("not json", &frag) != QHO_OK);

  char* canonical = nullptr;
  CHECK(qho_formula_normalize("E(alpha_1, f_1)", 2, &canonical) == QHO_ERR_PARSE);
}

TEST_CASE("isomorphism through the C surface") {
  qho_fragment* a = nullptr;
  qho_fragment* b = nullptr;
  REQUIRE(qho_fragment_build(R"({"N": 2, "seeds": ["0"], "depth": 3})", &a) == QHO_OK);
  REQUIRE(qho_fragment_build(
              R"({"N": 2, "seeds": ["0"], "depth": 3, "sqrt_policy": "signs:+1,+1,-1"})",
              &b) == QHO_OK);
  char* trace = nullptr;
  REQUIRE(qho_isomorphism(a, b, &trace) == QHO_OK);
  std::string tr = take(trace);
  CHECK(tr.find("-1") != std::string::npos);

  int verdict = 0;
  char* report = nullptr;
  REQUIRE(qho_verify_isomorphism(a, b, tr.c_str(), &report, &verdict) == QHO_OK);
  CHECK(verdict == 1);
  take(report);

  // odd N obstruction surfaces as a status code
  qho_fragment* c = nullptr;
  qho_fragment* d = nullptr;
  REQUIRE(qho_fragment_build(R"({"N": 1, "seeds": ["0"], "depth": 2})", &c) == QHO_OK);
  REQUIRE(qho_fragment_build(
              R"({"N": 1, "seeds": ["0"], "depth": 2, "sqrt_policy": "signs:+1,-1"})",
              &d) == QHO_OK);
  CHECK(qho_isomorphism(c, d, &trace) == QHO_ERR_ODD_N);

  qho_fragment_free(a);
  qho_fragment_free(b);
  qho_fragment_free(c);
  qho_fragment_free(d);
}

TEST_CASE("gcf transformations through the C surface") {
  qho_fragment* frag = nullptr;
  REQUIRE(qho_fragment_build(R"({"N": 2, "seeds": ["0"], "depth": 2})", &frag) == QHO_OK);

  const char* gcf_json = R"({
    "class_sizes": [1], "param_sizes": [],
    "sigma": [], "delta1": [], "delta2": [],
    "params": [], "num_a": 0,
    "R": {"bound": [], "cells": [{"eqs": ["lambda_1_1-2"], "negs": []}]}
  })";
  qho_gcf* g = nullptr;
  REQUIRE(qho_gcf_parse(gcf_json, frag, &g) == QHO_OK);

  int inv = 2;
  REQUIRE(qho_is_invariant(g, frag, &inv) == QHO_OK);
  CHECK(inv == 0);

  qho_gcf* closed = nullptr;
  REQUIRE(qho_invariant_closure(g, frag, &closed) == QHO_OK);
  REQUIRE(qho_is_invariant(closed, frag, &inv) == QHO_OK);
  CHECK(inv == 1);
  char* cj = nullptr;
  REQUIRE(qho_gcf_to_json(closed, frag, &cj) == QHO_OK);
  CHECK(take(cj).find("lambda_1_1^2-4") != std::string::npos);

  qho_gcf* translated = nullptr;
  REQUIRE(qho_delta_action(g, frag, "-1", &translated) == QHO_OK);
  // R^delta is {lambda = -2}: as an exists-f formula it defines the same
  // set, so the oracle answers exactly as for R
  int tr_result = 0;
  REQUIRE(qho_oracle_eval(translated, frag,
                          R"({"e": [{"base": "1", "index": 0, "scalar": "2"}], "a": []})",
                          &tr_result) == QHO_OK);
  CHECK(tr_result == 1);

  int result = 0;
  REQUIRE(qho_oracle_eval(g, frag,
                          R"({"e": [{"base": "1", "index": 0, "scalar": "2"}], "a": []})",
                          &result) == QHO_OK);
  CHECK(result == 1);

  // dimension of the universe through the C API
  const char* universe = R"({
    "class_sizes": [1], "param_sizes": [],
    "sigma": [], "delta1": [], "delta2": [],
    "params": [], "num_a": 0,
    "R": {"bound": [], "cells": [{"eqs": ["lambda_1_1^2-1"], "negs": []}]}
  })";
  qho_gcf* u = nullptr;
  REQUIRE(qho_gcf_parse(universe, frag, &u) == QHO_OK);
  int d = -7;
  REQUIRE(qho_dim(u, frag, &d) == QHO_OK);
  CHECK(d == 1);

  // display form
  char* text = nullptr;
  REQUIRE(qho_gcf_text(g, frag, &text) == QHO_OK);
  std::string ts = take(text);
  CHECK(ts.find("exists f_1 alpha_1 lambda_1_1") != std::string::npos);
  CHECK(ts.find("E(f_1, alpha_1)") != std::string::npos);

  qho_gcf_free(u);
  qho_gcf_free(translated);
  qho_gcf_free(closed);
  qho_gcf_free(g);
  qho_fragment_free(frag);
}
