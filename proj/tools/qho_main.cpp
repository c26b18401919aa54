// qho: batch front end. Links exclusively against the C API in qho/qho.h.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qho/qho.h"

namespace {

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& msg) { throw CliError{code, msg}; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(2, "cannot read file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Arguments that may be a file path or inline text.
std::string file_or_inline(const std::string& arg) {
  std::ifstream in(arg);
  if (in) {
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
  }
  return arg;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) fail(2, "cannot write file: " + path);
  out << content;
  if (!content.empty() && content.back() != '\n') out << "\n";
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  qho_string_free(s);
  return out;
}

int status_exit(qho_status st) {
  switch (st) {
    case QHO_OK:
      return 0;
    case QHO_ERR_PARSE:
    case QHO_ERR_BAD_INDEX:
      return 2;
    default:
      return 1;
  }
}

void check(qho_status st) {
  if (st != QHO_OK) fail(status_exit(st), qho_last_error());
}

struct FragmentHandle {
  qho_fragment* h = nullptr;
  ~FragmentHandle() { qho_fragment_free(h); }
};

struct GcfHandle {
  qho_gcf* h = nullptr;
  ~GcfHandle() { qho_gcf_free(h); }
};

void load_fragment(const std::string& path, FragmentHandle& frag) {
  check(qho_fragment_parse(slurp(path).c_str(), &frag.h));
}

void load_gcf(const std::string& path, const FragmentHandle& frag, GcfHandle& g) {
  check(qho_gcf_parse(slurp(path).c_str(), frag.h, &g.h));
}

std::string gcf_json(const GcfHandle& g, const FragmentHandle& frag) {
  char* s = nullptr;
  check(qho_gcf_to_json(g.h, frag.h, &s));
  return take_string(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact engine for ladder-relation covers of the projective line"};
  app.require_subcommand(1);

  // ---- build ----
  auto* build = app.add_subcommand("build", "build a fragment and emit its JSON");
  unsigned build_n = 2, build_depth = 3, build_below = 0;
  std::string build_seeds = "0", build_policy = "canonical", build_out = "-";
  build->add_option("--N", build_n, "order of the cover")->required();
  build->add_option("--seeds", build_seeds, "comma-separated base seeds")->required();
  build->add_option("--depth", build_depth, "segment depth")->required();
  build->add_option("--depth-below", build_below, "downward extension");
  build->add_option("--sqrt-policy", build_policy,
                    "canonical | random:<seed> | signs:+1,-1,... | file:<path>");
  build->add_option("-o,--output", build_out, "output path (default stdout)");

  // ---- fragment inspection ----
  auto* check_ax = app.add_subcommand("check-axioms", "verify axioms 3-6 on a fragment");
  std::string ca_frag;
  check_ax->add_option("fragment", ca_frag, "fragment JSON path")->required();

  auto* spectrum = app.add_subcommand("spectrum", "Hamiltonian spectrum over the real part");
  std::string sp_frag;
  spectrum->add_option("fragment", sp_frag)->required();

  auto* ladder = app.add_subcommand("ladder", "apply the raising/lowering maps");
  std::string la_frag, la_op = "a", la_base = "0", la_scalar = "1";
  unsigned la_index = 0, la_steps = 1;
  ladder->add_option("fragment", la_frag)->required();
  ladder->add_option("--op", la_op, "a | adag | lower | eigenvalue");
  ladder->add_option("--base", la_base, "base point of the vector");
  ladder->add_option("--index", la_index, "fiber index");
  ladder->add_option("--scalar", la_scalar, "coordinate");
  ladder->add_option("--steps", la_steps, "number of applications");

  auto* iso = app.add_subcommand("isomorphism", "back-and-forth between two fragments");
  std::string iso_a, iso_b, iso_out = "-";
  iso->add_option("fragA", iso_a)->required();
  iso->add_option("fragB", iso_b)->required();
  iso->add_option("-o,--output", iso_out);

  // ---- formulas ----
  auto* parse = app.add_subcommand("parse", "parse a DSL formula and print it canonically");
  std::string pa_formula;
  unsigned pa_n = 2;
  parse->add_option("--formula", pa_formula, "path or inline text")->required();
  parse->add_option("--N", pa_n, "order of the root of unity");
  auto* normalize = app.add_subcommand("normalize", "alias of parse");
  std::string no_formula;
  unsigned no_n = 2;
  normalize->add_option("--formula", no_formula)->required();
  normalize->add_option("--N", no_n);

  // ---- gcf transformations ----
  std::string tr_gcf, tr_frag, tr_out = "-";
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("gcf", tr_gcf, "general core formula JSON path")->required();
    cmd->add_option("--fragment", tr_frag, "fragment JSON path")->required();
    cmd->add_option("-o,--output", tr_out);
  };
  auto* dact = app.add_subcommand("delta-action", "apply a delta tuple to R");
  add_common(dact);
  std::string dact_delta;
  dact->add_option("--delta", dact_delta, "comma-separated roots of unity")->required();

  auto* iclo = app.add_subcommand("invariant-closure", "replace R by its F[N]-closure");
  add_common(iclo);

  auto* mrg = app.add_subcommand("merge", "tilde-merge two general core formulas");
  std::string mrg_b;
  bool mrg_align = false;
  add_common(mrg);
  mrg->add_option("gcf2", mrg_b, "second formula JSON path")->required();
  mrg->add_flag("--align", mrg_align, "align parameters first");

  auto* prj = app.add_subcommand("project", "existentially project e-variables");
  add_common(prj);
  unsigned prj_k = 1;
  std::string prj_l;
  bool prj_elim = false;
  prj->add_option("--k", prj_k, "class index (1-based, classes then parameters)")->required();
  prj->add_option("--l", prj_l, "comma-separated member indices")->required();
  prj->add_flag("--eliminate", prj_elim, "replace the bound block by its elimination ideal");

  auto* sub = app.add_subcommand("substitute-params", "substitute fragment vectors");
  add_common(sub);
  std::string sub_spec;
  sub->add_option("--subst", sub_spec, "JSON {positions, values} (path or inline)")->required();

  auto* dimc = app.add_subcommand("dim", "dimension of a basic closed set");
  std::string dim_gcf, dim_frag;
  dimc->add_option("gcf", dim_gcf)->required();
  dimc->add_option("--fragment", dim_frag)->required();

  auto* chain = app.add_subcommand("chain-check", "stabilization of a descending chain");
  std::string ch_file, ch_frag;
  chain->add_option("chain", ch_file, "JSON {chain: [gcf...]}")->required();
  chain->add_option("--fragment", ch_frag)->required();

  auto* oracle = app.add_subcommand("oracle-eval", "evaluate a formula on a tuple");
  std::string or_gcf, or_frag, or_tuple;
  oracle->add_option("gcf", or_gcf)->required();
  oracle->add_option("--fragment", or_frag)->required();
  oracle->add_option("--tuple", or_tuple, "JSON {e: [...], a: [...]} (path or inline)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);  // prints help or the usage diagnostic
    return rc == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) {
      std::string policy = build_policy;
      if (policy.rfind("file:", 0) == 0) {
        // file with one +1/-1 per line
        std::istringstream in(slurp(policy.substr(5)));
        std::string line, signs;
        while (std::getline(in, line)) {
          if (line.empty()) continue;
          if (!signs.empty()) signs += ",";
          signs += line;
        }
        policy = "signs:" + signs;
      }
      std::ostringstream spec;
      spec << "{\"N\": " << build_n << ", \"depth\": " << build_depth
           << ", \"depth_below\": " << build_below << ", \"sqrt_policy\": \"" << policy
           << "\", \"seeds\": [";
      std::stringstream ss(build_seeds);
      std::string item;
      bool first = true;
      while (std::getline(ss, item, ',')) {
        if (!first) spec << ", ";
        first = false;
        spec << "\"" << item << "\"";
      }
      spec << "]}";
      FragmentHandle frag;
      check(qho_fragment_build(spec.str().c_str(), &frag.h));
      char* json = nullptr;
      check(qho_fragment_to_json(frag.h, &json));
      write_output(build_out, take_string(json));
      return 0;
    }
    if (check_ax->parsed()) {
      FragmentHandle frag;
      load_fragment(ca_frag, frag);
      char* report = nullptr;
      int all_pass = 0;
      check(qho_check_axioms(frag.h, &report, &all_pass));
      std::cout << take_string(report) << "\n";
      return all_pass ? 0 : 1;
    }
    if (spectrum->parsed()) {
      FragmentHandle frag;
      load_fragment(sp_frag, frag);
      char* text = nullptr;
      check(qho_spectrum(frag.h, &text));
      std::cout << take_string(text) << "\n";
      return 0;
    }
    if (ladder->parsed()) {
      FragmentHandle frag;
      load_fragment(la_frag, frag);
      std::ostringstream q;
      q << "{\"op\": \"" << la_op << "\", \"base\": \"" << la_base
        << "\", \"index\": " << la_index << ", \"scalar\": \"" << la_scalar
        << "\", \"steps\": " << la_steps << "}";
      char* res = nullptr;
      check(qho_ladder(frag.h, q.str().c_str(), &res));
      std::cout << take_string(res) << "\n";
      return 0;
    }
    if (iso->parsed()) {
      FragmentHandle a, b;
      load_fragment(iso_a, a);
      load_fragment(iso_b, b);
      char* trace = nullptr;
      qho_status st = qho_isomorphism(a.h, b.h, &trace);
      if (st == QHO_ERR_ODD_N) {
        std::cerr << "OddN obstruction: " << qho_last_error() << "\n";
        return 1;
      }
      check(st);
      write_output(iso_out, take_string(trace));
      return 0;
    }
    if (parse->parsed() || normalize->parsed()) {
      std::string text = file_or_inline(parse->parsed() ? pa_formula : no_formula);
      unsigned n = parse->parsed() ? pa_n : no_n;
      char* canonical = nullptr;
      check(qho_formula_normalize(text.c_str(), n, &canonical));
      std::cout << take_string(canonical) << "\n";
      return 0;
    }
    if (dact->parsed()) {
      FragmentHandle frag;
      load_fragment(tr_frag, frag);
      GcfHandle g, out;
      load_gcf(tr_gcf, frag, g);
      check(qho_delta_action(g.h, frag.h, dact_delta.c_str(), &out.h));
      write_output(tr_out, gcf_json(out, frag));
      return 0;
    }
    if (iclo->parsed()) {
      FragmentHandle frag;
      load_fragment(tr_frag, frag);
      GcfHandle g, out;
      load_gcf(tr_gcf, frag, g);
      check(qho_invariant_closure(g.h, frag.h, &out.h));
      write_output(tr_out, gcf_json(out, frag));
      return 0;
    }
    if (mrg->parsed()) {
      FragmentHandle frag;
      load_fragment(tr_frag, frag);
      GcfHandle a, b, out;
      load_gcf(tr_gcf, frag, a);
      load_gcf(mrg_b, frag, b);
      GcfHandle aligned;
      const qho_gcf* second = b.h;
      if (mrg_align) {
        check(qho_align_params(a.h, b.h, frag.h, &aligned.h));
        second = aligned.h;
      }
      check(qho_merge(a.h, second, frag.h, &out.h));
      write_output(tr_out, gcf_json(out, frag));
      return 0;
    }
    if (prj->parsed()) {
      FragmentHandle frag;
      load_fragment(tr_frag, frag);
      GcfHandle g, out;
      load_gcf(tr_gcf, frag, g);
      check(qho_project(g.h, frag.h, prj_k, prj_l.c_str(), prj_elim ? 1 : 0, &out.h));
      write_output(tr_out, gcf_json(out, frag));
      return 0;
    }
    if (sub->parsed()) {
      FragmentHandle frag;
      load_fragment(tr_frag, frag);
      GcfHandle g;
      load_gcf(tr_gcf, frag, g);
      char* res = nullptr;
      check(qho_substitute_params(g.h, frag.h, file_or_inline(sub_spec).c_str(), &res));
      write_output(tr_out, take_string(res));
      return 0;
    }
    if (dimc->parsed()) {
      FragmentHandle frag;
      load_fragment(dim_frag, frag);
      GcfHandle g;
      load_gcf(dim_gcf, frag, g);
      int d = 0;
      check(qho_dim(g.h, frag.h, &d));
      std::cout << d << "\n";
      return 0;
    }
    if (chain->parsed()) {
      FragmentHandle frag;
      load_fragment(ch_frag, frag);
      char* report = nullptr;
      qho_status st = qho_chain_check(slurp(ch_file).c_str(), frag.h, &report);
      if (st == QHO_ERR_NOT_DESCENDING) {
        std::cerr << "not descending: " << qho_last_error() << "\n";
        return 1;
      }
      check(st);
      std::cout << take_string(report) << "\n";
      return 0;
    }
    if (oracle->parsed()) {
      FragmentHandle frag;
      load_fragment(or_frag, frag);
      GcfHandle g;
      load_gcf(or_gcf, frag, g);
      int result = 0;
      check(qho_oracle_eval(g.h, frag.h, file_or_inline(or_tuple).c_str(), &result));
      std::cout << (result ? "true" : "false") << "\n";
      return 0;
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  }
  return 2;
}
