// densc: compile probabilistic programs to density functions.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "densc/compiler.hpp"
#include "densc/error.hpp"
#include "densc/json.hpp"
#include "densc/sampler.hpp"
#include "densc/simplify.hpp"
#include "densc/syntax.hpp"
#include "densc/target_eval.hpp"
#include "densc/typing.hpp"
#include "densc/verify.hpp"

using namespace densc;

namespace {

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t default_seed() {
  if (const char* s = std::getenv("DENSC_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw Error(std::string("DENSC_SEED is not a number: ") + s);
    }
  }
  return 1;
}

std::string fmt_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
}

struct ProgramOpts {
  std::string file;
  bool inline_lets = false;
  bool commute = false;
};

Expr load_program(const ProgramOpts& o) {
  Expr e = parse_program(read_file(o.file));
  if (o.inline_lets) e = inline_lets(e);
  if (o.commute) e = commute_constants(e);
  return e;
}

void add_program_opts(CLI::App* cmd, ProgramOpts& o) {
  cmd->add_option("FILE", o.file, "Program file (.src), - for stdin")->required();
  cmd->add_flag("--inline-lets", o.inline_lets, "Substitute deterministic lets before compiling");
  cmd->add_flag("--commute-constants", o.commute, "Move deterministic operands of + and * to the right");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile probabilistic programs to density functions"};
  app.require_subcommand(1);

  QuadConfig quad;
  app.add_option("--rel-tol", quad.rel_tol, "Quadrature relative tolerance")->capture_default_str();
  app.add_option("--abs-tol", quad.abs_tol, "Quadrature absolute tolerance")->capture_default_str();
  app.add_option("--max-window", quad.max_window_doublings, "Window doublings for infinite ranges")
      ->capture_default_str();

  ProgramOpts check_o;
  auto* check = app.add_subcommand("check", "Typecheck a program and print its type");
  add_program_opts(check, check_o);

  ProgramOpts compile_o;
  bool simplify_flag = false;
  bool all_flag = false;
  std::size_t limit = 16;
  std::string compile_format = "text";
  auto* compile_cmd = app.add_subcommand("compile", "Compile a program to a density");
  add_program_opts(compile_cmd, compile_o);
  compile_cmd->add_flag("--simplify", simplify_flag, "Simplify the density");
  compile_cmd->add_flag("--all", all_flag, "Print every density the rules derive");
  compile_cmd->add_option("--limit", limit, "Maximum number of densities with --all")->capture_default_str();
  compile_cmd->add_option("--format", compile_format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  ProgramOpts sample_o;
  std::uint64_t n_draws = 10;
  std::uint64_t seed = 0;
  std::string sample_format = "csv";
  auto* sample = app.add_subcommand("sample", "Draw from the program");
  add_program_opts(sample, sample_o);
  sample->add_option("-n", n_draws, "Number of draws")->capture_default_str();
  auto* sample_seed = sample->add_option("--seed", seed, "Seed (default: DENSC_SEED or 1)");
  sample->add_option("--format", sample_format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  ProgramOpts eval_o;
  std::string at;
  bool eval_simplify = false;
  auto* eval = app.add_subcommand("eval-density", "Compile, then evaluate the density at a point");
  add_program_opts(eval, eval_o);
  eval->add_option("--at", at, "Point, written as a closed deterministic expression")->required();
  eval->add_flag("--simplify", eval_simplify, "Simplify before evaluating");

  ProgramOpts verify_o;
  VerifyConfig vcfg;
  std::string verify_format = "text";
  bool verify_simplify = false;
  auto* verify = app.add_subcommand("verify", "Check the density against the sampler");
  add_program_opts(verify, verify_o);
  verify->add_option("-n", vcfg.n_samples, "Number of draws")->capture_default_str();
  verify->add_option("--alpha", vcfg.alpha, "Significance level")->capture_default_str();
  auto* verify_seed = verify->add_option("--seed", vcfg.seed, "Seed (default: DENSC_SEED or 1)");
  verify->add_option("--bins", vcfg.bins, "Chi-square cells always tested")->capture_default_str();
  verify->add_flag("--simplify", verify_simplify, "Simplify the density first");
  verify->add_option("--format", verify_format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  std::string dens_file;
  auto* simplify_cmd = app.add_subcommand("simplify", "Simplify a density file (.dens)");
  simplify_cmd->add_option("FILE", dens_file, "Density file, - for stdin")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*check) {
      Expr e = load_program(check_o);
      if (auto fv = free_vars(e); !fv.empty()) throw CompileError("not closed: free variable " + std::to_string(*fv.begin()));
      std::cout << typecheck_expr(TypeEnv(), e).to_string() << "\n";
      return 0;
    }

    if (*compile_cmd) {
      Expr e = load_program(compile_o);
      CompiledProgram first = compile_program(e);
      std::vector<CExpr> fs = all_flag ? compile_program_all(e, limit) : std::vector<CExpr>{first.density};
      if (simplify_flag)
        for (CExpr& f : fs) f = simplify(f);
      if (compile_format == "json") {
        Json out = {{"type", type_to_json(first.type)}};
        Json list = Json::array();
        for (const CExpr& f : fs) list.push_back({{"text", pretty_density(f)}, {"ast", cexpr_to_json(f)}});
        out["densities"] = list;
        std::cout << out.dump(2) << "\n";
      } else {
        std::cout << "type: " << first.type.to_string() << "\n";
        for (const CExpr& f : fs) std::cout << format_density(f, first.type) << "\n";
      }
      return 0;
    }

    if (*sample) {
      Expr e = load_program(sample_o);
      if (auto fv = free_vars(e); !fv.empty()) throw CompileError("not closed: free variable " + std::to_string(*fv.begin()));
      typecheck_expr(TypeEnv(), e);
      Rng rng(*sample_seed ? seed : default_seed());
      Json rows = Json::array();
      if (sample_format == "csv") std::cout << "draw,value\n";
      for (std::uint64_t i = 0; i < n_draws; ++i) {
        SampleOutcome o = sample_expr(State(), e, rng);
        if (sample_format == "csv")
          std::cout << i << "," << (o ? csv_field(o->to_string()) : "bottom") << "\n";
        else
          rows.push_back(o ? val_to_json(*o) : Json(nullptr));
      }
      if (sample_format == "json") std::cout << rows.dump() << "\n";
      return 0;
    }

    if (*eval) {
      Expr e = load_program(eval_o);
      CompiledProgram p = compile_program(e);
      CExpr f = eval_simplify ? simplify(p.density) : p.density;
      Expr point = parse_program(at);
      if (typecheck_expr(TypeEnv(), point) != p.type)
        throw TypeError("--at value has type " + typecheck_expr(TypeEnv(), point).to_string() + ", expected " +
                        p.type.to_string());
      EvalDiagnostics diag;
      std::cout << fmt_real(eval_density_at(f, expr_sem_rf(State(), point), quad, State(), &diag)) << "\n";
      if (diag.divergent_integrals > 0) std::cerr << "warning: a divergent integral was taken as 0\n";
      if (diag.inaccurate_integrals > 0) std::cerr << "warning: an integral missed its error target\n";
      return 0;
    }

    if (*verify) {
      Expr e = load_program(verify_o);
      CompiledProgram p = compile_program(e);
      CExpr f = verify_simplify ? simplify(p.density) : p.density;
      if (!*verify_seed) vcfg.seed = default_seed();
      vcfg.quad = quad;
      VerifyReport r = verify_program(e, f, p.type, vcfg);
      if (verify_format == "json")
        std::cout << r.to_json().dump(2) << "\n";
      else
        std::cout << r.to_text();
      return r.passed ? 0 : 2;
    }

    if (*simplify_cmd) {
      DensityText d = parse_density(read_file(dens_file));
      PdfType t = typecheck_cexpr(TypeEnv().insert(d.arg_type), d.body);
      if (t != PdfType::real()) throw TypeError("density body has type " + t.to_string() + ", expected real");
      std::cout << format_density(simplify(d.body), d.arg_type, d.arg_name) << "\n";
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}
