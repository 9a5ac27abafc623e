#include <csignal>
#include <iostream>

#include "CLI11.hpp"
#include "gpisos/cli.hpp"

using namespace gpisos;

namespace {

void on_interrupt(int) { cli::interrupt_flag().store(true); }

void add_budgets(CLI::App* app, cli::Budgets& budgets, std::string& max_den) {
  app->add_option("--time-limit", budgets.seconds, "Wall-clock seconds per subproblem")->capture_default_str();
  app->add_option("--max-denominator", max_den, "Largest rounding denominator")->capture_default_str();
  app->add_option("--max-basis", budgets.max_basis, "Largest Gram basis attempted")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact sum-of-squares certificates for Gaussian product inequality gap polynomials"};
  app.require_subcommand(1);

  cli::BuildRequest build;
  std::size_t build_case = 0;
  std::string build_output;
  auto* b = app.add_subcommand("build", "Print the gap polynomial of one case");
  b->add_option("--exponents", build.exponents, "e.g. 4,3,2 or m,1,1,1")->required();
  b->add_option("--case", build_case, "1-based case index (default 1)");
  b->add_flag("--symbolic", build.symbolic, "First exponent is the symbol m");
  b->add_option("--output", build_output, "Also write the polynomial to this file");

  cli::CertifyRequest certify;
  certify.workers = cli::default_workers();
  std::string certify_den = certify.budgets.max_denominator.get_str();
  std::string certify_out = certify.output_dir.string();
  std::string certify_poly;
  bool no_timings = false;
  auto* c = app.add_subcommand("certify", "Certify every subproblem of an inequality chain");
  auto* c_exps = c->add_option("--exponents", certify.exponents, "e.g. 4,3,2 or m,3,2");
  auto* c_poly = c->add_option("--polynomial", certify_poly, "Certify one polynomial instead");
  c_exps->excludes(c_poly);
  c->add_option("--vars", certify.variables, "Variables of --polynomial")->delimiter(',');
  c->add_flag("--symbolic", certify.symbolic, "First exponent is the symbol m");
  c->add_option("--output-dir", certify_out, "Certificates and reports go here")->capture_default_str();
  c->add_option("--workers", certify.workers, "Worker threads (default GPISOS_WORKERS or core count)");
  c->add_flag("--no-timings", no_timings, "Omit timings from reports");
  add_budgets(c, certify.budgets, certify_den);

  cli::VerifyRequest verify;
  std::vector<std::string> verify_paths;
  auto* v = app.add_subcommand("verify", "Check certificate files exactly");
  v->add_option("paths", verify_paths, "Files or directories");
  v->add_flag("--published-fixtures,--paper-fixtures", verify.published_fixtures, "Verify the bundled published decompositions");

  cli::OracleRequest oracle;
  std::string oracle_json;
  auto* o = app.add_subcommand("oracle", "Cross-check the two moment algorithms on random instances");
  o->add_option("--seed", oracle.seed)->capture_default_str();
  o->add_option("--count", oracle.count)->capture_default_str();
  o->add_option("--max-dim", oracle.max_dim)->capture_default_str();
  o->add_option("--max-total", oracle.max_total, "Largest exponent sum")->capture_default_str();
  o->add_option("--max-factors", oracle.max_factors, "Skip instances with more Gaussian factors")->capture_default_str();
  o->add_option("--json", oracle_json, "Structured report path");

  cli::ConjectureRequest conj;
  std::string conj_den = conj.budgets.max_denominator.get_str();
  std::string conj_out = conj.output_dir.string();
  std::string conj_json;
  auto* h = app.add_subcommand("conjecture", "Build H and attempt an SOS certificate");
  h->add_option("--n", conj.n)->capture_default_str();
  h->add_option("--m", conj.exponents, "Exponents m_1..m_n")->capture_default_str();
  h->add_option("--output-dir", conj_out)->capture_default_str();
  h->add_option("--json", conj_json, "Structured report path");
  add_budgets(h, conj.budgets, conj_den);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kUsage;
  }

  std::signal(SIGINT, on_interrupt);
  try {
    if (*b) {
      if (build_case) build.case_id = build_case;
      if (!build_output.empty()) build.output = build_output;
      return cli::cmd_build(build, std::cout, std::cerr);
    }
    if (*c) {
      if (!*c_exps && !*c_poly) {
        std::cerr << "error: certify needs --exponents or --polynomial\n";
        return cli::kUsage;
      }
      if (*c_poly) certify.polynomial = certify_poly;
      certify.budgets.max_denominator = BigInt(certify_den);
      certify.output_dir = certify_out;
      certify.timings = !no_timings;
      return cli::cmd_certify(certify, std::cout, std::cerr);
    }
    if (*v) {
      verify.paths.assign(verify_paths.begin(), verify_paths.end());
      return cli::cmd_verify(verify, std::cout, std::cerr);
    }
    if (*o) {
      if (!oracle_json.empty()) oracle.json = oracle_json;
      return cli::cmd_oracle(oracle, std::cout, std::cerr);
    }
    if (*h) {
      conj.budgets.max_denominator = BigInt(conj_den);
      conj.output_dir = conj_out;
      if (!conj_json.empty()) conj.json = conj_json;
      return cli::cmd_conjecture(conj, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return cli::kUsage;
}
