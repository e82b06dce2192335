#include "qkahler/drivers.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_common_options(CLI::App* cmd, qk::RunConfig& cfg, std::string& mode,
                        std::string& norm) {
  cmd->add_option("--q", cfg.q, "deformation parameter as a rational p/s");
  cmd->add_option("--lmax", cfg.lmax, "Peter-Weyl cutoff (half-integer, e.g. 3 or 5/2)");
  cmd->add_option("--bundles", [&cfg](const std::vector<std::string>& vals) {
        auto& v = vals.front();
        auto dots = v.find("..");
        if (dots == std::string::npos) return false;
        cfg.bundle_lo = std::stoi(v.substr(0, dots));
        cfg.bundle_hi = std::stoi(v.substr(dots + 2));
        return true;
      },
      "line bundle range A..B");
  cmd->add_option("--mode", mode, "exact|approx")->check(CLI::IsMember({"exact", "approx"}));
  cmd->add_option("--tol", cfg.tol, "residual tolerance (approx mode only)");
  cmd->add_option("--normalization", norm, "triangular|unitary")
      ->check(CLI::IsMember({"triangular", "unitary"}));
  cmd->add_option("--seed", cfg.seed, "seed for randomized property checks");
  cmd->add_option("--out", cfg.out, "write the JSON report to this file");
  cmd->add_flag("--text", cfg.text, "also render a plain-text table");
  cmd->add_flag("--inject-fault", cfg.inject_fault,
                "perturb one operator entry (negative control)");
}

int finish(const qk::Report& rep, const qk::RunConfig& cfg) {
  std::string json = rep.to_json_string();
  if (!cfg.out.empty())
    qk::write_file(cfg.out, json);
  else
    std::cout << json;
  if (cfg.text) rep.render_text(std::cerr);
  if (!rep.all_pass()) {
    const qk::CheckResult* f = rep.first_failure();
    std::cerr << "FAILED: " << (f ? f->name : "unknown check") << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact verification toolkit for the q-deformed projective line"};
  app.require_subcommand(1);

  qk::RunConfig cfg;
  std::string mode = "exact", norm = "triangular";

  CLI::App* verify = app.add_subcommand("verify", "run the identity suite");
  CLI::App* cohom = app.add_subcommand("cohomology", "cohomology dimension table");
  CLI::App* serre = app.add_subcommand("serre", "Serre pairing ranks");
  for (CLI::App* cmd : {verify, cohom, serre})
    add_common_options(cmd, cfg, mode, norm);

  CLI11_PARSE(app, argc, argv);

  cfg.mode = mode == "exact" ? qk::Mode::Exact : qk::Mode::Approx;
  cfg.normalization = norm == "triangular" ? qk::Normalization::Triangular
                                           : qk::Normalization::Unitary;
  try {
    if (verify->parsed()) return finish(qk::run_verify(cfg), cfg);
    if (cohom->parsed()) return finish(qk::run_cohomology(cfg), cfg);
    if (serre->parsed()) return finish(qk::run_serre(cfg), cfg);
  } catch (const qk::Error& e) {
    std::cerr << "error[" << qk::to_string(e.kind()) << "]: " << e.what() << "\n";
    return e.kind() == qk::ErrorKind::InvalidQ ||
                   e.kind() == qk::ErrorKind::ConfigError
               ? 2
               : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
