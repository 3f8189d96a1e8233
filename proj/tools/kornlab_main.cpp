// Command-line front end: five verification campaigns over configurable
// domains, with CSV/JSON reports.  Exit codes: 0 = all checks pass,
// 1 = mathematical violation found, 2 = configuration error, 3 = numerical
// failure (non-convergence).

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kornlab/experiment.hpp"

namespace {

struct FlagValues {
  std::string config_path;
  std::string domain;
  int N = 0;
  std::vector<int> resolutions;
  std::vector<std::uint64_t> seeds;
  std::string bc_mode;
  std::string format;
  std::string out_path;
  std::string dump_dir;
  std::string field_class;
  double cg_tol = 0.0;
  double eig_tol = 0.0;
  double chain_tol = 0.0;
  bool deterministic_sum = false;
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"kornlab: verification campaigns for discrete Korn-type seminorm estimates"};
  app.require_subcommand(1);

  FlagValues flags;
  app.add_option("--config", flags.config_path, "key/value config file applied before flags");
  auto* opt_domain =
      app.add_option("--domain", flags.domain, "domain kind: box, ball, annulus, shell, solid_torus");
  auto* opt_n = app.add_option("--N", flags.N, "spatial dimension (1..5)");
  auto* opt_res = app.add_option("--resolution", flags.resolutions,
                                 "vertices per axis; repeat for a sweep");
  auto* opt_seed = app.add_option("--seed", flags.seeds, "random seed; repeat for a campaign");
  auto* opt_bc = app.add_option("--bc-mode", flags.bc_mode, "boundary mode: full or tangential")
                     ->check(CLI::IsMember({"full", "tangential"}));
  auto* opt_fmt = app.add_option("--format", flags.format, "report format: csv or json")
                      ->check(CLI::IsMember({"csv", "json"}));
  auto* opt_out = app.add_option("--out", flags.out_path, "also write the report to this path");
  auto* opt_dump =
      app.add_option("--dump-dir", flags.dump_dir, "directory for counterexample snapshots");
  auto* opt_class = app.add_option("--field-class", flags.field_class,
                                   "verify field class: random, gradient or skew")
                        ->check(CLI::IsMember({"random", "gradient", "skew"}));
  auto* opt_cg = app.add_option("--cg-tol", flags.cg_tol, "conjugate-gradient tolerance");
  auto* opt_eig = app.add_option("--eig-tol", flags.eig_tol, "eigenvalue residual tolerance");
  auto* opt_chain = app.add_option("--chain-tol", flags.chain_tol, "assertion slack tolerance");
  auto* opt_det = app.add_flag("--deterministic-sum", flags.deterministic_sum,
                               "byte-stable reports (timings zeroed)");

  const char* names[] = {"constants", "verify", "korn", "betti", "convergence"};
  const char* briefs[] = {"Poincaré/Maxwell constants per resolution",
                          "sharp constant and the decomposition chain over seeds",
                          "Korn identity and ratio suite",
                          "harmonic-space dimensions across all degrees",
                          "dyadic sweep with Richardson extrapolation"};
  for (int i = 0; i < 5; ++i) app.add_subcommand(names[i], briefs[i])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    kornlab::ExperimentConfig cfg;
    if (!flags.config_path.empty()) kornlab::load_config_file(cfg, flags.config_path);
    if (*opt_domain) kornlab::apply_config_entry(cfg, "domain", flags.domain);
    if (*opt_n) cfg.N = flags.N;
    if (*opt_res) cfg.resolutions = flags.resolutions;
    if (*opt_seed) cfg.seeds = flags.seeds;
    if (*opt_bc) kornlab::apply_config_entry(cfg, "bc_mode", flags.bc_mode);
    if (*opt_fmt) cfg.format = flags.format;
    if (*opt_out) cfg.out_path = flags.out_path;
    if (*opt_dump) cfg.dump_dir = flags.dump_dir;
    if (*opt_class) cfg.field_class = flags.field_class;
    if (*opt_cg) cfg.cg_tol = flags.cg_tol;
    if (*opt_eig) cfg.eig_tol = flags.eig_tol;
    if (*opt_chain) cfg.chain_tol = flags.chain_tol;
    if (*opt_det) cfg.deterministic_sum = true;

    const std::string command = app.get_subcommands().front()->get_name();
    kornlab::RunReport rep = kornlab::run_command(command, cfg);
    kornlab::write_report(rep, cfg);
    return rep.exit_code;
  } catch (const kornlab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const kornlab::DomainError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const kornlab::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
