#include "su2floquet/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

using namespace su2floquet;

namespace {

void model_options(CLI::App& sub, RunConfig& cfg, std::string& variant) {
  sub.add_option("--J", cfg.j, "spin J (2J a positive integer)");
  sub.add_option("--alpha-scaled", cfg.alpha_scaled, "alpha J");
  sub.add_option("--variant", variant, "xx or xy")->check(CLI::IsMember({"xx", "xy"}));
  sub.add_option("--nu", cfg.nu, "prefactor numerator");
  sub.add_option("--mu", cfg.mu, "prefactor denominator (0: no prefactor)");
}

void exec_options(CLI::App& sub, RunConfig& cfg, std::string& format) {
  sub.add_option("--threads", cfg.threads, "worker threads");
  sub.add_option("--rng-seed", cfg.rng_seed, "random seed");
  sub.add_option("--cache-dir", cfg.cache_dir, std::string("cache directory (default $") + kCacheDirEnv + ")");
  sub.add_option("-o,--output", cfg.output, "output path ('-' for stdout)");
  sub.add_option("--format", format, "tsv or json")->check(CLI::IsMember({"tsv", "json"}));
}

void grid_options(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--heta", cfg.heta, "single heta value");
  sub.add_option("--heta-lo", cfg.heta_lo, "grid start");
  sub.add_option("--heta-hi", cfg.heta_hi, "grid end (exclusive)");
  sub.add_option("--steps", cfg.steps, "grid points");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet spectra of the double-kicked SU(2) model"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string variant = "xx";
  std::string format = "tsv";
  std::string sector = "all";
  std::string domain = "support";
  bool no_pad = false;

  auto* butterfly = app.add_subcommand("butterfly", "eigenphases over a heta grid");
  auto* dq = app.add_subcommand("dq", "generalized dimensions of one spectrum");
  auto* crossings = app.add_subcommand("crossings", "level crossings over a heta range");
  auto* classical = app.add_subcommand("classical", "Poincare section of the mean-field map");
  auto* fft = app.add_subcommand("evolve-fft", "spectrum retrieved from the autocorrelation of one state");
  auto* verify = app.add_subcommand("verify", "symmetry and exactness suite");

  for (auto* sub : {butterfly, dq, crossings, classical, fft, verify}) {
    model_options(*sub, cfg, variant);
    exec_options(*sub, cfg, format);
  }
  grid_options(*butterfly, cfg);
  grid_options(*fft, cfg);
  dq->add_option("--heta", cfg.heta, "heta value");
  dq->add_flag("--kicked-top", cfg.kicked_top, "use the single-kick control operator");
  dq->add_option("--box-domain", domain, "support or full-circle")
      ->check(CLI::IsMember({"support", "full-circle"}));
  crossings->add_option("--heta-lo", cfg.heta_lo, "range start");
  crossings->add_option("--heta-hi", cfg.heta_hi, "range end");
  crossings->add_option("--density", cfg.density, "grid points per 4pi / J^3");
  crossings->add_option("--sector", sector, "all, even, odd or different-parity")
      ->check(CLI::IsMember({"all", "even", "odd", "different-parity"}));
  crossings->add_option("--j-min", cfg.j_min, "count table from this J");
  crossings->add_option("--j-max", cfg.j_max, "count table up to this J");
  classical->add_option("--heta", cfg.heta, "heta (eta = heta J unless --eta)");
  classical->add_option("--alpha", cfg.alpha, "kick angle (default alpha-scaled / J)");
  classical->add_option("--eta", cfg.eta, "torsion strength");
  classical->add_option("--seeds", cfg.seeds, "number of random seeds");
  classical->add_option("--map-steps", cfg.map_steps, "map iterations per seed");
  fft->add_option("--n-seq", cfg.n_seq, "sequence length");
  fft->add_option("--m", cfg.initial_m, "initial basis state |m> (default floor(J/2))");
  fft->add_flag("--no-pad", no_pad, "reject non-power-of-two lengths");
  fft->add_flag("--hann", cfg.hann, "apply a Hann window");
  fft->add_flag("--amplitude", cfg.amplitude, "emit |FFT| instead of power");
  verify->add_option("--heta", cfg.heta, "unused");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    for (auto* sub : app.get_subcommands()) cfg.command = command_from_string(sub->get_name());
    cfg.variant = variant_from_string(variant);
    cfg.format = format_from_string(format);
    const std::map<std::string, SectorSelection> sectors{{"all", SectorSelection::All},
                                                         {"even", SectorSelection::Even},
                                                         {"odd", SectorSelection::Odd},
                                                         {"different-parity", SectorSelection::DifferentParity}};
    cfg.sector = sectors.at(sector);
    cfg.box_domain = domain == "support" ? BoxDomain::Support : BoxDomain::FullCircle;
    cfg.pad = !no_pad;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return run_command(cfg, std::cout, std::cerr);
}
