#include "su2floquet/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace su2floquet {

using nlohmann::json;

const char* to_string(Command c) {
  switch (c) {
    case Command::Butterfly: return "butterfly";
    case Command::Dq: return "dq";
    case Command::Crossings: return "crossings";
    case Command::Classical: return "classical";
    case Command::EvolveFft: return "evolve-fft";
    case Command::Verify: return "verify";
  }
  return "?";
}

Command command_from_string(const std::string& s) {
  for (auto c : {Command::Butterfly, Command::Dq, Command::Crossings, Command::Classical, Command::EvolveFft,
                 Command::Verify}) {
    if (s == to_string(c)) return c;
  }
  throw ConfigError("unknown command '" + s + "'");
}

namespace {

const char* selection_name(SectorSelection s) {
  switch (s) {
    case SectorSelection::All: return "all";
    case SectorSelection::Even: return "even";
    case SectorSelection::Odd: return "odd";
    case SectorSelection::DifferentParity: return "different-parity";
  }
  return "?";
}

bool spin_label(double j) {
  const double t = 2.0 * j;
  return std::isfinite(j) && j > 0.0 && t == std::round(t);
}

}  // namespace

void RunConfig::validate() const {
  if (!spin_label(j)) throw ConfigError("J must be positive with 2J an integer");
  if (!std::isfinite(alpha_scaled) || alpha_scaled < 0.0) throw ConfigError("alpha-scaled must be finite and >= 0");
  if (heta && !std::isfinite(*heta)) throw ConfigError("heta must be finite");
  if (!std::isfinite(heta_lo) || !std::isfinite(heta_hi) || !(heta_hi > heta_lo))
    throw ConfigError("heta range needs finite lo < hi");
  if (heta_hi - heta_lo > kFourPi) throw ConfigError("heta range is wider than one 4pi period");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (mu < 0 || (mu == 0 && nu != 0)) throw ConfigError("rational prefactor needs mu >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (command == Command::Crossings) {
    if (!(density > 0.0)) throw ConfigError("density must be positive");
    if (j_max > 0.0 && (!spin_label(j_min) || !spin_label(j_max) || j_min >= j_max))
      throw ConfigError("J range needs valid J values with j-min < j-max");
    if (variant == Variant::XY && sector != SectorSelection::All)
      throw ConfigError("parity sectors are undefined for the xy variant");
  }
  if (command == Command::Classical) {
    if (seeds < 1) throw ConfigError("seeds must be >= 1");
    if (map_steps < 1) throw ConfigError("map steps must be >= 1");
  }
  if (command == Command::EvolveFft) {
    if (n_seq < 1) throw ConfigError("n-seq must be >= 1");
    if (initial_m) {
      const double idx = *initial_m + j;
      if (idx < 0.0 || idx > 2.0 * j || idx != std::round(idx)) throw ConfigError("initial m is not a basis label");
    }
  }
  model().validate();
}

ModelParams RunConfig::model() const {
  ModelParams p;
  p.basis = SpinBasis::from_j(j);
  p.alpha_scaled = alpha_scaled;
  p.heta = heta.value_or(0.0);
  p.variant = variant;
  if (mu > 0) p.prefactor = RationalPrefactor{nu, mu};
  return p;
}

json RunConfig::canonical() const {
  json c = json::object();
  c["command"] = to_string(command);
  c["model"] = params_record(model());
  c["engine_version"] = kEngineVersion;
  c["schema_version"] = kSchemaVersion;
  c["rng_seed"] = rng_seed;
  switch (command) {
    case Command::Butterfly:
      c["grid"] = heta ? json{{"point", *heta}} : json{{"lo", heta_lo}, {"hi", heta_hi}, {"steps", steps}};
      break;
    case Command::Dq:
      c["kicked_top"] = kicked_top;
      c["box_domain"] = box_domain == BoxDomain::Support ? "support" : "full-circle";
      break;
    case Command::Crossings:
      c["range"] = {{"lo", heta_lo}, {"hi", heta_hi}};
      c["density"] = density;
      c["sector"] = selection_name(sector);
      c["j_range"] = {{"min", j_min}, {"max", j_max}};
      break;
    case Command::Classical:
      c["alpha"] = alpha.value_or(alpha_scaled / j);
      c["eta"] = eta.value_or(heta.value_or(0.0) * j);
      c["seeds"] = seeds;
      c["map_steps"] = map_steps;
      break;
    case Command::EvolveFft:
      c["grid"] = heta ? json{{"point", *heta}} : json{{"lo", heta_lo}, {"hi", heta_hi}, {"steps", steps}};
      c["n_seq"] = n_seq;
      c["initial_m"] = initial_m.value_or(std::floor(j / 2.0));
      c["pad"] = pad;
      c["hann"] = hann;
      c["amplitude"] = amplitude;
      break;
    case Command::Verify:
      break;
  }
  return c;
}

std::string RunConfig::cache_key() const {
  const std::string s = canonical().dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

namespace {

std::vector<double> heta_grid(const RunConfig& cfg) {
  if (cfg.heta) return {*cfg.heta};
  return uniform_heta_grid(cfg.steps, cfg.heta_lo, cfg.heta_hi);
}

Dataset dq_dataset(const RunConfig& cfg) {
  ModelParams p = cfg.model();
  const FloquetBuilder builder(p.basis);
  const UnitaryOperator u = cfg.kicked_top ? builder.kicked_top(p) : builder.floquet(p);
  ScaleRange range;
  range.domain = cfg.box_domain;
  const auto q = default_q_values();
  std::vector<NamedCurve> curves;
  if (cfg.variant == Variant::XY) {
    curves.push_back({"full", dq_spectrum(eigenphases(u, false).phases, q, range)});
  } else {
    const ParityBlocks blocks = parity_blocks(u, parity_decompose(p.basis));
    curves.push_back({"even", dq_spectrum(eigenphases(blocks.even, false).phases, q, range)});
    curves.push_back({"odd", dq_spectrum(eigenphases(blocks.odd, false).phases, q, range)});
  }
  Dataset d = dq_table(p, curves);
  d.params["operator"] = cfg.kicked_top ? "kicked-top" : "floquet";
  d.params["box_domain"] = cfg.box_domain == BoxDomain::Support ? "support" : "full-circle";
  return d;
}

Dataset crossings_dataset(const RunConfig& cfg, const Executor& exec) {
  CrossingScanConfig sc;
  sc.lo = cfg.heta_lo;
  sc.hi = cfg.heta_hi;
  sc.density = cfg.density;
  sc.selection = cfg.sector;
  if (cfg.j_max > 0.0) {
    std::vector<CountRow> rows;
    for (double j = cfg.j_min; j <= cfg.j_max + 1e-9; j += 1.0) {
      RunConfig one = cfg;
      one.j = j;
      rows.push_back({j, count_crossings(find_crossings(one.model(), sc, exec).records)});
    }
    Dataset d = crossing_counts_table(cfg.model(), rows);
    d.params["density"] = cfg.density;
    d.params["sector"] = selection_name(cfg.sector);
    return d;
  }
  Dataset d = crossings_table(cfg.model(), find_crossings(cfg.model(), sc, exec).records);
  d.params["density"] = cfg.density;
  d.params["sector"] = selection_name(cfg.sector);
  return d;
}

Dataset classical_dataset(const RunConfig& cfg) {
  ClassicalParams p;
  p.alpha = cfg.alpha.value_or(cfg.alpha_scaled / cfg.j);
  p.eta = cfg.eta.value_or(cfg.heta.value_or(0.0) * cfg.j);
  p.validate();
  const auto seeds = random_seeds(cfg.seeds, cfg.rng_seed);
  const auto points = poincare_section(seeds, p, cfg.map_steps, cfg.variant);
  Dataset d = section_table(p, cfg.variant, cfg.rng_seed, points);
  d.params["seeds"] = cfg.seeds;
  d.params["map_steps"] = cfg.map_steps;
  d.params["occupied_fraction"] = occupied_cell_fraction(points);
  return d;
}

Dataset fft_dataset(const RunConfig& cfg, const Executor& exec) {
  const ModelParams templ = cfg.model();
  const double m0 = cfg.initial_m.value_or(std::floor(cfg.j / 2.0));
  const CVector phi0 = basis_state(templ.basis, m0);
  const auto grid = heta_grid(cfg);
  const FloquetBuilder builder(templ.basis);
  FftOptions opt;
  opt.pad = cfg.pad;
  opt.window = cfg.hann ? Window::Hann : Window::None;
  std::vector<PowerColumn> cols(grid.size());
  std::ostringstream tag;
  tag << "m=" << m0;
  exec.parallel_for(grid.size(), [&](std::size_t k) {
    const double h = fold_heta(grid[k]);
    const auto seq = autocorrelation(builder.floquet(templ.with_heta(h)), phi0, cfg.n_seq, tag.str());
    cols[k] = {h, fft_spectrum(seq, opt)};
  });
  return power_table(templ, tag.str(), cfg.n_seq, cols, cfg.amplitude);
}

void emit(const Dataset& d, const RunConfig& cfg, std::ostream& out) {
  if (cfg.output.empty() || cfg.output == "-") {
    out << serialize(d, cfg.format);
    out.flush();
    return;
  }
  WriteOptions opt;
  opt.format = cfg.format;
  write_dataset(d, cfg.output, opt);
}

std::filesystem::path cache_directory(const RunConfig& cfg) {
  if (!cfg.cache_dir.empty()) return cfg.cache_dir;
  if (const char* env = std::getenv(kCacheDirEnv); env && *env) return env;
  return {};
}

}  // namespace

Dataset compute_dataset(const RunConfig& cfg) {
  cfg.validate();
  const Executor exec(cfg.threads);
  switch (cfg.command) {
    case Command::Butterfly:
      return butterfly_table(butterfly_scan(cfg.model(), heta_grid(cfg), false, exec));
    case Command::Dq: return dq_dataset(cfg);
    case Command::Crossings: return crossings_dataset(cfg, exec);
    case Command::Classical: return classical_dataset(cfg);
    case Command::EvolveFft: return fft_dataset(cfg, exec);
    case Command::Verify: break;
  }
  throw ConfigError("verify produces no dataset");
}

std::vector<VerifyCheck> verify_suite(const RunConfig& cfg) {
  cfg.validate();
  const ModelParams p = cfg.model();
  std::vector<VerifyCheck> checks;
  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> uh(0.0, kFourPi);
  std::vector<double> points(5);
  for (auto& h : points) h = uh(rng);

  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
  };

  for (auto mode : {SymmetryMode::Periodicity, SymmetryMode::Reflection}) {
    double worst = 0.0;
    bool ok = true;
    for (double h : points) {
      const auto r = symmetry_check(p, mode, h);
      worst = std::max(worst, r.max_deviation);
      ok = ok && r.holds;
    }
    checks.push_back({mode == SymmetryMode::Periodicity ? "periodicity" : "reflection", ok,
                      "max deviation " + fmt(worst)});
  }

  {
    const FloquetBuilder b(p.basis);
    double worst = 0.0;
    for (double h : points) {
      const ModelParams q = p.with_heta(h);
      worst = std::max(worst, max_abs(b.first_three_factors(q).matrix - bch_rhs(q).matrix));
    }
    checks.push_back({"three-factor identity", worst <= 1e-11, "max deviation " + fmt(worst)});
  }

  {
    const auto r = symmetry_check(p, SymmetryMode::Collapse, kTwoPi);
    if (p.basis.integer_spin()) {
      checks.push_back({"collapse at 2pi", r.holds, "spread " + fmt(r.max_deviation)});
    } else {
      checks.push_back({"no collapse at 2pi (half-integer J)", !r.holds, "spread " + fmt(r.max_deviation)});
    }
  }

  if (p.basis.twice_j() == 4 && p.variant == Variant::XX && std::holds_alternative<std::monostate>(p.prefactor)) {
    const FloquetBuilder b(p.basis);
    const auto d = parity_decompose(p.basis);
    double worst = 0.0;
    for (double h : {kTwoPi / 3.0, 10.0 * kPi / 3.0}) {
      const ParityBlocks blocks = parity_blocks(b.floquet(p.with_heta(h)), d);
      worst = std::max(worst, max_abs(blocks.odd.matrix - CMatrix::Identity(blocks.odd.dim(), blocks.odd.dim())));
    }
    checks.push_back({"odd block is the identity at 2pi/3 and 10pi/3", worst <= 1e-12, "max deviation " + fmt(worst)});

    auto true_hetas = [&](SectorSelection s) {
      CrossingScanConfig sc;
      sc.selection = s;
      std::vector<double> out;
      for (const auto& r : find_crossings(p, sc).records)
        if (r.is_true()) out.push_back(r.heta_star);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-8; }),
                out.end());
      return out;
    };
    auto matches = [](const std::vector<double>& got, const std::vector<double>& want) {
      if (got.size() != want.size()) return false;
      for (std::size_t i = 0; i < got.size(); ++i)
        if (std::abs(got[i] - want[i]) > 1e-8) return false;
      return true;
    };
    auto list = [&](const std::vector<double>& v) {
      std::string s;
      for (double x : v) s += (s.empty() ? "" : ", ") + fmt(x);
      return "{" + s + "}";
    };
    const auto odd = true_hetas(SectorSelection::Odd);
    const auto even = true_hetas(SectorSelection::Even);
    checks.push_back({"odd-sector crossings at 2pi/3, 2pi, 10pi/3",
                      matches(odd, {kTwoPi / 3.0, kTwoPi, 10.0 * kPi / 3.0}), "found " + list(odd)});
    checks.push_back({"even-sector crossing only at 2pi", matches(even, {kTwoPi}), "found " + list(even)});
  }
  return checks;
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    if (cfg.command == Command::Verify) {
      bool all = true;
      for (const auto& c : verify_suite(cfg)) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
        all = all && c.passed;
      }
      return all ? kExitOk : kExitVerifyFailure;
    }
    const auto dir = cache_directory(cfg);
    if (!dir.empty()) {
      const auto entry = dir / (cfg.cache_key() + ".tsv");
      if (std::filesystem::exists(entry)) {
        err << "cache hit " << entry.string() << "\n";
        emit(read_dataset(entry), cfg, out);
        return kExitOk;
      }
      const Dataset d = compute_dataset(cfg);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) throw IoError("cannot create cache directory " + dir.string() + ": " + ec.message());
      write_dataset(d, entry);
      emit(d, cfg, out);
      return kExitOk;
    }
    emit(compute_dataset(cfg), cfg, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ComputeError& e) {
    err << "compute error: " << e.what() << "\n";
    return kExitCompute;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCompute;
  }
}

}  // namespace su2floquet
