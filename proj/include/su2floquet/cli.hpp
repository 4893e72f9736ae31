#pragma once

#include "su2floquet/io.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace su2floquet {

enum class Command { Butterfly, Dq, Crossings, Classical, EvolveFft, Verify };

const char* to_string(Command c);
Command command_from_string(const std::string& s);

// Frozen exit-code map.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCompute = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kExitVerifyFailure = 5;

/// Environment variable naming the cache directory when --cache-dir is unset.
inline constexpr const char* kCacheDirEnv = "SU2FLOQUET_CACHE_DIR";

struct RunConfig {
  Command command = Command::Butterfly;

  // model
  double j = 20.0;
  double alpha_scaled = 1.0;
  /// Single heta point; for butterfly it replaces the range grid.
  std::optional<double> heta;
  double heta_lo = 0.0;
  double heta_hi = kFourPi;
  std::size_t steps = 256;
  Variant variant = Variant::XX;
  /// Rational prefactor exp(i 2 pi nu/mu Jz^2); mu = 0 means none.
  long nu = 0;
  long mu = 0;

  // dq
  bool kicked_top = false;
  BoxDomain box_domain = BoxDomain::Support;

  // crossings: a J range (j_min < j_max) adds the count table over integer J
  double j_min = 0.0;
  double j_max = 0.0;
  double density = 10.0;
  SectorSelection sector = SectorSelection::All;

  // classical; unset values follow from alpha_scaled / J and heta * J
  std::optional<double> alpha;
  std::optional<double> eta;
  std::size_t seeds = 10;
  std::size_t map_steps = 10'000;

  // evolve-fft
  std::size_t n_seq = 1024;
  std::optional<double> initial_m;
  bool pad = true;
  bool hann = false;
  bool amplitude = false;

  // execution
  unsigned threads = 1;
  std::uint64_t rng_seed = 0;
  std::string cache_dir;

  // output ("" or "-" is stdout)
  std::string output;
  Format format = Format::Tsv;

  /// ConfigError on invalid combinations.
  void validate() const;
  ModelParams model() const;
  /// Canonical record of everything that determines the dataset (output
  /// path, format, threads and cache location excluded).
  nlohmann::json canonical() const;
  /// FNV-1a of canonical(), hex.
  std::string cache_key() const;
};

/// Computes the dataset of a non-verify command.
Dataset compute_dataset(const RunConfig& cfg);

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Symmetry suite for J and alpha_scaled: periodicity, reflection, the
/// three-factor identity, collapse at 2pi, and for J = 2 the exact odd-block
/// identity and crossing set.
std::vector<VerifyCheck> verify_suite(const RunConfig& cfg);

/// Runs one command, writing artifacts atomically; log lines go to err.
/// Returns the exit code; exceptions are mapped, never propagated.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace su2floquet
