#pragma once

#include "su2floquet/spectrum.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace su2floquet {

enum class CrossingKind { DifferentParity, SameParity, Avoided, Collapse };
enum class SectorPair { EvenOdd, EvenEven, OddOdd, Unresolved };

const char* to_string(CrossingKind k);
const char* to_string(SectorPair s);
CrossingKind crossing_kind_from_string(const std::string& s);
SectorPair sector_pair_from_string(const std::string& s);

/// One refined crossing or gap minimum. level_ids are the sorted positions of
/// the two levels within their sectors just below heta_star (even, odd order
/// for EvenOdd). A Collapse record stands for the simultaneous meeting of all
/// levels at heta = 2pi and carries level_ids {-1, -1}.
struct CrossingRecord {
  double heta_star = 0.0;
  double phase_star = 0.0;
  CrossingKind kind = CrossingKind::Avoided;
  SectorPair sector_pair = SectorPair::Unresolved;
  std::array<int, 2> level_ids{-1, -1};
  double gap_bound = 0.0;
  std::optional<bool> alpha_independent;
  /// Set on records produced before the refinement budget ran out.
  bool partial = false;

  bool is_true() const noexcept { return kind != CrossingKind::Avoided; }
};

inline constexpr double kTrueCrossingTolerance = 1e-10;

/// True crossing iff gap_bound <= tau (inclusive); the kind then follows the
/// sector pair. Collapse records keep their kind.
CrossingKind classify_crossing(const CrossingRecord& r, double tau = kTrueCrossingTolerance);

enum class SectorSelection { All, Even, Odd, DifferentParity };

struct CrossingScanConfig {
  SectorSelection selection = SectorSelection::All;
  double lo = 0.0;
  double hi = kFourPi;
  /// Grid spacing 4pi / (density * J^3).
  double density = 10.0;
  double tau = kTrueCrossingTolerance;
  double max_j = 12.0;
  /// Tracking refinement: halvings allowed per grid step before giving up.
  int max_refine_depth = 40;
  int bisection_steps = 60;
  /// Bisection stops once the pair is this close in phase.
  double phase_target = 1e-12;
  double min_overlap = 0.7;
  /// Same-sector gap minima below this fraction of the mean spacing are
  /// refined and reported (as avoided or true crossings).
  double minimum_fraction = 0.5;
  /// Total extra diagonalizations allowed beyond the initial grid.
  std::size_t evaluation_budget = 50'000'000;
};

struct CrossingScan {
  std::vector<CrossingRecord> records;
  std::size_t grid_columns = 0;
  std::size_t evaluations = 0;
  bool collapse = false;
};

/// Thrown when refinement runs out of budget; carries the records found so
/// far, each flagged partial.
struct IncompleteScan : RefinementBudgetExceeded {
  IncompleteScan(const std::string& what, std::vector<CrossingRecord> partial_records)
      : RefinementBudgetExceeded(what), records(std::move(partial_records)) {}
  std::vector<CrossingRecord> records;
};

/// Adaptive crossing scan over [lo, hi). Levels are followed between
/// neighbouring columns by eigenvector overlap (optimal assignment), sign
/// changes of the wrapped phase difference of a pair are bisected, and
/// same-sector gap minima are refined by golden-section search. Integer J
/// yields a single Collapse record at 2pi (when the spectrum there is a
/// point within tau) and no pair records in that grid step. Records are
/// sorted by heta_star and deduplicated.
CrossingScan find_crossings(const ModelParams& templ, const CrossingScanConfig& cfg,
                            const Executor& exec = Executor{});

struct CrossingCounts {
  std::size_t different_parity = 0;
  std::size_t same_parity = 0;
  std::size_t avoided = 0;
  std::size_t collapse = 0;
};

CrossingCounts count_crossings(const std::vector<CrossingRecord>& records);

/// Re-diagonalizes at heta_star and returns the phase distance of the pair
/// (the smallest distance between the recorded sectors near phase_star).
double crossing_gap_at(const CrossingRecord& r, const ModelParams& templ);

/// Flags each true record with whether the sector pair still has two phases
/// within tol at the same heta_star for every alpha_scaled in alphas.
void mark_alpha_independence(std::vector<CrossingRecord>& records, const ModelParams& templ,
                             const std::vector<double>& alphas, double tol = 10 * kTrueCrossingTolerance);

struct ScalingFit {
  double exponent = 0.0;
  double std_error = 0.0;
  double log_prefactor = 0.0;
  double r2 = 0.0;
};

/// Least-squares fit of log(count) against log(J). Needs at least five
/// distinct J values and positive counts.
ScalingFit scaling_fit(const std::vector<double>& j_values, const std::vector<double>& counts);

struct LevelTracks {
  std::vector<double> grid;
  /// phases[level][column], in [0, 2pi). Level l starts at sorted position l.
  std::vector<std::vector<double>> phases;
  /// The same trajectories with 2pi jumps removed.
  std::vector<std::vector<double>> unwrapped;
  /// Smallest assigned overlap over all steps.
  double min_overlap = 1.0;
};

/// Follows the levels of one sector through a dataset computed with
/// eigenvectors. Throws AmbiguousTracking when an assigned overlap drops below
/// min_overlap, ConfigError when vectors are missing or the sector is absent.
LevelTracks track_levels(const ButterflyDataset& data, BasisTag sector, double min_overlap = 0.7);

/// Optimal matching of eigenvectors in the columns of a to those of b,
/// maximizing the summed squared overlaps. Returns col_b[col_a] and the
/// smallest matched squared overlap.
std::vector<int> match_vectors(const CMatrix& a, const CMatrix& b, double* min_overlap = nullptr);

}  // namespace su2floquet
