#pragma once

#include "su2floquet/executor.hpp"
#include "su2floquet/floquet.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace su2floquet {

enum class Parity : std::int8_t { Even, Odd, Unresolved };

const char* to_string(Parity p);
Parity parity_from_string(const std::string& s);

inline constexpr double kResidualTolerance = 1e-11;
/// Gap in cos(eps) below which levels are re-diagonalized together.
inline constexpr double kClusterThreshold = 1e-4;

/// Eigenphases eps of U|psi> = exp(-i eps)|psi>, sorted ascending in [0, 2pi).
struct EigenphaseSet {
  std::vector<double> phases;
  std::vector<Parity> parities;
  /// Column k is the eigenvector of phases[k] (in the basis of the operator).
  std::optional<CMatrix> vectors;
  double residual = 0.0;

  std::size_t size() const noexcept { return phases.size(); }
};

/// Complete eigendecomposition of a unitary operator via its Hermitian part,
/// with a full complex Schur decomposition as fallback. Eigenvectors are
/// orthonormal, also inside degenerate clusters. Throws ConvergenceFailure
/// when the eigen-residual exceeds the tolerance.
EigenphaseSet eigenphases(const UnitaryOperator& u, bool want_vectors,
                          double residual_tolerance = kResidualTolerance);

/// Sector-resolved spectrum at one parameter point. Variant XX yields an
/// even and an odd block; XY yields a single full block.
struct SectorSpectrum {
  BasisTag sector = BasisTag::Full;
  EigenphaseSet set;
};

struct SpectrumColumn {
  double heta = 0.0;
  std::vector<SectorSpectrum> sectors;

  /// All sectors merged, sorted, with parity labels; no vectors.
  EigenphaseSet combined() const;
  const SectorSpectrum* sector(BasisTag tag) const;
};

/// Builds and diagonalizes one parameter point, split by parity for XX.
class SpectrumSolver {
 public:
  explicit SpectrumSolver(const SpinBasis& basis);

  const FloquetBuilder& builder() const noexcept { return builder_; }
  const ParityDecomposition& parity() const noexcept { return parity_; }

  SpectrumColumn column(const ModelParams& p, bool want_vectors) const;
  /// Full-basis spectrum without parity splitting; vectors (if requested)
  /// are labelled by applying P directly.
  EigenphaseSet full_spectrum(const UnitaryOperator& u, bool want_vectors) const;

 private:
  FloquetBuilder builder_;
  ParityDecomposition parity_;
};

struct ButterflyDataset {
  ModelParams params;
  std::vector<double> grid;
  std::vector<SpectrumColumn> columns;
  std::string parameter_hash;
  std::string engine_version = kEngineVersion;
};

/// Folds a value into [0, 4pi).
double fold_heta(double h);

std::vector<double> uniform_heta_grid(std::size_t steps, double lo = 0.0, double hi = kFourPi);

/// Spectra over a heta grid. Values outside [0, 4pi) are folded with a
/// warning on stderr. Throws ConfigError for a non-increasing grid after
/// folding; ConvergenceFailure names the offending grid point.
ButterflyDataset butterfly_scan(const ModelParams& templ, const std::vector<double>& grid,
                                bool want_vectors, const Executor& exec = Executor{});

/// Distance between two phase multisets on the circle: the smallest, over
/// cyclic alignments of the sorted lists, of the largest pairwise circular
/// distance. Infinity for different sizes.
double multiset_distance(const std::vector<double>& a, const std::vector<double>& b);

/// Length of the smallest arc holding all phases.
double circular_spread(const std::vector<double>& phases);

enum class SymmetryMode { Periodicity, Reflection, Collapse };

struct SymmetryReport {
  SymmetryMode mode;
  /// Periodicity/reflection: the symmetry holds within tolerance. Collapse:
  /// the spectrum at heta = 2pi is a single point within tolerance.
  bool holds = false;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

inline constexpr double kSymmetryTolerance = 1e-10;

/// Periodicity compares heta with heta + 4pi, reflection heta with
/// 4pi - heta; collapse inspects heta = 2pi (the heta argument is ignored).
SymmetryReport symmetry_check(const ModelParams& p, SymmetryMode mode, double heta);

}  // namespace su2floquet
