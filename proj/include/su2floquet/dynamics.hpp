#pragma once

#include "su2floquet/floquet.hpp"

#include <string>
#include <vector>

namespace su2floquet {

/// a_n = <phi0| F^n |phi0> for n = 1..N.
struct AutocorrelationSequence {
  std::vector<Complex> values;
  std::string initial_state_tag;
  /// Largest | ||F^n phi0|| - 1 | seen while iterating.
  double norm_drift = 0.0;
};

/// Basis vector |m> of the full basis; ConfigError for m outside [-J, J].
CVector basis_state(const SpinBasis& basis, double m);

/// Iterates F on phi0 by matrix-vector products. ConfigError when phi0 is not
/// normalized within 1e-12 or its size does not match F.
AutocorrelationSequence autocorrelation(const UnitaryOperator& f, const CVector& phi0, std::size_t n_seq,
                                        std::string tag = {});

enum class Window { None, Hann };

struct FftOptions {
  /// Non-power-of-two lengths: prepend a_0 = 1 and zero-pad to the next
  /// power of two. Without padding such lengths raise NonPowerOfTwo.
  bool pad = true;
  Window window = Window::None;
};

struct PowerSpectrum {
  /// Bin k sits at phase 2 pi k / n_fft.
  std::vector<double> phases;
  /// |hat a_k|^2 with hat a_k = (1/n_fft) sum_n a_n exp(+2 pi i k n / n_fft).
  std::vector<double> raw_power;
  /// raw_power scaled to unit sum.
  std::vector<double> power;
  std::size_t n_fft = 0;
  bool padded = false;

  /// sqrt of the normalized power, for amplitude plots.
  std::vector<double> amplitude() const;
};

PowerSpectrum fft_spectrum(const AutocorrelationSequence& seq, const FftOptions& opt = {});

inline constexpr double kPeakFactor = 3.0;

/// Circular local maxima above factor times the median power (and above
/// 1e-12 of the largest bin), ascending.
std::vector<std::size_t> find_peaks(const PowerSpectrum& s, double factor = kPeakFactor);

struct OverlapWeights {
  std::vector<double> phases;
  /// |<psi_j|phi0>|^2, same order as phases (ascending).
  std::vector<double> weights;
};

OverlapWeights overlap_weights(const UnitaryOperator& f, const CVector& phi0);

/// sum_j w_j exp(-i n eps_j) for n = 1..n_seq.
std::vector<Complex> resynthesize(const OverlapWeights& w, std::size_t n_seq);

/// Weighted mean, over eigenphases with weight above threshold, of the
/// circular distance to the nearest detected peak. Infinity without peaks.
double peak_position_error(const PowerSpectrum& s, const std::vector<std::size_t>& peaks,
                           const OverlapWeights& w, double threshold);

}  // namespace su2floquet
