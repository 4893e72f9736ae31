#pragma once

#include "su2floquet/common.hpp"

#include <vector>

namespace su2floquet {

/// Integrated level count N(eps) sampled at its jumps.
struct CumulativeDensity {
  /// Sorted phases; N jumps by one at each (repeated phases jump repeatedly).
  std::vector<double> phases;
  /// N(phases[k]) after the jump, i.e. k + 1.
  std::vector<double> counts;
  /// counts / total.
  std::vector<double> normalized;
  std::size_t total = 0;

  /// N(eps): number of levels <= eps.
  double at(double eps) const;
};

CumulativeDensity cumulative_density(const std::vector<double>& phases);

/// Largest nearest-neighbour gap on the circle divided by the mean spacing
/// 2pi / N. Values near 1 mean an even spread; large values mean a gap.
double max_gap_ratio(const std::vector<double>& phases);

struct Histogram {
  double lo = 0.0;
  double hi = kTwoPi;
  std::vector<std::size_t> counts;

  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
};

/// Counts per bin in [lo, hi). Throws EmptyWindow if no phase falls in the
/// window and ConfigError for an invalid window or bins < 2.
Histogram density_histogram(const std::vector<double>& phases, double lo, double hi, std::size_t bins);

/// Pearson correlation of two histograms with equal bin counts after
/// normalizing each to unit sum.
double histogram_correlation(const Histogram& a, const Histogram& b);

/// Interval that is divided into boxes. Support is the smallest arc holding
/// all phases (the circle cut at its largest gap); FullCircle is [0, 2pi).
/// A band-limited spectrum leaves most boxes of the full circle permanently
/// empty, which biases small-M slopes downward.
enum class BoxDomain { Support, FullCircle };

struct ScaleRange {
  /// Box counts M = 2^k with min_boxes <= M <= max_boxes. max_boxes = 0
  /// selects N_levels / 8.
  std::size_t min_boxes = 4;
  std::size_t max_boxes = 0;
  BoxDomain domain = BoxDomain::Support;
};

/// Phases mapped affinely onto [0, 2pi] so that the support arc fills the
/// circle. Returns all zeros for a single-point support.
std::vector<double> stretch_support(const std::vector<double>& phases);

struct DqCurve {
  std::vector<double> q_values;
  std::vector<double> dq;
  /// Standard error of each D_q from the least-squares slope.
  std::vector<double> std_error;
  std::vector<double> fit_r2;
  std::vector<std::size_t> fit_scales;

  double at(double q) const;
};

inline constexpr std::size_t kMinLevelsForDq = 64;

/// Default q grid: -5 to 5 in steps of 0.25.
std::vector<double> default_q_values();

/// Box-counting estimate of the generalized dimensions over the box domain:
/// ln sum p_i^q against ln(1/M) has slope (q - 1) D_q; for q = 1 the slope of
/// sum p_i ln p_i gives the information dimension. Throws InsufficientLevels
/// below kMinLevelsForDq phases and ConfigError when fewer than two scales
/// fit the range.
DqCurve dq_spectrum(const std::vector<double>& phases, const std::vector<double>& q_values,
                    ScaleRange range = {});

}  // namespace su2floquet
