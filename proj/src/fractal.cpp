#include "su2floquet/fractal.hpp"

#include "su2floquet/linear_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace su2floquet {

double CumulativeDensity::at(double eps) const {
  const auto it = std::upper_bound(phases.begin(), phases.end(), eps);
  return static_cast<double>(it - phases.begin());
}

CumulativeDensity cumulative_density(const std::vector<double>& phases) {
  if (phases.empty()) throw ConfigError("cumulative density of an empty spectrum");
  CumulativeDensity c;
  c.phases = phases;
  for (auto& p : c.phases) p = wrap_phase(p);
  std::sort(c.phases.begin(), c.phases.end());
  c.total = c.phases.size();
  c.counts.resize(c.total);
  c.normalized.resize(c.total);
  for (std::size_t k = 0; k < c.total; ++k) {
    c.counts[k] = static_cast<double>(k + 1);
    c.normalized[k] = c.counts[k] / static_cast<double>(c.total);
  }
  return c;
}

double max_gap_ratio(const std::vector<double>& phases) {
  if (phases.empty()) return 0.0;
  std::vector<double> x(phases);
  for (auto& p : x) p = wrap_phase(p);
  std::sort(x.begin(), x.end());
  double gap = x.front() + kTwoPi - x.back();
  for (std::size_t k = 1; k < x.size(); ++k) gap = std::max(gap, x[k] - x[k - 1]);
  return gap / (kTwoPi / static_cast<double>(x.size()));
}

Histogram density_histogram(const std::vector<double>& phases, double lo, double hi, std::size_t bins) {
  if (bins < 2) throw ConfigError("histogram needs at least two bins");
  if (!(lo >= 0.0 && hi <= kTwoPi && lo < hi)) throw ConfigError("histogram window must lie in [0, 2pi)");
  Histogram h{lo, hi, std::vector<std::size_t>(bins, 0)};
  std::size_t inside = 0;
  for (double p : phases) {
    const double w = wrap_phase(p);
    if (w < lo || w >= hi) continue;
    auto b = static_cast<std::size_t>((w - lo) / (hi - lo) * static_cast<double>(bins));
    h.counts[std::min(b, bins - 1)] += 1;
    ++inside;
  }
  if (inside == 0) throw EmptyWindow("no eigenphase inside the histogram window");
  return h;
}

double histogram_correlation(const Histogram& a, const Histogram& b) {
  if (a.counts.size() != b.counts.size()) throw ConfigError("histograms differ in bin count");
  const std::size_t n = a.counts.size();
  const double sa = static_cast<double>(std::accumulate(a.counts.begin(), a.counts.end(), std::size_t{0}));
  const double sb = static_cast<double>(std::accumulate(b.counts.begin(), b.counts.end(), std::size_t{0}));
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(a.counts[i]) / sa;
    y[i] = static_cast<double>(b.counts[i]) / sb;
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double DqCurve::at(double q) const {
  for (std::size_t i = 0; i < q_values.size(); ++i)
    if (std::abs(q_values[i] - q) < 1e-12) return dq[i];
  throw ConfigError("q = " + std::to_string(q) + " not in the D_q curve");
}

std::vector<double> default_q_values() {
  std::vector<double> q;
  for (int k = -20; k <= 20; ++k) q.push_back(0.25 * k);
  return q;
}

std::vector<double> stretch_support(const std::vector<double>& phases) {
  std::vector<double> x(phases);
  for (auto& p : x) p = wrap_phase(p);
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  if (n == 0) return x;
  std::size_t cut = n - 1;
  double gap = x.front() + kTwoPi - x.back();
  for (std::size_t k = 1; k < n; ++k) {
    if (x[k] - x[k - 1] > gap) {
      gap = x[k] - x[k - 1];
      cut = k - 1;
    }
  }
  const double start = x[(cut + 1) % n];
  const double span = kTwoPi - gap;
  std::vector<double> out(n, 0.0);
  if (span <= 0.0) return out;
  for (std::size_t k = 0; k < n; ++k) {
    double y = x[k] - start;
    if (y < 0.0) y += kTwoPi;
    out[k] = std::min(y / span, 1.0) * kTwoPi;
  }
  return out;
}

DqCurve dq_spectrum(const std::vector<double>& phases, const std::vector<double>& q_values, ScaleRange range) {
  const std::size_t n = phases.size();
  if (n < kMinLevelsForDq) {
    throw InsufficientLevels("D_q needs at least " + std::to_string(kMinLevelsForDq) + " levels, got " +
                             std::to_string(n));
  }
  const std::size_t max_boxes = range.max_boxes ? range.max_boxes : n / 8;
  DqCurve curve;
  for (std::size_t m = 1; m <= max_boxes; m *= 2)
    if (m >= range.min_boxes) curve.fit_scales.push_back(m);
  if (curve.fit_scales.size() < 2) throw ConfigError("box-count range holds fewer than two scales");

  std::vector<double> x;
  if (range.domain == BoxDomain::Support) {
    x = stretch_support(phases);
  } else {
    x = phases;
    for (auto& p : x) p = wrap_phase(p);
  }

  // occupation probabilities per scale; the top end of the stretched support
  // lands on 2pi and is clamped into the last box
  std::vector<std::vector<double>> probs;
  for (std::size_t m : curve.fit_scales) {
    std::vector<double> counts(m, 0.0);
    for (double p : x) {
      auto b = static_cast<std::size_t>(p / kTwoPi * static_cast<double>(m));
      counts[std::min(b, m - 1)] += 1.0;
    }
    std::vector<double> occupied;
    for (double c : counts)
      if (c > 0.0) occupied.push_back(c / static_cast<double>(n));
    probs.push_back(std::move(occupied));
  }

  std::vector<double> log_eps;
  for (std::size_t m : curve.fit_scales) log_eps.push_back(-std::log(static_cast<double>(m)));

  for (double q : q_values) {
    std::vector<double> y;
    const bool information = std::abs(q - 1.0) < 1e-12;
    for (const auto& p : probs) {
      double s = 0.0;
      if (information) {
        for (double v : p) s += v * std::log(v);
      } else {
        for (double v : p) s += std::pow(v, q);
        s = std::log(s);
      }
      y.push_back(s);
    }
    const LinearFit fit = fit_line(log_eps, y);
    const double scale = information ? 1.0 : (q - 1.0);
    curve.q_values.push_back(q);
    curve.dq.push_back(fit.slope / scale);
    curve.std_error.push_back(fit.slope_std_error / std::abs(scale));
    curve.fit_r2.push_back(fit.r2);
  }
  return curve;
}

}  // namespace su2floquet
