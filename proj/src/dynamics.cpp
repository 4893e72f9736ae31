#include "su2floquet/dynamics.hpp"

#include "su2floquet/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace su2floquet {

CVector basis_state(const SpinBasis& basis, double m) {
  const double idx = m + basis.j();
  const long i = std::lround(idx);
  if (std::abs(idx - static_cast<double>(i)) > 1e-9 || i < 0 || i >= basis.dim())
    throw ConfigError("m = " + std::to_string(m) + " is not a basis label for J = " + std::to_string(basis.j()));
  CVector v = CVector::Zero(basis.dim());
  v(i) = 1.0;
  return v;
}

AutocorrelationSequence autocorrelation(const UnitaryOperator& f, const CVector& phi0, std::size_t n_seq,
                                        std::string tag) {
  if (phi0.size() != f.dim()) throw ConfigError("initial state size does not match the operator");
  if (std::abs(phi0.norm() - 1.0) > 1e-12) throw ConfigError("initial state must be normalized");
  AutocorrelationSequence seq;
  seq.initial_state_tag = std::move(tag);
  seq.values.reserve(n_seq);
  CVector psi = phi0;
  CVector next(psi.size());
  for (std::size_t n = 1; n <= n_seq; ++n) {
    next.noalias() = f.matrix * psi;
    psi.swap(next);
    seq.values.push_back(phi0.dot(psi));
    seq.norm_drift = std::max(seq.norm_drift, std::abs(psi.norm() - 1.0));
  }
  return seq;
}

std::vector<double> PowerSpectrum::amplitude() const {
  std::vector<double> a(power.size());
  for (std::size_t k = 0; k < power.size(); ++k) a[k] = std::sqrt(power[k]);
  return a;
}

namespace {

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

PowerSpectrum fft_spectrum(const AutocorrelationSequence& seq, const FftOptions& opt) {
  const std::size_t n = seq.values.size();
  if (n == 0) throw ConfigError("empty autocorrelation sequence");
  PowerSpectrum out;
  std::vector<Complex> x;
  if (power_of_two(n)) {
    // a_n sits at index n mod N, so a_N wraps to index 0
    out.n_fft = n;
    x.assign(n, Complex(0.0, 0.0));
    for (std::size_t i = 1; i <= n; ++i) x[i % n] = seq.values[i - 1];
  } else {
    if (!opt.pad) throw NonPowerOfTwo("sequence length " + std::to_string(n) + " is not a power of two");
    std::size_t m = 1;
    while (m < n + 1) m <<= 1;
    out.n_fft = m;
    out.padded = true;
    x.assign(m, Complex(0.0, 0.0));
    x[0] = 1.0;
    for (std::size_t i = 1; i <= n; ++i) x[i] = seq.values[i - 1];
  }
  const std::size_t nf = out.n_fft;
  if (opt.window == Window::Hann) {
    const std::size_t used = out.padded ? n + 1 : n;
    for (std::size_t i = 0; i < used; ++i) {
      // index order follows time order 1..N (or 0..N when padded)
      const std::size_t t = out.padded ? i : (i == 0 ? n - 1 : i - 1);
      const std::size_t slot = out.padded ? i : i % n;
      const double w = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(t) / static_cast<double>(used - 1));
      x[slot] *= w;
    }
  }
  std::vector<Complex> y(nf);
  auto* in = reinterpret_cast<fftw_complex*>(x.data());
  auto* res = reinterpret_cast<fftw_complex*>(y.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(nf), in, res, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  out.phases.resize(nf);
  out.raw_power.resize(nf);
  double total = 0.0;
  for (std::size_t k = 0; k < nf; ++k) {
    out.phases[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(nf);
    out.raw_power[k] = std::norm(y[k] / static_cast<double>(nf));
    total += out.raw_power[k];
  }
  out.power.resize(nf);
  for (std::size_t k = 0; k < nf; ++k) out.power[k] = total > 0.0 ? out.raw_power[k] / total : 0.0;
  return out;
}

std::vector<std::size_t> find_peaks(const PowerSpectrum& s, double factor) {
  const std::size_t n = s.power.size();
  if (n < 3) return {};
  std::vector<double> sorted(s.power);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(n / 2), sorted.end());
  const double median = sorted[n / 2];
  // round-off floor: on exactly periodic input most bins hold ~1e-32 noise
  // and the median alone would admit its local maxima
  const double floor = 1e-12 * *std::max_element(s.power.begin(), s.power.end());
  const double threshold = std::max(factor * median, floor);
  std::vector<std::size_t> peaks;
  for (std::size_t k = 0; k < n; ++k) {
    const double p = s.power[k];
    const double left = s.power[(k + n - 1) % n];
    const double right = s.power[(k + 1) % n];
    if (p > left && p >= right && p > threshold) peaks.push_back(k);
  }
  return peaks;
}

OverlapWeights overlap_weights(const UnitaryOperator& f, const CVector& phi0) {
  if (phi0.size() != f.dim()) throw ConfigError("initial state size does not match the operator");
  const EigenphaseSet e = eigenphases(f, true);
  OverlapWeights w;
  w.phases = e.phases;
  w.weights.resize(e.size());
  const CVector c = e.vectors->adjoint() * phi0;
  for (std::size_t j = 0; j < e.size(); ++j) w.weights[j] = std::norm(c(static_cast<long>(j)));
  return w;
}

std::vector<Complex> resynthesize(const OverlapWeights& w, std::size_t n_seq) {
  std::vector<Complex> a(n_seq, Complex(0.0, 0.0));
  for (std::size_t j = 0; j < w.phases.size(); ++j) {
    for (std::size_t n = 1; n <= n_seq; ++n) {
      // reduce the angle first to keep the argument small
      const double ang = std::fmod(static_cast<double>(n) * w.phases[j], kTwoPi);
      a[n - 1] += w.weights[j] * std::polar(1.0, -ang);
    }
  }
  return a;
}

double peak_position_error(const PowerSpectrum& s, const std::vector<std::size_t>& peaks, const OverlapWeights& w,
                           double threshold) {
  if (peaks.empty()) return std::numeric_limits<double>::infinity();
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < w.phases.size(); ++j) {
    if (!(w.weights[j] > threshold)) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k : peaks) best = std::min(best, circular_distance(w.phases[j], s.phases[k]));
    num += w.weights[j] * best;
    den += w.weights[j];
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace su2floquet
