#include "su2floquet/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

namespace su2floquet {

const char* to_string(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::Unresolved: return "unresolved";
  }
  return "?";
}

Parity parity_from_string(const std::string& s) {
  if (s == "even") return Parity::Even;
  if (s == "odd") return Parity::Odd;
  if (s == "unresolved") return Parity::Unresolved;
  throw ConfigError("unknown parity label '" + s + "'");
}

namespace {

struct RawEigen {
  CVector values;
  CMatrix vectors;
  std::vector<int> cluster;
};

// Stage one diagonalizes the Hermitian part (U + U^dagger)/2, whose
// eigenvalues are cos(eps). Eigenvalue clusters closer than the threshold
// (which contain the eps / -eps partners and near-degenerate levels) span
// U-invariant subspaces; U compressed onto each cluster is diagonalized by a
// small Schur decomposition in stage two.
RawEigen hermitian_two_stage(const CMatrix& u, double cluster_threshold) {
  const int n = static_cast<int>(u.rows());
  const CMatrix h = 0.5 * (u + u.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw ConvergenceFailure("Hermitian-part eigensolver failed");
  const RVector& c = solver.eigenvalues();
  const CMatrix& v = solver.eigenvectors();
  RawEigen out{CVector(n), CMatrix(n, n), std::vector<int>(n)};
  int start = 0;
  while (start < n) {
    int stop = start + 1;
    while (stop < n && c(stop) - c(stop - 1) < cluster_threshold) ++stop;
    const int k = stop - start;
    for (int i = start; i < stop; ++i) out.cluster[i] = start;
    const auto q = v.middleCols(start, k);
    if (k == 1) {
      out.vectors.col(start) = q;
      out.values(start) = (q.adjoint() * (u * q))(0, 0);
    } else {
      const CMatrix b = q.adjoint() * (u * q);
      Eigen::ComplexSchur<CMatrix> schur(b, true);
      if (schur.info() != Eigen::Success) throw ConvergenceFailure("cluster Schur iteration did not converge");
      out.vectors.middleCols(start, k) = q * schur.matrixU();
      out.values.segment(start, k) = schur.matrixT().diagonal();
    }
    start = stop;
  }
  return out;
}

// One first-order perturbation sweep on B = V^dagger U V: off-diagonal
// couplings between different clusters are rotated away and the basis is
// re-orthonormalized. Couplings inside a cluster were removed by its Schur
// step and are left alone.
void refine(const CMatrix& u, RawEigen& e, const std::vector<int>& cluster) {
  const int n = static_cast<int>(u.rows());
  const CMatrix b = e.vectors.adjoint() * (u * e.vectors);
  CMatrix w = CMatrix::Identity(n, n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      if (j == k || cluster[j] == cluster[k]) continue;
      w(j, k) = b(j, k) / (b(k, k) - b(j, j));
    }
  }
  Eigen::HouseholderQR<CMatrix> qr(w);
  const CMatrix q = qr.householderQ();
  e.vectors = e.vectors * q;
  const CMatrix uv = u * e.vectors;
  for (int k = 0; k < n; ++k) e.values(k) = e.vectors.col(k).dot(uv.col(k));
}

RawEigen full_schur(const CMatrix& u) {
  Eigen::ComplexSchur<CMatrix> schur(u, true);
  if (schur.info() != Eigen::Success) throw ConvergenceFailure("Schur iteration did not converge");
  return {schur.matrixT().diagonal(), schur.matrixU(), {}};
}

double eigen_residual(const CMatrix& u, const RawEigen& e) {
  const CMatrix uv = u * e.vectors;
  double residual = 0.0;
  for (int k = 0; k < e.values.size(); ++k) {
    const Complex unit = e.values(k) / std::abs(e.values(k));
    residual = std::max(residual, (uv.col(k) - unit * e.vectors.col(k)).norm());
  }
  return residual;
}

}  // namespace

EigenphaseSet eigenphases(const UnitaryOperator& u, bool want_vectors, double residual_tolerance) {
  const int n = u.dim();
  EigenphaseSet out;
  if (n == 0) return out;

  RawEigen raw = hermitian_two_stage(u.matrix, kClusterThreshold);
  double residual = eigen_residual(u.matrix, raw);
  for (int sweep = 0; sweep < 2 && !(residual <= 0.1 * residual_tolerance); ++sweep) {
    refine(u.matrix, raw, raw.cluster);
    residual = eigen_residual(u.matrix, raw);
  }
  if (!(residual <= residual_tolerance)) {
    // The Schur vectors of a normal matrix are its eigenvectors.
    raw = full_schur(u.matrix);
    residual = eigen_residual(u.matrix, raw);
  }
  if (!(residual <= residual_tolerance)) {
    std::ostringstream msg;
    msg << "eigen-residual " << residual << " exceeds " << residual_tolerance;
    throw ConvergenceFailure(msg.str());
  }

  std::vector<double> phases(n);
  for (int k = 0; k < n; ++k) phases[k] = wrap_phase(-std::arg(raw.values(k)));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return phases[a] < phases[b]; });
  out.phases.resize(n);
  for (int k = 0; k < n; ++k) out.phases[k] = phases[order[k]];
  Parity label = u.basis == BasisTag::Even  ? Parity::Even
                 : u.basis == BasisTag::Odd ? Parity::Odd
                                            : Parity::Unresolved;
  out.parities.assign(n, label);
  out.residual = residual;
  if (want_vectors) {
    CMatrix vec(n, n);
    for (int k = 0; k < n; ++k) vec.col(k) = raw.vectors.col(order[k]);
    out.vectors = std::move(vec);
  }
  return out;
}

EigenphaseSet SpectrumColumn::combined() const {
  std::vector<std::pair<double, Parity>> all;
  double residual = 0.0;
  for (const auto& s : sectors) {
    for (std::size_t k = 0; k < s.set.size(); ++k) all.emplace_back(s.set.phases[k], s.set.parities[k]);
    residual = std::max(residual, s.set.residual);
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return static_cast<int>(a.second) < static_cast<int>(b.second);
  });
  EigenphaseSet out;
  out.residual = residual;
  for (const auto& [phase, parity] : all) {
    out.phases.push_back(phase);
    out.parities.push_back(parity);
  }
  return out;
}

const SectorSpectrum* SpectrumColumn::sector(BasisTag tag) const {
  for (const auto& s : sectors)
    if (s.sector == tag) return &s;
  return nullptr;
}

SpectrumSolver::SpectrumSolver(const SpinBasis& basis) : builder_(basis), parity_(parity_decompose(basis)) {}

EigenphaseSet SpectrumSolver::full_spectrum(const UnitaryOperator& u, bool want_vectors) const {
  EigenphaseSet set = eigenphases(u, true);
  const SpinBasis& b = builder_.basis();
  for (std::size_t k = 0; k < set.size(); ++k) {
    const CVector v = set.vectors->col(static_cast<int>(k));
    CVector pv(v.size());
    for (int i = 0; i < v.size(); ++i) pv(b.mirror(i)) = v(i);
    if ((pv - v).norm() <= 1e-8) {
      set.parities[k] = Parity::Even;
    } else if ((pv + v).norm() <= 1e-8) {
      set.parities[k] = Parity::Odd;
    } else {
      set.parities[k] = Parity::Unresolved;
    }
  }
  if (!want_vectors) set.vectors.reset();
  return set;
}

SpectrumColumn SpectrumSolver::column(const ModelParams& p, bool want_vectors) const {
  SpectrumColumn col;
  col.heta = p.heta;
  const UnitaryOperator u = builder_.floquet(p);
  if (p.variant == Variant::XX) {
    ParityBlocks blocks = parity_blocks(u, parity_);
    col.sectors.push_back({BasisTag::Even, eigenphases(blocks.even, want_vectors)});
    if (parity_.odd_dim > 0) col.sectors.push_back({BasisTag::Odd, eigenphases(blocks.odd, want_vectors)});
  } else {
    col.sectors.push_back({BasisTag::Full, eigenphases(u, want_vectors)});
  }
  return col;
}

double fold_heta(double h) {
  double r = std::fmod(h, kFourPi);
  if (r < 0.0) r += kFourPi;
  if (r >= kFourPi) r = 0.0;
  return r;
}

std::vector<double> uniform_heta_grid(std::size_t steps, double lo, double hi) {
  std::vector<double> g(steps);
  for (std::size_t k = 0; k < steps; ++k) g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps);
  return g;
}

namespace {

std::string hash_params(const ModelParams& p, const std::vector<double>& grid) {
  // FNV-1a over the canonical textual form
  std::ostringstream os;
  os.precision(17);
  os << p.basis.twice_j() << '|' << p.alpha_scaled << '|' << to_string(p.variant) << '|' << p.prefactor.index();
  if (const auto* r = std::get_if<RationalPrefactor>(&p.prefactor)) os << ':' << r->nu << '/' << r->mu;
  if (const auto* a = std::get_if<AnglePrefactor>(&p.prefactor)) os << ':' << a->beta;
  for (double g : grid) os << '|' << g;
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream hex;
  hex << std::hex << h;
  return hex.str();
}

}  // namespace

ButterflyDataset butterfly_scan(const ModelParams& templ, const std::vector<double>& grid, bool want_vectors,
                                const Executor& exec) {
  templ.validate();
  ButterflyDataset ds;
  ds.params = templ;
  ds.grid.reserve(grid.size());
  for (double h : grid) {
    const double f = fold_heta(h);
    if (f != h) std::cerr << "warning: heta " << h << " folded to " << f << " (4pi periodicity)\n";
    ds.grid.push_back(f);
  }
  for (std::size_t k = 1; k < ds.grid.size(); ++k) {
    if (!(ds.grid[k] > ds.grid[k - 1])) throw ConfigError("heta grid must be strictly increasing after folding");
  }
  ds.parameter_hash = hash_params(templ, ds.grid);
  const SpectrumSolver solver(templ.basis);
  ds.columns.resize(ds.grid.size());
  exec.parallel_for(ds.grid.size(), [&](std::size_t k) {
    try {
      ds.columns[k] = solver.column(templ.with_heta(ds.grid[k]), want_vectors);
    } catch (const ConvergenceFailure& e) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "at heta = " << ds.grid[k] << ": " << e.what();
      throw ConvergenceFailure(msg.str());
    }
  });
  return ds;
}

double multiset_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  std::vector<double> x(a), y(b);
  for (auto& v : x) v = wrap_phase(v);
  for (auto& v : y) v = wrap_phase(v);
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t shift = 0; shift < n; ++shift) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n && worst < best; ++i) worst = std::max(worst, circular_distance(x[i], y[(i + shift) % n]));
    best = std::min(best, worst);
  }
  return best;
}

double circular_spread(const std::vector<double>& phases) {
  if (phases.size() < 2) return 0.0;
  std::vector<double> x(phases);
  for (auto& v : x) v = wrap_phase(v);
  std::sort(x.begin(), x.end());
  double max_gap = x.front() + kTwoPi - x.back();
  for (std::size_t i = 1; i < x.size(); ++i) max_gap = std::max(max_gap, x[i] - x[i - 1]);
  return kTwoPi - max_gap;
}

SymmetryReport symmetry_check(const ModelParams& p, SymmetryMode mode, double heta) {
  SymmetryReport r;
  r.mode = mode;
  r.tolerance = kSymmetryTolerance;
  const SpectrumSolver solver(p.basis);
  auto spectrum = [&](double h) {
    return eigenphases(solver.builder().floquet(p.with_heta(h)), false).phases;
  };
  std::ostringstream detail;
  detail.precision(17);
  switch (mode) {
    case SymmetryMode::Periodicity:
      r.max_deviation = multiset_distance(spectrum(heta), spectrum(heta + kFourPi));
      detail << "heta=" << heta << " vs heta+4pi";
      break;
    case SymmetryMode::Reflection:
      r.max_deviation = multiset_distance(spectrum(heta), spectrum(kFourPi - heta));
      detail << "heta=" << heta << " vs 4pi-heta";
      break;
    case SymmetryMode::Collapse:
      r.max_deviation = circular_spread(spectrum(kTwoPi));
      detail << "spread at heta=2pi, J=" << p.j();
      break;
  }
  r.holds = r.max_deviation <= r.tolerance;
  r.detail = detail.str();
  return r;
}

}  // namespace su2floquet
