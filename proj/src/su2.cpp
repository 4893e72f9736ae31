#include "su2floquet/su2.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace su2floquet {

SpinBasis::SpinBasis(int twice_j) : twice_j_(twice_j) {
  if (twice_j < 1) throw ConfigError("spin basis needs J >= 1/2 (got 2J = " + std::to_string(twice_j) + ")");
}

SpinBasis SpinBasis::from_j(double j) {
  const double twice = 2.0 * j;
  const double rounded = std::round(twice);
  if (!std::isfinite(j) || std::abs(twice - rounded) > 1e-9 || rounded < 1.0) {
    throw ConfigError("J must be a positive multiple of 1/2");
  }
  return SpinBasis(static_cast<int>(rounded));
}

std::vector<double> SpinBasis::m_values() const {
  std::vector<double> out(dim());
  for (int i = 0; i < dim(); ++i) out[i] = m(i);
  return out;
}

const char* to_string(BasisTag tag) {
  switch (tag) {
    case BasisTag::Full: return "full";
    case BasisTag::Even: return "even";
    case BasisTag::Odd: return "odd";
  }
  return "?";
}

double UnitaryOperator::unitarity_error() const {
  const CMatrix gram = matrix.adjoint() * matrix;
  return max_abs(gram - CMatrix::Identity(dim(), dim()));
}

namespace {

// <m+1|J_+|m> = sqrt(J(J+1) - m(m+1)), evaluated from integers to avoid
// cancellation: J(J+1) - m(m+1) = (J - m)(J + m + 1).
double ladder(const SpinBasis& b, int i) {
  const double jm = 0.5 * (b.twice_j() - b.twice_m(i));
  const double jp = 0.5 * (b.twice_j() + b.twice_m(i)) + 1.0;
  return std::sqrt(jm * jp);
}

}  // namespace

RMatrix jplus_matrix(const SpinBasis& basis) {
  const int n = basis.dim();
  RMatrix jp = RMatrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) jp(i + 1, i) = ladder(basis, i);
  return jp;
}

RMatrix jx_matrix(const SpinBasis& basis) {
  const int n = basis.dim();
  RMatrix jx = RMatrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    const double v = 0.5 * ladder(basis, i);
    jx(i + 1, i) = v;
    jx(i, i + 1) = v;
  }
  return jx;
}

CMatrix jy_matrix(const SpinBasis& basis) {
  const int n = basis.dim();
  CMatrix jy = CMatrix::Zero(n, n);
  // J_y = (J_+ - J_-) / (2i)
  for (int i = 0; i + 1 < n; ++i) {
    const double v = 0.5 * ladder(basis, i);
    jy(i + 1, i) = Complex(0.0, -v);
    jy(i, i + 1) = Complex(0.0, v);
  }
  return jy;
}

RVector jz_diagonal(const SpinBasis& basis) {
  RVector d(basis.dim());
  for (int i = 0; i < basis.dim(); ++i) d(i) = basis.m(i);
  return d;
}

CVector torsion_diagonal(const SpinBasis& basis, double heta, int sign) {
  const int n = basis.dim();
  CVector d(n);
  for (int i = 0; i < n; ++i) {
    const double tm = basis.twice_m(i);
    // (heta / 2) m^2 = heta (2m)^2 / 8
    const double phase = static_cast<double>(sign) * heta * (tm * tm) / 8.0;
    d(i) = std::polar(1.0, phase);
  }
  return d;
}

UnitaryOperator torsion_phase(const SpinBasis& basis, double heta, int sign) {
  return {torsion_diagonal(basis, heta, sign).asDiagonal().toDenseMatrix(), BasisTag::Full};
}

RotationCache::RotationCache(const SpinBasis& basis) : basis_(basis), jy_(std::make_shared<LazyJy>()) {
  const int n = basis.dim();
  RVector diag = RVector::Zero(n);
  RVector sub(std::max(n - 1, 0));
  for (int i = 0; i + 1 < n; ++i) sub(i) = 0.5 * ladder(basis, i);
  Eigen::SelfAdjointEigenSolver<RMatrix> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw ConvergenceFailure("J_x tridiagonal eigensolver failed");
  jx_vectors_ = std::make_shared<const RMatrix>(solver.eigenvectors());
}

const CMatrix& RotationCache::jy_vectors() const {
  std::lock_guard lock(jy_->mutex);
  if (!jy_->vectors) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(jy_matrix(basis_));
    if (solver.info() != Eigen::Success) throw ConvergenceFailure("J_y eigensolver failed");
    jy_->vectors = std::make_shared<const CMatrix>(solver.eigenvectors());
  }
  return *jy_->vectors;
}

// The generator spectra are exactly {-J, ..., J}; the solvers return them in
// ascending order, so the computed eigenvalues are replaced by m itself.
CMatrix RotationCache::rotation_x(double angle) const {
  const int n = basis_.dim();
  CVector phases(n);
  for (int i = 0; i < n; ++i) phases(i) = std::polar(1.0, -angle * basis_.m(i));
  // V diag(e^{-i angle m}) V^T with V real: two real products
  const RMatrix& v = *jx_vectors_;
  const RVector c = phases.real();
  const RVector s = phases.imag();
  const RMatrix re = v * c.asDiagonal() * v.transpose();
  const RMatrix im = v * s.asDiagonal() * v.transpose();
  CMatrix out(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out(i, j) = Complex(re(i, j), im(i, j));
  return out;
}

CMatrix RotationCache::rotation_y(double angle) const {
  const int n = basis_.dim();
  CVector phases(n);
  for (int i = 0; i < n; ++i) phases(i) = std::polar(1.0, -angle * basis_.m(i));
  const CMatrix& v = jy_vectors();
  return v * phases.asDiagonal() * v.adjoint();
}

UnitaryOperator rotation_x(const SpinBasis& basis, double angle) {
  return {RotationCache(basis).rotation_x(angle), BasisTag::Full};
}

UnitaryOperator rotation_y(const SpinBasis& basis, double angle) {
  return {RotationCache(basis).rotation_y(angle), BasisTag::Full};
}

ParityDecomposition parity_decompose(const SpinBasis& basis) {
  const int n = basis.dim();
  ParityDecomposition d;
  const double s = 1.0 / std::sqrt(2.0);
  // index of m = 0 (integer J) or of the smallest positive m
  const int first_nonneg = (basis.twice_j() + 1) / 2;
  std::vector<ParityDecomposition::Component> even, odd;
  for (int i = first_nonneg; i < n; ++i) {
    const int mi = basis.mirror(i);
    if (mi == i) {
      even.push_back({i, i, 1.0});
    } else {
      even.push_back({i, mi, 1.0});
      odd.push_back({i, mi, -1.0});
    }
  }
  d.even_dim = static_cast<int>(even.size());
  d.odd_dim = static_cast<int>(odd.size());
  d.components = even;
  d.components.insert(d.components.end(), odd.begin(), odd.end());
  d.transform = RMatrix::Zero(n, n);
  for (int c = 0; c < n; ++c) {
    const auto& comp = d.components[c];
    if (comp.plus == comp.minus) {
      d.transform(comp.plus, c) = 1.0;
    } else {
      d.transform(comp.plus, c) = s;
      d.transform(comp.minus, c) = comp.sign * s;
    }
  }
  return d;
}

RMatrix parity_matrix(const SpinBasis& basis) {
  const int n = basis.dim();
  RMatrix p = RMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) p(basis.mirror(i), i) = 1.0;
  return p;
}

CVector coherent_state(const SpinBasis& basis, double theta, double phi) {
  // <m| exp(-i theta J_y) |J> = sqrt(C(2J, J+m)) cos^{J+m}(theta/2) sin^{J-m}(theta/2)
  const int n = basis.dim();
  const int tj = basis.twice_j();
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  CVector psi(n);
  for (int i = 0; i < n; ++i) {
    const int up = i;            // J + m
    const int down = tj - i;     // J - m
    double amp;
    if ((up > 0 && c == 0.0) || (down > 0 && s == 0.0)) {
      amp = 0.0;
    } else {
      double log_amp = 0.5 * (std::lgamma(tj + 1.0) - std::lgamma(up + 1.0) - std::lgamma(down + 1.0));
      if (up > 0) log_amp += up * std::log(std::abs(c));
      if (down > 0) log_amp += down * std::log(std::abs(s));
      amp = std::exp(log_amp);
      if (c < 0.0 && up % 2 == 1) amp = -amp;
      if (s < 0.0 && down % 2 == 1) amp = -amp;
    }
    psi(i) = std::polar(amp, -phi * basis.m(i));
  }
  return psi / psi.norm();
}

Eigen::Vector3d scaled_expectation(const SpinBasis& basis, const CVector& state) {
  const int n = basis.dim();
  // <J_+> = sum_m sqrt(...) conj(psi_{m+1}) psi_m
  Complex jplus = 0.0;
  double jz = 0.0;
  for (int i = 0; i < n; ++i) {
    jz += basis.m(i) * std::norm(state(i));
    if (i + 1 < n) jplus += ladder(basis, i) * std::conj(state(i + 1)) * state(i);
  }
  const double j = basis.j();
  return {jplus.real() / j, jplus.imag() / j, jz / j};
}

}  // namespace su2floquet
