#include "su2floquet/floquet.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>

namespace su2floquet {

const char* to_string(Variant v) { return v == Variant::XX ? "xx" : "xy"; }

Variant variant_from_string(const std::string& s) {
  if (s == "xx" || s == "XX") return Variant::XX;
  if (s == "xy" || s == "XY") return Variant::XY;
  throw ConfigError("unknown variant '" + s + "' (expected xx or xy)");
}

void ModelParams::validate() const {
  if (!std::isfinite(alpha_scaled) || alpha_scaled < 0.0) throw ConfigError("alpha_scaled must be finite and >= 0");
  if (!std::isfinite(heta)) throw ConfigError("heta must be finite");
  if (const auto* r = std::get_if<RationalPrefactor>(&prefactor)) {
    if (r->mu < 1) throw ConfigError("rational prefactor needs mu >= 1");
    if (std::gcd(r->nu, r->mu) != 1) throw ConfigError("rational prefactor needs coprime nu, mu");
    if (!basis.integer_spin()) throw ConfigError("rational prefactor is defined for integer J only");
  }
  if (const auto* a = std::get_if<AnglePrefactor>(&prefactor)) {
    if (!std::isfinite(a->beta)) throw ConfigError("prefactor angle must be finite");
  }
}

std::optional<CVector> prefactor_diagonal(const SpinBasis& basis, const Prefactor& prefactor) {
  const int n = basis.dim();
  if (const auto* r = std::get_if<RationalPrefactor>(&prefactor)) {
    // exp(i 2 pi m^2 nu / mu) = exp(i pi r / mu), r = 2 m^2 nu mod 2 mu, exact in integers
    CVector d(n);
    const __int128 modulus = 2 * static_cast<__int128>(r->mu);
    for (int i = 0; i < n; ++i) {
      const __int128 m = basis.twice_m(i) / 2;
      __int128 k = (2 * m * m % modulus) * (static_cast<__int128>(r->nu) % modulus) % modulus;
      if (k < 0) k += modulus;
      d(i) = std::polar(1.0, kPi * static_cast<double>(k) / static_cast<double>(r->mu));
    }
    return d;
  }
  if (const auto* a = std::get_if<AnglePrefactor>(&prefactor)) {
    CVector d(n);
    for (int i = 0; i < n; ++i) {
      const double tm = basis.twice_m(i);
      d(i) = std::polar(1.0, -a->beta * tm * tm / 4.0);
    }
    return d;
  }
  return std::nullopt;
}

FloquetBuilder::FloquetBuilder(const SpinBasis& basis) : rotations_(basis) {}

UnitaryOperator FloquetBuilder::first_three_factors(const ModelParams& p) const {
  const SpinBasis& b = basis();
  const CVector plus = torsion_diagonal(b, p.heta, +1);
  const CVector minus = torsion_diagonal(b, p.heta, -1);
  CMatrix m = rotations_.rotation_x(p.alpha());
  m = plus.asDiagonal() * m * minus.asDiagonal();
  return {std::move(m), BasisTag::Full};
}

UnitaryOperator FloquetBuilder::floquet(const ModelParams& p) const {
  p.validate();
  if (!(p.basis == basis())) throw ConfigError("model basis does not match builder basis");
  const SpinBasis& b = basis();
  const double alpha = p.alpha();
  // Factors are applied right to left: R_last first.
  CMatrix m = p.variant == Variant::XX ? rotations_.rotation_x(alpha) : rotations_.rotation_y(alpha);
  m = torsion_diagonal(b, p.heta, -1).asDiagonal() * m;
  m = rotations_.rotation_x(alpha) * m;
  m = torsion_diagonal(b, p.heta, +1).asDiagonal() * m;
  if (auto pre = prefactor_diagonal(b, p.prefactor)) m = pre->asDiagonal() * m;
  return {std::move(m), BasisTag::Full};
}

UnitaryOperator FloquetBuilder::kicked_top(const ModelParams& p) const {
  p.validate();
  CMatrix m = rotations_.rotation_x(p.alpha());
  m = torsion_diagonal(basis(), p.heta, +1).asDiagonal() * m;
  return {std::move(m), BasisTag::Full};
}

UnitaryOperator build_floquet(const ModelParams& p) { return FloquetBuilder(p.basis).floquet(p); }

UnitaryOperator build_kicked_top(const ModelParams& p) { return FloquetBuilder(p.basis).kicked_top(p); }

UnitaryOperator bch_rhs(const ModelParams& p) {
  p.validate();
  const SpinBasis& b = p.basis;
  const int n = b.dim();
  // J_+ D with D|m> = exp(i heta (2m + 1) / 2)|m>, then G = (J_+ D + h.c.) / 2
  const RMatrix jp = jplus_matrix(b);
  CMatrix g = CMatrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    const double phase = 0.5 * p.heta * (b.twice_m(i) + 1);
    const Complex v = 0.5 * jp(i + 1, i) * std::polar(1.0, phase);
    g(i + 1, i) = v;
    g(i, i + 1) = std::conj(v);
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(g);
  if (solver.info() != Eigen::Success) throw ConvergenceFailure("generator eigensolver failed");
  CVector phases(n);
  for (int i = 0; i < n; ++i) phases(i) = std::polar(1.0, -p.alpha() * solver.eigenvalues()(i));
  const CMatrix& v = solver.eigenvectors();
  return {v * phases.asDiagonal() * v.adjoint(), BasisTag::Full};
}

namespace {

double component_coef(const ParityDecomposition::Component& c, int which) {
  if (c.plus == c.minus) return 1.0;
  return which == 0 ? 1.0 / std::sqrt(2.0) : c.sign / std::sqrt(2.0);
}

// T^T U T using the two-entry column structure of T.
CMatrix conjugate_to_parity(const CMatrix& u, const ParityDecomposition& d) {
  const int n = static_cast<int>(u.rows());
  CMatrix w(n, n);
  for (int a = 0; a < n; ++a) {
    const auto& ca = d.components[a];
    const int ra[2] = {ca.plus, ca.minus};
    const int na = ca.plus == ca.minus ? 1 : 2;
    for (int c = 0; c < n; ++c) {
      const auto& cc = d.components[c];
      const int rc[2] = {cc.plus, cc.minus};
      const int nc = cc.plus == cc.minus ? 1 : 2;
      Complex s = 0.0;
      for (int x = 0; x < na; ++x)
        for (int y = 0; y < nc; ++y)
          s += component_coef(ca, x) * component_coef(cc, y) * u(ra[x], rc[y]);
      w(a, c) = s;
    }
  }
  return w;
}

}  // namespace

ParityBlocks parity_blocks(const UnitaryOperator& u, const ParityDecomposition& d, double tolerance) {
  if (u.basis != BasisTag::Full) throw ConfigError("parity_blocks expects a full-basis operator");
  if (u.dim() != d.even_dim + d.odd_dim) throw ConfigError("operator and parity decomposition dimensions differ");
  const CMatrix w = conjugate_to_parity(u.matrix, d);
  const int e = d.even_dim;
  const int o = d.odd_dim;
  double leak = 0.0;
  if (e > 0 && o > 0) {
    leak = std::max(max_abs(w.topRightCorner(e, o)), max_abs(w.bottomLeftCorner(o, e)));
  }
  if (leak > tolerance) {
    throw ParityViolation("operator mixes parity sectors (leakage " + std::to_string(leak) + ")");
  }
  return {UnitaryOperator{w.topLeftCorner(e, e), BasisTag::Even},
          UnitaryOperator{w.bottomRightCorner(o, o), BasisTag::Odd}, leak};
}

CVector embed_parity_vector(const ParityDecomposition& d, BasisTag block, const CVector& v) {
  const int n = d.even_dim + d.odd_dim;
  const int offset = block == BasisTag::Odd ? d.even_dim : 0;
  CVector out = CVector::Zero(n);
  for (int k = 0; k < v.size(); ++k) {
    const auto& c = d.components[offset + k];
    if (c.plus == c.minus) {
      out(c.plus) += v(k);
    } else {
      out(c.plus) += component_coef(c, 0) * v(k);
      out(c.minus) += component_coef(c, 1) * v(k);
    }
  }
  return out;
}

double parity_commutator(const UnitaryOperator& u) {
  const int n = u.dim();
  double worst = 0.0;
  // (UP)_{ij} = U_{i, n-1-j}, (PU)_{ij} = U_{n-1-i, j}
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      worst = std::max(worst, std::abs(u.matrix(i, n - 1 - j) - u.matrix(n - 1 - i, j)));
  return worst;
}

PhysicalModel physical_to_model(double g0, double tau, double xi, double j, double alpha) {
  if (!(tau > 0.0) || !(xi > 0.0)) throw ConfigError("tau and xi must be positive");
  PhysicalModel out;
  out.params.basis = SpinBasis::from_j(j);
  out.params.alpha_scaled = alpha * j;
  out.params.heta = 8.0 * g0;
  const double beta = 4.0 * g0 * tau / xi;
  out.params.prefactor = AnglePrefactor{beta};
  const double period = out.params.basis.integer_spin() ? kTwoPi : 4.0 * kTwoPi;
  const double k = beta / period;
  out.reduces_to_f = std::abs(k - std::round(k)) <= 1e-12 * std::max(1.0, std::abs(k));
  out.params.validate();
  return out;
}

}  // namespace su2floquet
