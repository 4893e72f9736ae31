#pragma once

#include "su2floquet/common.hpp"

#include <memory>
#include <mutex>
#include <vector>

namespace su2floquet {

/// Angular-momentum multiplet |J, m>, m = -J, ..., J in ascending order.
/// J is stored as the integer 2J so half-integer spins are exact.
class SpinBasis {
 public:
  /// Throws ConfigError unless twice_j >= 1.
  explicit SpinBasis(int twice_j);

  /// Throws ConfigError unless 2J is a positive integer.
  static SpinBasis from_j(double j);

  int twice_j() const noexcept { return twice_j_; }
  double j() const noexcept { return 0.5 * twice_j_; }
  int dim() const noexcept { return twice_j_ + 1; }
  bool integer_spin() const noexcept { return twice_j_ % 2 == 0; }

  /// m of basis index i.
  double m(int i) const noexcept { return 0.5 * (2 * i - twice_j_); }
  /// 2m of basis index i (always an integer).
  int twice_m(int i) const noexcept { return 2 * i - twice_j_; }
  /// Basis index of -m for basis index i.
  int mirror(int i) const noexcept { return twice_j_ - i; }

  std::vector<double> m_values() const;

  friend bool operator==(const SpinBasis&, const SpinBasis&) = default;

 private:
  int twice_j_;
};

enum class BasisTag { Full, Even, Odd };

const char* to_string(BasisTag tag);

struct UnitaryOperator {
  CMatrix matrix;
  BasisTag basis = BasisTag::Full;

  int dim() const noexcept { return static_cast<int>(matrix.rows()); }
  /// max |U^dagger U - I|.
  double unitarity_error() const;
};

RMatrix jx_matrix(const SpinBasis& basis);
/// J_y in the |m> basis (purely imaginary, Hermitian).
CMatrix jy_matrix(const SpinBasis& basis);
RVector jz_diagonal(const SpinBasis& basis);
/// J_+ (real, nonzero only on the subdiagonal in ascending-m ordering).
RMatrix jplus_matrix(const SpinBasis& basis);

UnitaryOperator rotation_x(const SpinBasis& basis, double angle);
UnitaryOperator rotation_y(const SpinBasis& basis, double angle);

/// diag(exp(sign * i * (heta / 2) * m^2)), i.e. exp(sign * i * eta J_z^2 / (2J))
/// with eta / (2J) = heta / 2.
UnitaryOperator torsion_phase(const SpinBasis& basis, double heta, int sign);
/// Diagonal entries of torsion_phase.
CVector torsion_diagonal(const SpinBasis& basis, double heta, int sign);

/// Spectral data for the rotation generators of one basis. Rotations about x
/// and y reuse the eigenvectors; the eigenvalues are the exact m values.
class RotationCache {
 public:
  explicit RotationCache(const SpinBasis& basis);

  const SpinBasis& basis() const noexcept { return basis_; }
  CMatrix rotation_x(double angle) const;
  CMatrix rotation_y(double angle) const;

 private:
  const CMatrix& jy_vectors() const;

  struct LazyJy {
    std::mutex mutex;
    std::shared_ptr<const CMatrix> vectors;
  };

  SpinBasis basis_;
  std::shared_ptr<const RMatrix> jx_vectors_;
  std::shared_ptr<LazyJy> jy_;
};

/// Basis change to definite parity under P|m> = |-m>.
struct ParityDecomposition {
  int even_dim = 0;
  int odd_dim = 0;
  /// Columns are the parity basis vectors expressed in |m>: even states
  /// first, then odd states, each ordered by ascending |m|.
  RMatrix transform;

  /// For each parity-basis column: (index of |m>, index of |-m>, sign of the
  /// |-m> component). For the m = 0 column both indices coincide.
  struct Component {
    int plus;
    int minus;
    double sign;
  };
  std::vector<Component> components;
};

ParityDecomposition parity_decompose(const SpinBasis& basis);
RMatrix parity_matrix(const SpinBasis& basis);

/// exp(-i phi J_z) exp(-i theta J_y) |m = J>.
CVector coherent_state(const SpinBasis& basis, double theta, double phi);

/// (<J_x>, <J_y>, <J_z>) / J for a normalized state.
Eigen::Vector3d scaled_expectation(const SpinBasis& basis, const CVector& state);

}  // namespace su2floquet
