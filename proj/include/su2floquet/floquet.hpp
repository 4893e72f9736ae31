#pragma once

#include "su2floquet/su2.hpp"

#include <optional>
#include <utility>
#include <variant>

namespace su2floquet {

enum class Variant { XX, XY };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);

/// Torsion prefactor exp(i 2 pi nu/mu J_z^2) of the extended family.
struct RationalPrefactor {
  long nu = 1;
  long mu = 1;
  friend bool operator==(const RationalPrefactor&, const RationalPrefactor&) = default;
};

/// General prefactor exp(-i beta J_z^2) from the delayed-kick realization.
struct AnglePrefactor {
  double beta = 0.0;
  friend bool operator==(const AnglePrefactor&, const AnglePrefactor&) = default;
};

using Prefactor = std::variant<std::monostate, RationalPrefactor, AnglePrefactor>;

struct ModelParams {
  SpinBasis basis{2};
  /// alpha / hbar_eff = alpha * J.
  double alpha_scaled = 1.0;
  /// Effective Planck constant hbar_eta = eta / J.
  double heta = 0.0;
  Variant variant = Variant::XX;
  Prefactor prefactor{};

  double j() const noexcept { return basis.j(); }
  double alpha() const noexcept { return alpha_scaled / basis.j(); }
  /// Classical torsion strength eta = hbar_eta * J.
  double eta() const noexcept { return heta * basis.j(); }

  /// Throws ConfigError on non-finite values, negative alpha, non-coprime or
  /// non-positive-mu rational prefactors, or a rational prefactor with
  /// half-integer J.
  void validate() const;

  ModelParams with_heta(double h) const {
    ModelParams p = *this;
    p.heta = h;
    return p;
  }
};

/// Builds the Floquet operators of one spin multiplet. Holds the rotation
/// eigenvectors so repeated builds over a parameter sweep share them.
/// Const methods are safe to call concurrently.
class FloquetBuilder {
 public:
  explicit FloquetBuilder(const SpinBasis& basis);

  const SpinBasis& basis() const noexcept { return rotations_.basis(); }

  /// F (or F_xy), premultiplied by the prefactor when one is set:
  ///   exp(i heta/2 Jz^2) exp(-i alpha Jx) exp(-i heta/2 Jz^2) R_last,
  /// R_last = exp(-i alpha Jx) for XX and exp(-i alpha Jy) for XY.
  UnitaryOperator floquet(const ModelParams& p) const;

  /// exp(i heta/2 Jz^2) exp(-i alpha Jx).
  UnitaryOperator kicked_top(const ModelParams& p) const;

  /// exp(i heta/2 Jz^2) exp(-i alpha Jx) exp(-i heta/2 Jz^2).
  UnitaryOperator first_three_factors(const ModelParams& p) const;

 private:
  RotationCache rotations_;
};

UnitaryOperator build_floquet(const ModelParams& p);
UnitaryOperator build_kicked_top(const ModelParams& p);

/// exp(-i alpha G) with G = (J_+/2) exp(i heta (2 J_z + 1)/2) + h.c., the
/// single-exponential form of the first three factors of F.
UnitaryOperator bch_rhs(const ModelParams& p);

/// Diagonal of the prefactor, or nullopt when there is none.
std::optional<CVector> prefactor_diagonal(const SpinBasis& basis, const Prefactor& prefactor);

struct ParityBlocks {
  UnitaryOperator even;
  UnitaryOperator odd;
  double leakage = 0.0;
};

inline constexpr double kParityLeakageTolerance = 1e-12;

/// Conjugates U into the parity basis. Throws ParityViolation when the
/// off-diagonal blocks exceed the tolerance.
ParityBlocks parity_blocks(const UnitaryOperator& u, const ParityDecomposition& d,
                           double tolerance = kParityLeakageTolerance);

/// Embeds an even/odd-block vector back into the |m> basis.
CVector embed_parity_vector(const ParityDecomposition& d, BasisTag block, const CVector& v);

/// max |[U, P]|.
double parity_commutator(const UnitaryOperator& u);

struct PhysicalModel {
  ModelParams params;
  /// beta = 4 g0 tau / xi is 2k pi (integer J) or 8k pi (half-integer J),
  /// in which case F' equals F.
  bool reduces_to_f = false;
};

/// hbar_eta = 8 g0 and prefactor beta = 4 g0 tau / xi. Throws ConfigError
/// unless tau, xi > 0.
PhysicalModel physical_to_model(double g0, double tau, double xi, double j, double alpha);

}  // namespace su2floquet
