#pragma once

#include "su2floquet/floquet.hpp"

#include <cstdint>
#include <vector>

namespace su2floquet {

struct SphereState {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  double norm() const;
  SphereState normalized() const;
  static SphereState from_angles(double theta, double phi);
};

/// Torsion convention: the factor exp(-i (heta/2) J_z^2) acts on the
/// classical vector as a rotation about z by torsion_sign * (-eta z). The
/// value -1 was fixed by comparing coherent-state dynamics with the map
/// (see correspondence_check).
inline constexpr int kTorsionSign = -1;

struct ClassicalParams {
  double alpha = 0.0;
  double eta = 0.0;
  int torsion_sign = kTorsionSign;

  void validate() const;
};

/// One period of the mean-field map, applied in the operator order of F:
/// x-rotation by alpha (y-rotation for XY), torsion, x-rotation by alpha,
/// inverse torsion, then renormalization.
SphereState classical_map_step(const SphereState& s, const ClassicalParams& p, Variant v = Variant::XX);

struct SectionPoint {
  std::size_t seed_id = 0;
  std::size_t step = 0;
  double y = 0.0;
  double z = 0.0;
};

/// Iterates each seed n_steps times and keeps the (y, z) of iterates with
/// x > 0, grouped by seed in seed order.
std::vector<SectionPoint> poincare_section(const std::vector<SphereState>& seeds, const ClassicalParams& p,
                                           std::size_t n_steps, Variant v = Variant::XX);

/// Seeds uniform on the sphere from a 64-bit Mersenne twister.
std::vector<SphereState> random_seeds(std::size_t count, std::uint64_t rng_seed);

/// Fraction of the cells of a grid x grid partition of [-1, 1]^2 whose centre
/// lies in the unit disk that hold at least one point.
double occupied_cell_fraction(const std::vector<SectionPoint>& points, int grid = 50);

/// Mean over seeds of the single-seed occupied-cell fraction.
double mean_seed_fraction(const std::vector<SectionPoint>& points, std::size_t seeds, int grid = 50);

inline constexpr std::size_t kMinLyapunovSteps = 10'000;

/// Largest Lyapunov exponent per map application from two nearby
/// trajectories, renormalized to the initial separation after every step.
double lyapunov_estimate(const SphereState& seed, const ClassicalParams& p, std::size_t n_steps,
                         Variant v = Variant::XX);

/// Evolves the coherent state pointing along (theta, phi) under the Floquet
/// operator with J, alpha_scaled = alpha J and heta = eta / J, next to the
/// classical orbit from the same point. Returns the largest distance between
/// <J>/J and the classical vector over periods 0..n_periods.
double correspondence_check(double j, double theta, double phi, const ClassicalParams& p, std::size_t n_periods,
                            Variant v = Variant::XX);

}  // namespace su2floquet
