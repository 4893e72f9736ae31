#include "su2floquet/classical.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace su2floquet {

double SphereState::norm() const { return std::sqrt(x * x + y * y + z * z); }

SphereState SphereState::normalized() const {
  const double n = norm();
  return {x / n, y / n, z / n};
}

SphereState SphereState::from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

void ClassicalParams::validate() const {
  if (!std::isfinite(alpha) || !std::isfinite(eta)) throw ConfigError("classical parameters must be finite");
  if (torsion_sign != 1 && torsion_sign != -1) throw ConfigError("torsion_sign must be +1 or -1");
}

namespace {

// active rotations
SphereState rot_x(const SphereState& s, double a) {
  const double c = std::cos(a), sn = std::sin(a);
  return {s.x, c * s.y - sn * s.z, sn * s.y + c * s.z};
}

SphereState rot_y(const SphereState& s, double a) {
  const double c = std::cos(a), sn = std::sin(a);
  return {c * s.x + sn * s.z, s.y, -sn * s.x + c * s.z};
}

SphereState rot_z(const SphereState& s, double a) {
  const double c = std::cos(a), sn = std::sin(a);
  return {c * s.x - sn * s.y, sn * s.x + c * s.y, s.z};
}

}  // namespace

SphereState classical_map_step(const SphereState& s, const ClassicalParams& p, Variant v) {
  const double sign = static_cast<double>(p.torsion_sign);
  SphereState t = v == Variant::XY ? rot_y(s, p.alpha) : rot_x(s, p.alpha);
  t = rot_z(t, sign * (-p.eta * t.z));
  t = rot_x(t, p.alpha);
  t = rot_z(t, sign * (p.eta * t.z));
  return t.normalized();
}

std::vector<SectionPoint> poincare_section(const std::vector<SphereState>& seeds, const ClassicalParams& p,
                                           std::size_t n_steps, Variant v) {
  p.validate();
  std::vector<SectionPoint> out;
  for (std::size_t id = 0; id < seeds.size(); ++id) {
    SphereState s = seeds[id].normalized();
    for (std::size_t step = 1; step <= n_steps; ++step) {
      s = classical_map_step(s, p, v);
      if (s.x > 0.0) out.push_back({id, step, s.y, s.z});
    }
  }
  return out;
}

std::vector<SphereState> random_seeds(std::size_t count, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> uz(-1.0, 1.0);
  std::uniform_real_distribution<double> uphi(0.0, kTwoPi);
  std::vector<SphereState> seeds;
  for (std::size_t i = 0; i < count; ++i) {
    const double z = uz(rng);
    const double phi = uphi(rng);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    seeds.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return seeds;
}

namespace {

struct CellGrid {
  int grid;
  std::size_t disk_cells = 0;

  explicit CellGrid(int g) : grid(g) {
    if (g < 1) throw ConfigError("cell grid must be positive");
    for (int i = 0; i < g; ++i)
      for (int k = 0; k < g; ++k)
        if (inside(i, k)) ++disk_cells;
  }

  double centre(int i) const { return -1.0 + (i + 0.5) * 2.0 / grid; }
  bool inside(int i, int k) const {
    const double a = centre(i), b = centre(k);
    return a * a + b * b <= 1.0;
  }
  int index(double u) const {
    const int i = static_cast<int>(std::floor((u + 1.0) * 0.5 * grid));
    return std::clamp(i, 0, grid - 1);
  }
};

}  // namespace

double occupied_cell_fraction(const std::vector<SectionPoint>& points, int grid) {
  const CellGrid g(grid);
  std::set<std::pair<int, int>> cells;
  for (const auto& pt : points) {
    const int i = g.index(pt.y), k = g.index(pt.z);
    if (g.inside(i, k)) cells.insert({i, k});
  }
  return static_cast<double>(cells.size()) / static_cast<double>(g.disk_cells);
}

double mean_seed_fraction(const std::vector<SectionPoint>& points, std::size_t seeds, int grid) {
  if (seeds == 0) return 0.0;
  std::vector<std::vector<SectionPoint>> by_seed(seeds);
  for (const auto& pt : points)
    if (pt.seed_id < seeds) by_seed[pt.seed_id].push_back(pt);
  double sum = 0.0;
  for (const auto& s : by_seed) sum += occupied_cell_fraction(s, grid);
  return sum / static_cast<double>(seeds);
}

double lyapunov_estimate(const SphereState& seed, const ClassicalParams& p, std::size_t n_steps, Variant v) {
  p.validate();
  if (n_steps < kMinLyapunovSteps) throw ConfigError("Lyapunov estimate needs at least 10^4 steps");
  constexpr double d0 = 1e-8;
  SphereState a = seed.normalized();
  // initial offset along a tangent direction
  SphereState t = std::abs(a.z) < 0.9 ? SphereState{-a.y, a.x, 0.0} : SphereState{0.0, -a.z, a.y};
  const double tn = t.norm();
  SphereState b = SphereState{a.x + d0 * t.x / tn, a.y + d0 * t.y / tn, a.z + d0 * t.z / tn}.normalized();
  double sum = 0.0;
  for (std::size_t n = 0; n < n_steps; ++n) {
    a = classical_map_step(a, p, v);
    b = classical_map_step(b, p, v);
    const double dx = b.x - a.x, dy = b.y - a.y, dz = b.z - a.z;
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    sum += std::log(d / d0);
    b = SphereState{a.x + d0 * dx / d, a.y + d0 * dy / d, a.z + d0 * dz / d}.normalized();
  }
  return sum / static_cast<double>(n_steps);
}

double correspondence_check(double j, double theta, double phi, const ClassicalParams& p, std::size_t n_periods,
                            Variant v) {
  p.validate();
  ModelParams m;
  m.basis = SpinBasis::from_j(j);
  m.alpha_scaled = p.alpha * j;
  m.heta = p.eta / j;
  m.variant = v;
  const UnitaryOperator f = build_floquet(m);
  CVector psi = coherent_state(m.basis, theta, phi);
  SphereState s = SphereState::from_angles(theta, phi);
  double worst = 0.0;
  for (std::size_t n = 0;; ++n) {
    const Eigen::Vector3d e = scaled_expectation(m.basis, psi);
    worst = std::max(worst, std::sqrt((e(0) - s.x) * (e(0) - s.x) + (e(1) - s.y) * (e(1) - s.y) +
                                      (e(2) - s.z) * (e(2) - s.z)));
    if (n == n_periods) break;
    psi = f.matrix * psi;
    s = classical_map_step(s, p, v);
  }
  return worst;
}

}  // namespace su2floquet
