#include "su2floquet/classical.hpp"

#include <doctest.h>

#include <cmath>

using namespace su2floquet;

namespace {

double distance(const SphereState& a, const SphereState& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

ClassicalParams cp(double alpha, double eta) {
  ClassicalParams p;
  p.alpha = alpha;
  p.eta = eta;
  return p;
}

}  // namespace

TEST_SUITE("classical_limit") {

TEST_CASE("the map stays on the unit sphere") {
  SphereState s = SphereState::from_angles(1.1, 0.4);
  const auto p = cp(0.3, 50.0);
  double worst = 0.0;
  for (int n = 0; n < 1'000'000; ++n) {
    s = classical_map_step(s, p);
    worst = std::max(worst, std::abs(s.norm() - 1.0));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("trivial limits") {
  const SphereState s = SphereState::from_angles(0.7, 2.0);
  CHECK(distance(classical_map_step(s, cp(0.0, 3.0)), s) < 1e-14);

  // no torsion: two x-rotations by alpha
  const double a = 0.35;
  const SphereState r = classical_map_step(s, cp(a, 0.0));
  const double c = std::cos(2 * a), sn = std::sin(2 * a);
  const SphereState expect{s.x, c * s.y - sn * s.z, sn * s.y + c * s.z};
  CHECK(distance(r, expect) < 1e-14);
}

TEST_CASE("the map commutes with the parity mirror") {
  const auto p = cp(0.2, 17.0);
  for (double th : {0.3, 1.2, 2.5}) {
    for (double ph : {0.1, 2.2, 4.0}) {
      const SphereState s = SphereState::from_angles(th, ph);
      const SphereState m{s.x, -s.y, -s.z};
      const SphereState a = classical_map_step(m, p);
      const SphereState b = classical_map_step(s, p);
      CHECK(distance(a, SphereState{b.x, -b.y, -b.z}) <= 1e-10);
    }
  }
}

TEST_CASE("Lyapunov estimate") {
  const SphereState s = SphereState::from_angles(1.0, 0.5);
  CHECK(std::abs(lyapunov_estimate(s, cp(0.4, 0.0), 20'000)) <= 1e-3);
  CHECK_THROWS_AS(lyapunov_estimate(s, cp(0.4, 0.0), 9'999), ConfigError);
  CHECK(lyapunov_estimate(s, cp(1.0, 100.0), 20'000) > 0.5);
}

TEST_CASE("section keeps only the x > 0 hemisphere") {
  const auto seeds = random_seeds(3, 42);
  const auto pts = poincare_section(seeds, cp(0.1, 100.0), 2000);
  REQUIRE_FALSE(pts.empty());
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i - 1].seed_id <= pts[i].seed_id);
  for (const auto& q : pts) CHECK(q.y * q.y + q.z * q.z <= 1.0 + 1e-12);
  // a pure x-rotation keeps x fixed, so a seed with x < 0 never shows up
  const auto none = poincare_section({SphereState{-0.6, 0.8, 0.0}}, cp(0.3, 0.0), 100);
  CHECK(none.empty());
}

TEST_CASE("random seeds are reproducible and normalized") {
  const auto a = random_seeds(5, 7), b = random_seeds(5, 7), c = random_seeds(5, 8);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(std::abs(a[i].norm() - 1.0) < 1e-14);
  }
  CHECK(a[0].x != c[0].x);
}

TEST_CASE("occupied cell fraction") {
  CHECK(occupied_cell_fraction({}) == 0.0);
  std::vector<SectionPoint> dense;
  for (int i = -200; i <= 200; ++i)
    for (int k = -200; k <= 200; ++k) {
      const double y = i / 200.0, z = k / 200.0;
      if (y * y + z * z <= 1.0) dense.push_back({0, 0, y, z});
    }
  CHECK(occupied_cell_fraction(dense) == doctest::Approx(1.0));
  const double single = occupied_cell_fraction({{0, 0, 0.01, 0.01}});
  CHECK(single > 0.0);
  CHECK(single < 0.001);
  CHECK(mean_seed_fraction(dense, 2) == doctest::Approx(0.5));
  CHECK_THROWS_AS(occupied_cell_fraction(dense, 0), ConfigError);
}

TEST_CASE("coherent states follow the classical map") {
  // below the Ehrenfest time the deviation shrinks like 1/J
  const auto p = cp(0.1, 1.0);
  CHECK(correspondence_check(40, 1.0, 0.3, p, 0) <= 1e-12);
  const double small = correspondence_check(200, 1.0, 0.3, p, 10);
  const double large = correspondence_check(50, 1.0, 0.3, p, 10);
  CHECK(small < large);
  CHECK(small < 0.005);

  auto wrong = p;
  wrong.torsion_sign = -kTorsionSign;
  CHECK(correspondence_check(200, 1.0, 0.3, wrong, 10) > 0.1);
}

TEST_CASE("parameter validation") {
  auto p = cp(0.1, std::nan(""));
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = cp(0.1, 1.0);
  p.torsion_sign = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

}  // TEST_SUITE
