#include "oracles.hpp"
#include "su2floquet/floquet.hpp"
#include "su2floquet/spectrum.hpp"

#include <doctest.h>

#include <random>

using namespace su2floquet;

namespace {

ModelParams params(double j, double alpha_scaled, double heta, Variant v = Variant::XX) {
  ModelParams p;
  p.basis = SpinBasis::from_j(j);
  p.alpha_scaled = alpha_scaled;
  p.heta = heta;
  p.variant = v;
  return p;
}

CMatrix identity(int n) { return CMatrix::Identity(n, n); }

}  // namespace

TEST_SUITE("floquet_builder") {

TEST_CASE("Floquet operator against the series-exponential product") {
  for (double j : {1.0, 2.5, 5.0}) {
    for (double h : {0.4, 2.1, 7.9}) {
      const auto p = params(j, 1.3, h);
      CHECK(max_abs(build_floquet(p).matrix - oracle::floquet(j, 1.3, h)) < 1e-12);
      auto q = p;
      q.variant = Variant::XY;
      CHECK(max_abs(build_floquet(q).matrix - oracle::floquet(j, 1.3, h, true)) < 1e-12);
    }
  }
}

TEST_CASE("trivial limits") {
  const auto p = params(4, 0.0, 1.7);
  CHECK(max_abs(build_floquet(p).matrix - identity(9)) < 1e-13);
  CHECK(max_abs(bch_rhs(p).matrix - identity(9)) < 1e-13);
  const UnitaryOperator kt = build_kicked_top(p);
  CHECK(max_abs(kt.matrix - torsion_phase(p.basis, 1.7, 1).matrix) < 1e-13);

  const auto r = params(4, 2.0, 0.0);
  CHECK(max_abs(build_kicked_top(r).matrix - rotation_x(r.basis, r.alpha()).matrix) < 1e-13);
  CHECK(max_abs(bch_rhs(r).matrix - rotation_x(r.basis, r.alpha()).matrix) < 1e-13);
}

TEST_CASE("collapse to the identity at heta = 2pi for integer J") {
  for (double j : {1.0, 2.0, 7.0, 20.0}) {
    CHECK(max_abs(build_floquet(params(j, 1.0, kTwoPi)).matrix - identity(static_cast<int>(2 * j) + 1)) < 1e-12);
  }
  const UnitaryOperator h = build_floquet(params(5.5, 1.0, kTwoPi));
  CHECK(max_abs(h.matrix - identity(12)) > 0.1);
}

TEST_CASE("rational prefactor nu = mu = 1 is the identity factor") {
  auto p = params(6, 1.0, 2.3);
  auto q = p;
  q.prefactor = RationalPrefactor{1, 1};
  CHECK(max_abs(build_floquet(p).matrix - build_floquet(q).matrix) < 1e-12);
  q.prefactor = RationalPrefactor{2, 4};
  CHECK_THROWS_AS(q.validate(), ConfigError);
  auto h = params(2.5, 1.0, 1.0);
  h.prefactor = RationalPrefactor{1, 3};
  CHECK_THROWS_AS(h.validate(), ConfigError);
}

TEST_CASE("rational prefactor uses exact reduction") {
  const SpinBasis b = SpinBasis::from_j(40);
  const auto d = prefactor_diagonal(b, RationalPrefactor{1, 3});
  REQUIRE(d.has_value());
  for (int i = 0; i < b.dim(); ++i) {
    const long m = static_cast<long>(std::lround(b.m(i)));
    const long r = (2 * m * m) % 6;
    CHECK(std::abs((*d)(i) - std::polar(1.0, kPi * static_cast<double>(r) / 3.0)) < 1e-14);
  }
  CHECK_FALSE(prefactor_diagonal(b, std::monostate{}).has_value());
}

TEST_CASE("kicked top eigenphases against the series exponential") {
  const auto p = params(5, 1.0, 1.0);
  const double a = p.alpha();
  const CMatrix ref = oracle::jz_squared_phase(5, 0.5) * oracle::expm(Complex(0, -a) * oracle::jx(5));
  Eigen::ComplexEigenSolver<CMatrix> es(ref);
  std::vector<double> expect;
  for (int i = 0; i < es.eigenvalues().size(); ++i) expect.push_back(wrap_phase(-std::arg(es.eigenvalues()(i))));
  const auto got = eigenphases(build_kicked_top(p), false);
  CHECK(multiset_distance(got.phases, expect) < 1e-11);
}

TEST_CASE("three-factor identity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(0.0, 3.0), uh(0.0, kFourPi);
  for (double j : {1.0, 2.0, 3.0, 4.5, 6.0}) {
    const FloquetBuilder b(SpinBasis::from_j(j));
    for (int k = 0; k < 20; ++k) {
      const auto p = params(j, ua(rng) * j, uh(rng));
      CHECK(max_abs(b.first_three_factors(p).matrix - bch_rhs(p).matrix) < 1e-11);
    }
  }
}

TEST_CASE("4pi periodicity holds entrywise for integer and half-integer J") {
  for (double j : {3.0, 3.5, 12.0, 12.5}) {
    const auto p = params(j, 1.0, 0.9);
    CHECK(max_abs(build_floquet(p).matrix - build_floquet(p.with_heta(0.9 + kFourPi)).matrix) < 1e-12);
  }
}

TEST_CASE("spectrum at -heta equals the spectrum at heta") {
  for (double j : {4.0, 7.5}) {
    const auto p = params(j, 1.0, 1.9);
    const auto a = eigenphases(build_floquet(p), false);
    const auto b = eigenphases(build_floquet(p.with_heta(-1.9)), false);
    CHECK(multiset_distance(a.phases, b.phases) < 1e-10);
  }
}

TEST_CASE("parity commutator separates the variants") {
  CHECK(parity_commutator(build_floquet(params(5, 1.0, 1.3))) <= 1e-12);
  CHECK(parity_commutator(build_floquet(params(5, 1.0, 1.3, Variant::XY))) >= 1e-3);
}

TEST_CASE("parity blocks") {
  const auto p = params(5, 1.0, 2.2);
  const ParityDecomposition d = parity_decompose(p.basis);
  const ParityBlocks blocks = parity_blocks(build_floquet(p), d);
  CHECK(blocks.leakage <= 1e-12);
  CHECK(blocks.even.dim() == 6);
  CHECK(blocks.odd.dim() == 5);
  CHECK(blocks.even.basis == BasisTag::Even);

  const auto id = parity_blocks(UnitaryOperator{identity(11), BasisTag::Full}, d);
  CHECK(max_abs(id.even.matrix - identity(6)) < 1e-15);
  CHECK(max_abs(id.odd.matrix - identity(5)) < 1e-15);

  CHECK_THROWS_AS(parity_blocks(build_floquet(params(5, 1.0, 2.2, Variant::XY)), d), ParityViolation);
}

TEST_CASE("J=2 odd block at 2pi/3 is the identity for any kick") {
  for (double as : {0.5, 1.0, 2.0, 5.0}) {
    const auto p = params(2, as, kTwoPi / 3.0);
    const auto blocks = parity_blocks(build_floquet(p), parity_decompose(p.basis));
    CHECK(max_abs(blocks.odd.matrix - identity(2)) <= 1e-12);
  }
}

TEST_CASE("physical parameters") {
  const auto a = physical_to_model(kPi / 4.0, 1.0, 1.0, 10, 0.1);
  CHECK(a.params.heta == doctest::Approx(kTwoPi));
  const auto b = physical_to_model(0.0, 1.0, 1.0, 10, 0.1);
  CHECK(b.params.heta == 0.0);
  // 4 g0 tau / xi = 2 pi with integer J reduces F' to F
  const auto c = physical_to_model(kPi / 2.0, 1.0, 1.0, 10, 0.1);
  CHECK(c.reduces_to_f);
  CHECK_THROWS_AS(physical_to_model(0.1, 0.0, 1.0, 10, 0.1), ConfigError);
}

TEST_CASE("parameter validation") {
  auto p = params(3, -1.0, 0.0);
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = params(3, 1.0, std::nan(""));
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK(variant_from_string("xy") == Variant::XY);
  CHECK_THROWS_AS(variant_from_string("zz"), ConfigError);
}

}  // TEST_SUITE
