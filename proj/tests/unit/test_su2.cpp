#include "oracles.hpp"
#include "su2floquet/su2.hpp"

#include <doctest.h>

using namespace su2floquet;

TEST_SUITE("su2_core") {

TEST_CASE("spin basis labels") {
  const SpinBasis b = SpinBasis::from_j(2.5);
  CHECK(b.dim() == 6);
  const auto m = b.m_values();
  CHECK(m.front() == -2.5);
  CHECK(m.back() == 2.5);
  for (std::size_t i = 1; i < m.size(); ++i) CHECK(m[i] - m[i - 1] == 1.0);
  CHECK_FALSE(b.integer_spin());
  CHECK(SpinBasis::from_j(3).integer_spin());
  CHECK_THROWS_AS(SpinBasis::from_j(0.0), ConfigError);
  CHECK_THROWS_AS(SpinBasis::from_j(1.25), ConfigError);
  CHECK_THROWS_AS(SpinBasis(0), ConfigError);
}

TEST_CASE("jx ladder entries") {
  const RMatrix half = jx_matrix(SpinBasis::from_j(0.5));
  CHECK(half(0, 1) == doctest::Approx(0.5));
  CHECK(half(0, 0) == 0.0);
  const RMatrix one = jx_matrix(SpinBasis::from_j(1));
  CHECK(one(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(one(1, 2) == doctest::Approx(1.0 / std::sqrt(2.0)));
  const RMatrix two = jx_matrix(SpinBasis::from_j(2));
  const double expect[] = {1.0, std::sqrt(6.0) / 2, std::sqrt(6.0) / 2, 1.0};
  for (int i = 0; i < 4; ++i) {
    CHECK(two(i, i + 1) == doctest::Approx(expect[i]).epsilon(1e-15));
    CHECK(two(i + 1, i) == doctest::Approx(expect[i]).epsilon(1e-15));
  }
}

TEST_CASE("commutation relations") {
  for (double j : {0.5, 1.0, 3.5, 6.0}) {
    const SpinBasis b = SpinBasis::from_j(j);
    const CMatrix x = jx_matrix(b).cast<Complex>();
    const CMatrix y = jy_matrix(b);
    const CMatrix z = jz_diagonal(b).cast<Complex>().asDiagonal();
    CHECK(max_abs(x * y - y * x - Complex(0, 1) * z) < 1e-13);
    const CMatrix casimir = x * x + y * y + z * z;
    CHECK(max_abs(casimir - j * (j + 1) * CMatrix::Identity(b.dim(), b.dim())) < 1e-12);
  }
}

TEST_CASE("rotation about y matches the closed-form d matrix") {
  for (double j : {0.5, 2.0, 4.5, 10.0}) {
    const SpinBasis b = SpinBasis::from_j(j);
    for (double beta : {0.3, 1.7, 2.9}) {
      const CMatrix r = rotation_y(b, beta).matrix;
      double worst = 0.0;
      for (int a = 0; a < b.dim(); ++a)
        for (int c = 0; c < b.dim(); ++c)
          worst = std::max(worst, std::abs(r(a, c) - oracle::wigner_d(j, b.m(a), b.m(c), beta)));
      CHECK(worst < 1e-12);
    }
  }
}

TEST_CASE("rotation about x matches the series exponential") {
  for (double j : {0.5, 3.0, 7.5}) {
    const SpinBasis b = SpinBasis::from_j(j);
    for (double a : {0.0, 0.4, 2.2}) {
      const CMatrix ref = oracle::expm(Complex(0, -a) * oracle::jx(j));
      CHECK(max_abs(rotation_x(b, a).matrix - ref) < 1e-12);
    }
  }
}

TEST_CASE("rotation identities") {
  const SpinBasis b = SpinBasis::from_j(4);
  const CMatrix id = CMatrix::Identity(b.dim(), b.dim());
  CHECK(max_abs(rotation_x(b, 0.0).matrix - id) < 1e-14);
  CHECK(max_abs(rotation_y(b, 0.0).matrix - id) < 1e-14);
  const CMatrix flip = rotation_y(SpinBasis::from_j(0.5), kPi).matrix;
  CHECK(std::abs(flip(0, 0)) < 1e-15);
  // ascending m: <1/2|..|-1/2> = -sin(pi/2) sits at (1, 0)
  CHECK(std::abs(flip(1, 0) - Complex(-1.0, 0.0)) < 1e-15);
  CHECK(std::abs(flip(0, 1) - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("one-parameter group and unitarity") {
  for (double j : {2.0, 5.5, 20.0}) {
    const SpinBasis b = SpinBasis::from_j(j);
    const auto r1 = rotation_x(b, 0.37), r2 = rotation_x(b, 1.21), r12 = rotation_x(b, 1.58);
    CHECK(max_abs(r1.matrix * r2.matrix - r12.matrix) < 1e-11);
    CHECK(r1.unitarity_error() < 1e-12);
    CHECK(rotation_y(b, 0.9).unitarity_error() < 1e-12);
    CHECK(torsion_phase(b, 1.3, 1).unitarity_error() < 1e-12);
  }
}

TEST_CASE("J=2 rotation elements against the explicit trigonometric forms") {
  const SpinBasis b = SpinBasis::from_j(2);
  auto idx = [](int m) { return m + 2; };
  const Complex mi(0, -1);
  for (double a : {0.2, 1.1, 2.7}) {
    const CMatrix r = rotation_x(b, a).matrix;
    const double c = std::cos(a), s = std::sin(a);
    CHECK(std::abs(r(idx(2), idx(2)) - std::pow(std::cos(a / 2), 4)) < 1e-13);
    CHECK(std::abs(r(idx(2), idx(-2)) - std::pow(std::sin(a / 2), 4)) < 1e-13);
    CHECK(std::abs(r(idx(1), idx(1)) - (1 + c) * (2 * c - 1) / 2) < 1e-13);
    CHECK(std::abs(r(idx(1), idx(-1)) - (-(1 + 2 * c) * (1 - c) / 2)) < 1e-13);
    CHECK(std::abs(r(idx(2), idx(1)) - mi * s * (1 + c) / 2.0) < 1e-13);
    CHECK(std::abs(r(idx(2), idx(-1)) - mi * s * (c - 1) / 2.0) < 1e-13);
    CHECK(std::abs(r(idx(1), idx(2)) - mi * s * (c + 1) / 2.0) < 1e-13);
    // printed in one source as sin(a) cos(a - 1) / 2; the symmetry
    // d_{m'm} = (-1)^{m-m'} d_{-m,-m'} with the <2|..|-1> element fixes it
    CHECK(std::abs(r(idx(1), idx(-2)) - mi * s * (c - 1) / 2.0) < 1e-13);
    CHECK(std::abs(r(idx(1), idx(-2)) - mi * s * std::cos(a - 1) / 2.0) > 1e-3);
  }
}

TEST_CASE("J=2 odd-parity rotation block") {
  const SpinBasis b = SpinBasis::from_j(2);
  const ParityDecomposition d = parity_decompose(b);
  REQUIRE(d.even_dim == 3);
  REQUIRE(d.odd_dim == 2);
  const double a = 0.83;
  const CMatrix t = d.transform.cast<Complex>();
  const CMatrix blk = (t.adjoint() * rotation_x(b, a).matrix * t).bottomRightCorner(2, 2);
  // odd columns ordered by ascending |m|: (|1> - |-1>)/sqrt2, then (|2> - |-2>)/sqrt2
  CHECK(std::abs(blk(1, 1) - std::cos(a)) < 1e-13);
  CHECK(std::abs(blk(0, 0) - std::cos(a)) < 1e-13);
  CHECK(std::abs(blk(1, 0) - Complex(0, -std::sin(a))) < 1e-13);
  CHECK(std::abs(blk(0, 1) - Complex(0, -std::sin(a))) < 1e-13);
}

TEST_CASE("x and y rotations are related by the i^(m'-m) phase") {
  const SpinBasis b = SpinBasis::from_j(2);
  const double a = 1.37;
  const CMatrix rx = rotation_x(b, a).matrix;
  const CMatrix ry = rotation_y(b, a).matrix;
  for (int p = 0; p < b.dim(); ++p) {
    for (int q = 0; q < b.dim(); ++q) {
      CHECK(std::abs(ry(p, q).imag()) < 1e-14);
      const Complex phase = std::pow(Complex(0, 1), b.twice_m(p) / 2 - b.twice_m(q) / 2);
      CHECK(std::abs(rx(p, q) - phase * ry(p, q)) < 1e-13);
    }
  }
}

TEST_CASE("torsion phase entries") {
  const SpinBasis b = SpinBasis::from_j(6);
  const CVector d = torsion_diagonal(b, 0.77, 1);
  CHECK(std::abs(d(6) - Complex(1.0, 0.0)) < 1e-15);  // m = 0
  const CVector collapse = torsion_diagonal(b, kTwoPi, -1);
  for (int i = 0; i < b.dim(); ++i) CHECK(std::abs(collapse(i) - std::polar(1.0, -kPi * b.m(i))) < 1e-12);

  const CMatrix u = torsion_phase(b, 1.1, 1).matrix;
  CHECK(max_abs(torsion_phase(b, 1.1 + kFourPi, 1).matrix - u) < 1e-12);
  const SpinBasis h = SpinBasis::from_j(5.5);
  // half-integer m: exp(2 pi i m^2) = i for every m, a global phase that
  // cancels between the torsion and its inverse in F
  CHECK(max_abs(torsion_phase(h, 1.1 + kFourPi, 1).matrix - Complex(0, 1) * torsion_phase(h, 1.1, 1).matrix) < 1e-12);
}

TEST_CASE("parity decomposition") {
  for (double j : {2.0, 10.0, 30.5, 0.5}) {
    CAPTURE(j);
    const SpinBasis b = SpinBasis::from_j(j);
    const ParityDecomposition d = parity_decompose(b);
    if (b.integer_spin()) {
      CHECK(d.even_dim == static_cast<int>(j) + 1);
      CHECK(d.odd_dim == static_cast<int>(j));
    } else {
      CHECK(d.even_dim == b.dim() / 2);
      CHECK(d.odd_dim == b.dim() / 2);
    }
    const RMatrix& t = d.transform;
    CHECK((t.transpose() * t - RMatrix::Identity(b.dim(), b.dim())).cwiseAbs().maxCoeff() <= 1e-14);
    const RMatrix p = t.transpose() * parity_matrix(b) * t;
    RVector expect(b.dim());
    expect.head(d.even_dim).setOnes();
    expect.tail(d.odd_dim).setConstant(-1.0);
    CHECK((p - RMatrix(expect.asDiagonal())).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("parity conjugation keeps jx and negates jz") {
  const SpinBasis b = SpinBasis::from_j(4.5);
  const RMatrix p = parity_matrix(b);
  const RMatrix jx = jx_matrix(b);
  const RMatrix jz = jz_diagonal(b).asDiagonal();
  CHECK((p * jx * p - jx).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((p * jz * p + jz).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("coherent states") {
  const SpinBasis b = SpinBasis::from_j(3);
  const CVector north = coherent_state(b, 0.0, 0.7);
  CHECK(std::abs(std::abs(north(b.dim() - 1)) - 1.0) < 1e-15);
  const CVector south = coherent_state(b, kPi, 0.0);
  CHECK(std::abs(std::abs(south(0)) - 1.0) < 1e-12);

  const SpinBasis big = SpinBasis::from_j(50);
  const double th = 1.0, ph = 0.5;
  const CVector s = coherent_state(big, th, ph);
  CHECK(std::abs(s.norm() - 1.0) < 1e-13);
  const Eigen::Vector3d e = scaled_expectation(big, s);
  CHECK(std::abs(e(0) - std::sin(th) * std::cos(ph)) < 1e-12);
  CHECK(std::abs(e(1) - std::sin(th) * std::sin(ph)) < 1e-12);
  CHECK(std::abs(e(2) - std::cos(th)) < 1e-12);
}

}  // TEST_SUITE
