#include "ioclqr/matops.hpp"

#include <doctest.h>

#include "ioclqr/errors.hpp"
#include "ioclqr/gen.hpp"

using namespace ioclqr;

TEST_CASE("vec stacks columns") {
  Mat m(2, 2);
  m << 1, 2, 3, 4;
  const Vec v = vec(m);
  CHECK(v(0) == 1);
  CHECK(v(1) == 3);
  CHECK(v(2) == 2);
  CHECK(v(3) == 4);

  CHECK(vec(Mat::Zero(2, 2)).isZero(0));

  const Vec vi = vec(Mat::Identity(2, 2));
  CHECK(vi(0) == 1);
  CHECK(vi(1) == 0);
  CHECK(vi(2) == 0);
  CHECK(vi(3) == 1);
}

TEST_CASE("mat inverts vec") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat m = randn(rng, 3, 5);
    CHECK((mat(vec(m), 3, 5) - m).norm() == 0.0);
  }
  CHECK_THROWS_AS(mat(Vec::Zero(5), 2, 2), std::invalid_argument);
}

TEST_CASE("duplication matrix definition") {
  CHECK(duplication_matrix(1) == Mat::Ones(1, 1));
  CHECK_THROWS_AS(duplication_matrix(0), std::invalid_argument);

  const Mat d2 = duplication_matrix(2);
  REQUIRE(d2.rows() == 4);
  REQUIRE(d2.cols() == 3);
  Vec hv(3);
  hv << 7, 3, 5;  // (s11, s21, s22)
  const Vec full = d2 * hv;
  CHECK(full(0) == 7);
  CHECK(full(1) == 3);
  CHECK(full(2) == 3);
  CHECK(full(3) == 5);
}

TEST_CASE("D3' D3 is diagonal with entries 1 or 2") {
  // Independent enumeration: column k of D3 touches entry (i,j) and (j,i),
  // so the Gram matrix is diagonal, 1 on diagonal positions and 2 otherwise.
  const Mat d3 = duplication_matrix(3);
  const Mat gram = d3.transpose() * d3;
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < 3; ++j) {
    for (Eigen::Index i = j; i < 3; ++i) {
      const double expected = (i == j) ? 1.0 : 2.0;
      CHECK(gram(k, k) == expected);
      ++k;
    }
  }
  CHECK((gram - gram.diagonal().asDiagonal().toDenseMatrix()).norm() == 0.0);
}

TEST_CASE("halfvec round-trips through the duplication matrix") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat s = symmetrize(randn(rng, 4, 4));
    const Mat d = duplication_matrix(4);
    CHECK((d * halfvec(s) - vec(s)).norm() == 0.0);
    CHECK((sym_from_halfvec(halfvec(s), 4) - s).norm() == 0.0);
  }
}

TEST_CASE("pinv on simple matrices") {
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 2.0;
  const Mat dp = pinv(d);
  CHECK(dp(0, 0) == doctest::Approx(0.5));
  CHECK(dp(1, 1) == 0.0);

  Mat ones(2, 1);
  ones << 1, 1;
  const Mat op = pinv(ones);
  REQUIRE(op.rows() == 1);
  REQUIRE(op.cols() == 2);
  CHECK(op(0, 0) == doctest::Approx(0.5));
  CHECK(op(0, 1) == doctest::Approx(0.5));

  CHECK(pinv(Mat::Zero(3, 2)).isZero(0));
}

TEST_CASE("pinv satisfies the Penrose identities") {
  Rng rng(13);
  const Mat m = randn(rng, 5, 3);
  REQUIRE(rank_of(m) == 3);
  const Mat mp = pinv(m);
  CHECK((m * mp * m - m).norm() <= 1e-10 * m.norm());
  CHECK((mp * m * mp - mp).norm() <= 1e-10 * mp.norm());
  CHECK((m * mp - (m * mp).transpose()).norm() <= 1e-10);
  CHECK((mp * m - (mp * m).transpose()).norm() <= 1e-10);
}

TEST_CASE("pinv is an involution on well-conditioned matrices") {
  Rng rng(14);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat m = randn(rng, 4, 4) + 3.0 * Mat::Identity(4, 4);
    CHECK((pinv(pinv(m)) - m).norm() <= 1e-8 * m.norm());
  }
}

TEST_CASE("kron matches the vectorization identity") {
  Rng rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat a = randn(rng, 3, 2);
    const Mat x = randn(rng, 2, 4);
    const Mat b = randn(rng, 4, 3);
    const Vec lhs = vec(Mat(a * x * b));
    const Vec rhs = kron(b.transpose(), a) * vec(x);
    CHECK((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
  }
}

TEST_CASE("null and range bases") {
  const BasisPair id = null_range_bases(Mat::Identity(3, 3));
  CHECK(id.null_basis.cols() == 0);
  CHECK(id.range_basis.cols() == 3);
  CHECK((id.range_basis.transpose() * id.range_basis - Mat::Identity(3, 3)).norm() <=
        1e-12);

  const BasisPair zero = null_range_bases(Mat::Zero(2, 2));
  CHECK(zero.null_basis.cols() == 2);
  CHECK(zero.range_basis.cols() == 0);

  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 1.0;
  const BasisPair dg = null_range_bases(d);
  REQUIRE(dg.null_basis.cols() == 1);
  REQUIRE(dg.range_basis.cols() == 1);
  CHECK(std::abs(dg.null_basis(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(dg.range_basis(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("basis pair of a symmetric matrix fills the space") {
  Rng rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    Mat low = randn(rng, 4, 2);
    const Mat s = low * low.transpose();  // symmetric, rank 2
    const BasisPair b = null_range_bases(s);
    REQUIRE(b.null_basis.cols() + b.range_basis.cols() == 4);
    Mat u(4, 4);
    u << b.null_basis, b.range_basis;
    CHECK((u.transpose() * u - Mat::Identity(4, 4)).norm() <= 1e-10);
    CHECK((s * b.null_basis).norm() <= 1e-10 * (1.0 + s.norm()));
  }
}

TEST_CASE("definiteness tests") {
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 1.0;
  CHECK(is_psd(d));
  CHECK_FALSE(is_pd(d));

  Mat offdiag(2, 2);
  offdiag << 0, 1, 1, 0;  // eigenvalues +-1
  CHECK_FALSE(is_psd(offdiag));

  CHECK(is_pd(Mat::Identity(3, 3)));
  CHECK_THROWS_AS(is_psd(Mat::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("require_symmetric rejects genuinely asymmetric input") {
  Mat skew(2, 2);
  skew << 0, 1, -1, 0;
  CHECK_THROWS_AS(require_symmetric(skew), InconsistencyError);

  Mat nearly = Mat::Identity(2, 2);
  nearly(0, 1) = 1e-12;
  CHECK((require_symmetric(nearly) - symmetrize(nearly)).norm() == 0.0);
}

TEST_CASE("rank decisions use the relative cutoff") {
  Mat m = Mat::Zero(3, 3);
  m(0, 0) = 1.0;
  m(1, 1) = 1e-4;
  m(2, 2) = 1e-12;
  CHECK(rank_of(m) == 2);
  CHECK(rank_of(m, 1e-14) == 3);
  CHECK(rank_of(Mat::Zero(2, 2)) == 0);
}
