#include <doctest.h>

#include "qglab/matrix_ops.hpp"

#include "test_helpers.hpp"

using namespace qg;
using qgtest::Lcg;

namespace {
Vec vkron(const Vec& x, const Vec& y) {
  Vec out(x.size() * y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out.segment(i * y.size(), y.size()) = x(i) * y;
  return out;
}
}  // namespace

TEST_SUITE("matrix_ops") {

TEST_CASE("kron uses row-major index order") {
  Lcg rng(11);
  const Mat a = rng.mat(2, 3), b = rng.mat(4, 2);
  const Mat k = kron(a, b);
  REQUIRE(k.rows() == 8);
  REQUIRE(k.cols() == 6);
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 4; ++i2)
      for (int j1 = 0; j1 < 3; ++j1)
        for (int j2 = 0; j2 < 2; ++j2)
          CHECK(std::abs(k(i1 * 4 + i2, j1 * 2 + j2) - a(i1, j1) * b(i2, j2)) < 1e-15);
}

TEST_CASE("inner product is linear in the first slot") {
  const Vec u = Vec::Unit(2, 0), v = Vec::Unit(2, 1);
  const Cplx z(2, 3);
  CHECK(std::abs(inner(Vec(z * u), u) - z) < 1e-15);
  CHECK(std::abs(inner(Vec(z * u), v)) < 1e-15);
  // conjugate-linear in the second slot
  CHECK(std::abs(inner(u, Vec(z * u)) - std::conj(z)) < 1e-15);
}

TEST_CASE("functional slices satisfy their defining pairing") {
  Lcg rng(12);
  const int d1 = 2, d2 = 3;
  const Mat t = rng.mat(d1 * d2, d1 * d2);
  const Vec xi = rng.vec(d2), zeta = rng.vec(d2);
  const Mat s = slice_second(t, xi, zeta, d1, d2);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j) {
      const Cplx lhs = inner(Vec(s * Vec::Unit(d1, j)), Vec::Unit(d1, i));
      const Cplx rhs = inner(Vec(t * vkron(Vec::Unit(d1, j), xi)),
                             vkron(Vec::Unit(d1, i), zeta));
      CHECK(std::abs(lhs - rhs) < 1e-13);
    }
  const Vec xi1 = rng.vec(d1), zeta1 = rng.vec(d1);
  const Mat f = slice_first(t, xi1, zeta1, d1, d2);
  for (int i = 0; i < d2; ++i)
    for (int j = 0; j < d2; ++j) {
      const Cplx lhs = inner(Vec(f * Vec::Unit(d2, j)), Vec::Unit(d2, i));
      const Cplx rhs = inner(Vec(t * vkron(xi1, Vec::Unit(d2, j))),
                             vkron(zeta1, Vec::Unit(d2, i)));
      CHECK(std::abs(lhs - rhs) < 1e-13);
    }
}

TEST_CASE("vector_functional matches the inner-product definition") {
  Lcg rng(13);
  const Mat t = rng.mat(3, 3);
  const Vec xi = rng.vec(3), zeta = rng.vec(3);
  CHECK(std::abs(vector_functional(t, xi, zeta) - inner(Vec(t * xi), zeta)) < 1e-14);
}

TEST_CASE("tensor_swap exchanges the factors") {
  Lcg rng(14);
  const Vec x = rng.vec(2), y = rng.vec(3);
  const Vec xy = vkron(x, y);
  const Vec yx = vkron(y, x);
  CHECK((tensor_swap(2, 3) * xy - yx).norm() < 1e-14);
}

TEST_CASE("mat_pow takes real powers of positive operators") {
  Mat h = Mat::Zero(2, 2);
  h(0, 0) = 4;
  h(1, 1) = 9;
  const Mat r = mat_pow(h, Cplx(0.5, 0));
  CHECK(std::abs(r(0, 0) - Cplx(2, 0)) < 1e-12);
  CHECK(std::abs(r(1, 1) - Cplx(3, 0)) < 1e-12);
  CHECK(std::abs(r(0, 1)) < 1e-12);
}

TEST_CASE("mat_pow with imaginary exponent is unitary") {
  // a non-diagonal positive matrix
  Mat h(2, 2);
  h << Cplx(2, 0), Cplx(0.5, 0.25), Cplx(0.5, -0.25), Cplx(1, 0);
  const Mat u = mat_pow(h, Cplx(0, 0.7));
  CHECK(rel_residual(u * u.adjoint(), Mat::Identity(2, 2)) < 1e-12);
  // group law h^{it} h^{is} = h^{i(t+s)}
  const Mat v = mat_pow(h, Cplx(0, 0.3));
  CHECK(rel_residual(u * v, mat_pow(h, Cplx(0, 1.0))) < 1e-12);
}

TEST_CASE("mat_pow rejects non-Hermitian input") {
  Mat m(2, 2);
  m << Cplx(1, 0), Cplx(1, 0), Cplx(0, 0), Cplx(1, 0);
  CHECK_THROWS_AS(mat_pow(m, Cplx(0.5, 0)), std::domain_error);
}

TEST_CASE("mat_sqrt and mat_inv_sqrt invert each other") {
  Mat h(2, 2);
  h << Cplx(3, 0), Cplx(1, 0.5), Cplx(1, -0.5), Cplx(2, 0);
  CHECK(rel_residual(mat_sqrt(h) * mat_inv_sqrt(h), Mat::Identity(2, 2)) < 1e-12);
  CHECK(rel_residual(mat_sqrt(h) * mat_sqrt(h), h) < 1e-12);
}

TEST_CASE("conjugate-linear operators compose and adjoint as transposes") {
  Lcg rng(15);
  ConjLinearOp k;
  k.m = rng.mat(3, 3);
  const Vec v = rng.vec(3), w = rng.vec(3);
  // <Kv, w> = <K*w, v> for antilinear K
  CHECK(std::abs(inner(k.apply(v), w) - inner(k.adjoint().apply(w), v)) < 1e-13);
}

TEST_CASE("polar_conj splits diag(2, 1/2) conjugation") {
  ConjLinearOp k;
  k.m = Mat::Zero(2, 2);
  k.m(0, 0) = 2;
  k.m(1, 1) = 0.5;
  const PolarConjParts p = polar_conj(k);
  Mat l_expected = Mat::Zero(2, 2);
  l_expected(0, 0) = 4;
  l_expected(1, 1) = 0.25;
  CHECK(rel_residual(p.l_part, l_expected) < 1e-12);
  CHECK(rel_residual(p.i_part.m, Mat::Identity(2, 2)) < 1e-12);
  // reconstruction K = I L^{1/2}
  CHECK(rel_residual(p.i_part.m * mat_sqrt(p.l_part).conjugate(), k.m) < 1e-12);
  // this operator is not an involution, and indeed I L I = L here, not L^{-1}
  const Mat ili = p.i_part.m * p.l_part.conjugate() * p.i_part.m.conjugate();
  CHECK(rel_residual(ili, p.l_part) < 1e-12);
  CHECK(rel_residual(ili, p.l_part.inverse()) > 0.5);
}

TEST_CASE("span solver separates members from outsiders") {
  Mat basis(3, 2);
  basis.col(0) = Vec::Unit(3, 0);
  basis.col(1) = Vec::Unit(3, 0) + Vec::Unit(3, 1);
  SpanSolver span(basis);
  CHECK(span.rank == 2);
  CHECK(span.membership_residual(Vec::Unit(3, 1)) < 1e-12);
  CHECK(span.membership_residual(Vec::Unit(3, 2)) > 0.5);
  Real res = 0;
  const Vec c = span.solve(Vec::Unit(3, 1), &res);
  CHECK(res < 1e-12);
  CHECK((basis * c - Vec::Unit(3, 1)).norm() < 1e-12);
}

TEST_CASE("solve_linear_map recovers an exact linear map") {
  Lcg rng(16);
  const Mat truth = rng.mat(3, 3);
  const Mat in = rng.mat(3, 7);
  const Mat out = truth * in;
  Real res = 0;
  const Mat fit = solve_linear_map(in, out, &res);
  CHECK(res < 1e-12);
  CHECK(rel_residual(fit, truth) < 1e-12);
}

TEST_CASE("relative residuals switch to absolute for small references") {
  Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
  a(0, 0) = 1e-3;
  CHECK(rel_residual(a, b) == doctest::Approx(1e-3));  // ||ref|| < 1, denominator is 1
  b(0, 0) = 100;
  a(0, 0) = 101;
  CHECK(rel_residual(a, b) == doctest::Approx(0.01));
}

TEST_CASE("matrix_rank counts independent columns") {
  Mat m(3, 3);
  m.col(0) = Vec::Unit(3, 0);
  m.col(1) = Vec::Unit(3, 1);
  m.col(2) = Vec::Unit(3, 0) + Vec::Unit(3, 1);
  CHECK(matrix_rank(m) == 2);
}

}  // TEST_SUITE
