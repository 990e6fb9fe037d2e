#include <doctest.h>

#include <algorithm>
#include <vector>

#include "qglab/algebra.hpp"

using namespace qg;

namespace {

Mat unit_mat(int d, int i, int j) {
  Mat m = Mat::Zero(d, d);
  m(i, j) = 1;
  return m;
}

// Full 2x2 matrix algebra with basis e11, e12, e21, e22.
FiniteStarAlgebra m2() {
  return FiniteStarAlgebra::from_basis(
      "m2", {unit_mat(2, 0, 0), unit_mat(2, 0, 1), unit_mat(2, 1, 0), unit_mat(2, 1, 1)});
}

// Trace against diag(1, 2) on the m2 basis.
Weight phi_m2() {
  Weight w;
  w.values = Vec::Zero(4);
  w.values(0) = 1;
  w.values(3) = 2;
  return w;
}

}  // namespace

TEST_SUITE("algebra") {

TEST_CASE("from_basis derives tables of the full matrix algebra") {
  const FiniteStarAlgebra a = m2();
  CHECK(a.dim() == 4);
  CHECK(a.build_residual() < 1e-12);
  // unit = e11 + e22
  CHECK((a.unit() - (Vec::Unit(4, 0) + Vec::Unit(4, 3))).norm() < 1e-12);
  // e12 * e21 = e11, e12 * e12 = 0
  CHECK((a.mul(Vec::Unit(4, 1), Vec::Unit(4, 2)) - Vec::Unit(4, 0)).norm() < 1e-12);
  CHECK(a.mul(Vec::Unit(4, 1), Vec::Unit(4, 1)).norm() < 1e-12);
  // star flips e12 to e21 and conjugates coefficients
  CHECK((a.star(Vec::Unit(4, 1)) - Vec::Unit(4, 2)).norm() < 1e-12);
  const Vec z = Cplx(0, 1) * Vec::Unit(4, 1);
  CHECK((a.star(z) - Cplx(0, -1) * Vec::Unit(4, 2)).norm() < 1e-12);
}

TEST_CASE("weights act linearly, without conjugation") {
  Weight w = phi_m2();
  const Cplx z(2, 5);
  CHECK(std::abs(w.apply(Vec(z * Vec::Unit(4, 0))) - z) < 1e-14);
}

TEST_CASE("modular data of a weighted trace on m2") {
  const FiniteStarAlgebra a = m2();
  const GNSRep g = GNSRep::build(a, phi_m2());

  // nabla acts on the e_ij line with eigenvalue h_i / h_j for h = diag(1, 2)
  std::vector<Real> ev;
  Eigen::SelfAdjointEigenSolver<Mat> es(g.nabla());
  for (int i = 0; i < 4; ++i) ev.push_back(es.eigenvalues()(i));
  std::sort(ev.begin(), ev.end());
  CHECK(ev[0] == doctest::Approx(0.5));
  CHECK(ev[1] == doctest::Approx(1.0));
  CHECK(ev[2] == doctest::Approx(1.0));
  CHECK(ev[3] == doctest::Approx(2.0));

  // sigma_t(e12) = (1/2)^{it} e12; the sign convention is pinned by
  // phi(xy) = phi(y sigma_{-i}(x))
  const Cplx expected = std::pow(Cplx(0.5, 0), Cplx(0, 1));
  const Vec moved = g.sigma(Vec::Unit(4, 1), Cplx(1, 0));
  CHECK((moved - expected * Vec::Unit(4, 1)).norm() < 1e-12);

  // analytic continuation: sigma_{-i}(e12) = (1/2) e12
  const Vec cont = g.sigma(Vec::Unit(4, 1), Cplx(0, -1));
  CHECK((cont - 0.5 * Vec::Unit(4, 1)).norm() < 1e-12);

  CheckReport report;
  check_gns(g, 1e-9, report, "gns.m2");
  check_modular(g, 1e-9, report, "modular.m2");
  check_kms(g, 1e-9, report, "kms.m2");
  CHECK(report.all_pass());
}

TEST_CASE("tomita map sends GNS vectors to their star") {
  const FiniteStarAlgebra a = m2();
  const GNSRep g = GNSRep::build(a, phi_m2());
  for (int i = 0; i < 4; ++i) {
    const Vec lhs = g.tomita().apply(g.lambda(Vec::Unit(4, i)));
    const Vec rhs = g.lambda(a.star(Vec::Unit(4, i)));
    CHECK((lhs - rhs).norm() < 1e-12);
  }
  // nabla = T* T
  const Mat t = g.tomita().m;
  CHECK(rel_residual(g.tomita().adjoint().m * t.conjugate(), g.nabla()) < 1e-12);
}

TEST_CASE("representation and op_to_coeffs invert each other") {
  const FiniteStarAlgebra a = m2();
  const GNSRep g = GNSRep::build(a, phi_m2());
  Vec c(4);
  c << Cplx(1, 2), Cplx(0, -1), Cplx(3, 0), Cplx(-2, 1);
  Real res = 0;
  const Vec back = g.op_to_coeffs(g.rep(c), &res);
  CHECK(res < 1e-12);
  CHECK((back - c).norm() < 1e-12);
  // rep is multiplicative
  const Vec d = Vec::Unit(4, 1) + Cplx(0, 1) * Vec::Unit(4, 2);
  CHECK(rel_residual(g.rep(c) * g.rep(d), g.rep(a.mul(c, d))) < 1e-12);
}

}  // TEST_SUITE
