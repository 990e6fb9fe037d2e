#include <doctest.h>

#include "qglab/models.hpp"

using namespace qg;

namespace {

HaarWeights counting(int units) {
  HaarWeights hw;
  hw.m = RealVec::Ones(units);
  hw.n = RealVec::Ones(units);
  return hw;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("function model of a group has a trivial base") {
  const FiniteGroupoid z2 = group_groupoid(cyclic_table(2));
  const QGTuple t = function_model(z2, counting(1));
  CHECK(t.A.dim() == 2);
  CHECK(t.B.dim() == 1);
  CHECK(t.C.dim() == 1);
  // E = 1 ⊗ 1
  TensorOps ops(t.A);
  CHECK((t.e_coef - ops.unit2()).norm() < 1e-12);
  // commutative multiplication
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      CHECK((t.A.mul(Vec::Unit(2, x), Vec::Unit(2, y)) -
             t.A.mul(Vec::Unit(2, y), Vec::Unit(2, x)))
                .norm() < 1e-12);
  // delta(f)(p, q) = f(pq): the coproduct of the delta function at g sums
  // the pairs multiplying to g
  const FiniteGroupoid& g = z2;
  const int gi = g.arrow_index("g1");
  Vec expected = Vec::Zero(4);
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      if (g.comp(p, q) == gi) expected(p * 2 + q) = 1;
  CHECK((Vec(t.delta_coef.col(gi)) - expected).norm() < 1e-12);
}

TEST_CASE("function model weights follow src and tgt") {
  const FiniteGroupoid g = pair_groupoid(2);
  HaarWeights hw;
  hw.m.resize(2);
  hw.m << 1, 3;
  hw.n.resize(2);
  hw.n << 2, 1;
  const QGTuple t = function_model(g, hw);
  for (int p = 0; p < g.n_arrows(); ++p) {
    CHECK(std::abs(t.phi.values(p) - Cplx(hw.m(g.src[p]), 0)) < 1e-12);
    CHECK(std::abs(t.psi.values(p) - Cplx(hw.n(g.tgt[p]), 0)) < 1e-12);
  }
}

TEST_CASE("convolution model realizes the composition table") {
  const FiniteGroupoid g = pair_groupoid(2);
  HaarWeights hw;
  hw.m.resize(2);
  hw.m << 1, 2;
  hw.n.resize(2);
  hw.n << 1, 1;
  const QGTuple t = convolution_model(g, hw);
  CHECK(t.A.dim() == 4);
  for (int p = 0; p < 4; ++p) {
    // star = inversion
    CHECK((t.A.star(Vec::Unit(4, p)) - Vec::Unit(4, g.inv[p])).norm() < 1e-12);
    for (int q = 0; q < 4; ++q) {
      const Vec prod = t.A.mul(Vec::Unit(4, p), Vec::Unit(4, q));
      if (g.composable(p, q)) {
        CHECK((prod - Vec::Unit(4, g.comp(p, q))).norm() < 1e-12);
      } else {
        CHECK(prod.norm() < 1e-12);
      }
    }
    // coproduct is the diagonal embedding
    CHECK((Vec(t.delta_coef.col(p)) - Vec(Vec::Unit(16, p * 4 + p))).norm() < 1e-12);
    // weights are supported on the units
    const bool is_unit = g.inv[p] == p && g.comp(p, p) == p;
    if (is_unit) {
      CHECK(std::abs(t.phi.values(p) - Cplx(hw.m(g.tgt[p]), 0)) < 1e-12);
      CHECK(std::abs(t.psi.values(p) - Cplx(hw.n(g.tgt[p]), 0)) < 1e-12);
    } else {
      CHECK(std::abs(t.phi.values(p)) < 1e-12);
      CHECK(std::abs(t.psi.values(p)) < 1e-12);
    }
  }
  // E = sum of lambda_u ⊗ lambda_u over units
  Vec e_expected = Vec::Zero(16);
  for (int u = 0; u < g.n_units(); ++u) {
    const int a = g.unit_arrow[u];
    e_expected(a * 4 + a) = 1;
  }
  CHECK((t.e_coef - e_expected).norm() < 1e-12);
}

TEST_CASE("inversion oracle is an involutive permutation") {
  const FiniteGroupoid g = pair_groupoid(3);
  const Mat p = inversion_oracle(g);
  CHECK(rel_residual(p * p, Mat::Identity(9, 9)) < 1e-12);
  for (int a = 0; a < 9; ++a)
    CHECK((Vec(p * Vec::Unit(9, a)) - Vec(Vec::Unit(9, g.inv[a]))).norm() < 1e-12);
}

TEST_CASE("tamper switches stay inert by default") {
  const Tamper t;
  CHECK(!t.active());
  Tamper noisy;
  noisy.e_noise = 1e-3;
  CHECK(noisy.active());
}

}  // TEST_SUITE
