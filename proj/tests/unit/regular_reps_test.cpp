#include <doctest.h>

#include <memory>
#include <optional>
#include <stdexcept>

#include "qglab/models.hpp"
#include "qglab/regular_reps.hpp"

using namespace qg;

namespace {

struct Built {
  QGTuple t;
  std::optional<QGContext> ctx;
  GammaMaps gm;
  QMaps qm;
  RegReps rr;
};

// Heap-allocated so the context's internal pointers stay valid.
std::unique_ptr<Built> build(QGTuple tuple) {
  auto out = std::make_unique<Built>();
  out->t = std::move(tuple);
  out->ctx.emplace(QGContext::build(out->t));
  out->gm = build_gamma_maps(*out->ctx);
  out->qm = build_q_maps(*out->ctx, out->gm);
  out->rr = build_regular_reps(*out->ctx, out->qm);
  return out;
}

std::unique_ptr<Built> build_group(int n) {
  HaarWeights hw;
  hw.m = RealVec::Ones(1);
  hw.n = RealVec::Ones(1);
  return build(convolution_model(group_groupoid(cyclic_table(n)), hw));
}

std::unique_ptr<Built> build_pair2() {
  HaarWeights hw;
  hw.m.resize(2);
  hw.m << 1, 2;
  hw.n.resize(2);
  hw.n << 1, 1;
  return build(convolution_model(pair_groupoid(2), hw));
}

}  // namespace

TEST_SUITE("regular_reps") {

TEST_CASE("group case acts by translation") {
  // For a group convolution algebra with counting weights the GNS maps all
  // send λ_p to the standard basis vector e_p, so the defining actions
  // V(e_p⊗e_a) = e_p⊗e_{pa} and W*(e_p⊗e_a) = e_{ap}⊗e_a become explicit
  // permutations.
  auto b = build_group(3);
  const FiniteGroupoid g = group_groupoid(cyclic_table(3));
  const int d = 3;
  for (int p = 0; p < d; ++p) {
    for (int a = 0; a < d; ++a) {
      const Vec in = Vec::Unit(d * d, p * d + a);
      const Vec v_expect = Vec::Unit(d * d, p * d + g.comp(p, a));
      CHECK((Vec(b->rr.v * in) - v_expect).norm() < 1e-12);
      const Vec wadj_expect = Vec::Unit(d * d, g.comp(a, p) * d + a);
      CHECK((Vec(b->rr.w_psiphi.w.adjoint() * in) - wadj_expect).norm() < 1e-12);
      CHECK((Vec(b->rr.w_phiphi.w.adjoint() * in) - wadj_expect).norm() < 1e-12);
    }
  }
  // both are honest unitaries here
  CHECK(rel_residual(b->rr.v * b->rr.v.adjoint(), Mat::Identity(9, 9)) < 1e-12);
  CHECK(rel_residual(b->rr.w_psiphi.w.adjoint() * b->rr.w_psiphi.w,
                     Mat::Identity(9, 9)) < 1e-12);
}

TEST_CASE("partial isometry laws against the transported projections") {
  auto b = build_pair2();
  CHECK(rel_residual(b->rr.v * b->rr.v.adjoint(), b->rr.e_rep_v) < 1e-10);
  CHECK(rel_residual(b->rr.w_psiphi.w.adjoint() * b->rr.w_psiphi.w,
                     b->rr.w_psiphi.e_rep) < 1e-10);
  CHECK(rel_residual(b->rr.w_phiphi.w.adjoint() * b->rr.w_phiphi.w,
                     b->rr.w_phiphi.e_rep) < 1e-10);
}

TEST_CASE("full check suites pass on pair2") {
  auto b = build_pair2();
  CheckReport report;
  regular_rep_checks(*b->ctx, b->rr, kDefaultTol, report);
  pentagon_checks(b->rr.w_phiphi.w, b->rr.w_phiphi.e_rep, b->rr.w_phiphi.g_l,
                  kDefaultTol, report);
  for (const auto& c : report.checks()) {
    INFO(c.check_id);
    CHECK(c.pass);
  }
  CHECK(report.total() >= 20);
}

TEST_CASE("pentagon suite rejects malformed operators") {
  CheckReport report;
  const Mat bad = Mat::Identity(3, 3);  // 3 is not a perfect square
  CHECK_THROWS_AS(pentagon_checks(bad, bad, bad, kDefaultTol, report),
                  std::invalid_argument);
  const Mat rect = Mat::Zero(4, 2);
  CHECK_THROWS_AS(pentagon_checks(rect, rect, rect, kDefaultTol, report),
                  std::invalid_argument);
}

}  // TEST_SUITE
