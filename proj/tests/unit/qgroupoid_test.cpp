#include <doctest.h>

#include "qglab/models.hpp"
#include "qglab/qgroupoid.hpp"

#include "test_helpers.hpp"

using namespace qg;

namespace {

QGTuple pair2_tuple(const Tamper& tamper = {}) {
  const FiniteGroupoid g = pair_groupoid(2);
  HaarWeights hw;
  hw.m.resize(2);
  hw.m << 1, 2;
  hw.n.resize(2);
  hw.n << 1, 1;
  return convolution_model(g, hw, tamper);
}

}  // namespace

TEST_SUITE("qgroupoid") {

TEST_CASE("context exposes consistent GNS and base data") {
  const QGTuple t = pair2_tuple();
  const QGContext ctx = QGContext::build(t);
  CHECK(ctx.t == &t);
  CHECK(ctx.gns_phi.dim() == 4);
  CHECK(ctx.gns_nu.dim() == 2);
  CHECK(ctx.gns_mu.dim() == 2);
  CHECK(ctx.e_bc_residual < 1e-12);

  // bc_coeffs inverts the B⊗C expansion
  qgtest::Lcg rng(11);
  Mat x = rng.mat(t.B.dim(), t.C.dim());
  Vec v = Vec::Zero(16);
  for (int m = 0; m < t.B.dim(); ++m)
    for (int k = 0; k < t.C.dim(); ++k)
      v += x(m, k) * Vec(ctx.bc_basis.col(m * t.C.dim() + k));
  Real res = -1;
  const Mat back = ctx.bc_coeffs(v, &res);
  CHECK(res < 1e-12);
  CHECK((back - x).norm() < 1e-10);

  // a generic tensor is not in B⊗C
  Real off = 0;
  ctx.bc_coeffs(rng.vec(16), &off);
  CHECK(off > 1e-3);
}

TEST_CASE("axioms and derived suites pass on a clean tuple") {
  const QGTuple t = pair2_tuple();
  const QGContext ctx = QGContext::build(t);
  CheckReport report;
  verify_axioms(ctx, kDefaultTol, report);
  const GammaMaps gm = build_gamma_maps(ctx);
  check_gamma(ctx, gm, kDefaultTol, report);
  const QMaps qm = build_q_maps(ctx, gm);
  check_q_maps(ctx, qm, kDefaultTol, report);
  invariance_identities(ctx, qm, kDefaultTol, report);
  base_reconstruction(ctx, kDefaultTol, report);
  e_uniqueness_probe(ctx, kDefaultTol, report);
  for (const auto& c : report.checks()) {
    INFO(c.check_id);
    CHECK(c.pass);
  }
  CHECK(report.checks().size() >= 30);
  CHECK(gm.from_e_residual < 1e-9);
}

TEST_CASE("gamma maps from (E, nu) agree with the modular route") {
  const QGTuple t = pair2_tuple();
  const QGContext ctx = QGContext::build(t);
  const GammaMaps gm = build_gamma_maps(ctx);
  CHECK(rel_residual(gm.gamma_b_from_e, gm.gamma_b) < 1e-9);
  CHECK(rel_residual(gm.gamma_c_from_e, gm.gamma_c) < 1e-9);
}

TEST_CASE("a perturbed separability element is flagged") {
  Tamper tamper;
  tamper.e_noise = 1e-3;
  tamper.noise_seed = 7;
  const QGTuple t = pair2_tuple(tamper);
  const QGContext ctx = QGContext::build(t);
  CheckReport report;
  verify_axioms(ctx, kDefaultTol, report);
  CHECK(!report.all_pass());
  bool sep_hit = false;
  bool edelta_hit = false;
  for (const auto& c : report.checks()) {
    if (c.check_id == "qgroupoid.separability.1" && !c.pass && c.residual > 1e-4)
      sep_hit = true;
    if (c.check_id == "qgroupoid.EDelta.1" && !c.pass && c.residual > 1e-4)
      edelta_hit = true;
  }
  CHECK(sep_hit);
  CHECK(edelta_hit);
}

}  // TEST_SUITE
