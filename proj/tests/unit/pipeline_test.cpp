#include <doctest.h>

#include <stdexcept>

#include "qglab/pipeline.hpp"

using namespace qg;

namespace {

FiniteGroupoid z2() { return group_groupoid(cyclic_table(2)); }

HaarWeights ones(int units) {
  HaarWeights hw;
  hw.m = RealVec::Ones(units);
  hw.n = RealVec::Ones(units);
  return hw;
}

HaarWeights pair2_weights() {
  HaarWeights hw;
  hw.m.resize(2);
  hw.m << 1, 2;
  hw.n.resize(2);
  hw.n << 1, 1;
  return hw;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("full run on z2 is green") {
  const PipelineResult r = run_pipeline(z2(), ones(1), ModelKind::kFunction, {}, kDefaultTol);
  REQUIRE(r.built != nullptr);
  for (const auto& c : r.report.checks()) {
    INFO(c.check_id);
    CHECK(c.pass);
  }
  CHECK(r.report.total() >= 200);
  CHECK(r.report.max_residual() < 1e-9);
}

TEST_CASE("a throwing stage is reported as a buildfailure row") {
  Tamper tamper;
  tamper.phi_arrow = 0;  // z2 identity arrow
  tamper.phi_value = -1;  // makes the GNS gram indefinite
  const PipelineResult r = run_pipeline(z2(), ones(1), ModelKind::kFunction, tamper, kDefaultTol);
  CHECK(r.built == nullptr);
  bool found = false;
  for (const auto& c : r.report.checks())
    if (c.check_id == "qgroupoid.buildfailure.1") {
      found = true;
      CHECK(!c.pass);
      CHECK(c.paper_ref.find("construction aborted") != std::string::npos);
    }
  CHECK(found);
  // the groupoid rows before the failing stage are kept
  CHECK(r.report.total() >= 5);
}

TEST_CASE("both-model runs must be expanded by the caller") {
  CHECK_THROWS_AS(run_pipeline(z2(), ones(1), ModelKind::kBoth, {}, kDefaultTol),
                  std::invalid_argument);
}

TEST_CASE("derived objects match their sources") {
  const FiniteGroupoid g = pair_groupoid(2);
  const PipelineResult r =
      run_pipeline(g, pair2_weights(), ModelKind::kConvolution, {}, kDefaultTol);
  REQUIRE(r.built != nullptr);
  const BuiltObjects& b = *r.built;

  CHECK(rel_residual(derived_object(b, "S", 0), inversion_oracle(g)) < 1e-10);
  CHECK(rel_residual(derived_object(b, "R", 0), b.ab.r_map) < 1e-14);
  CHECK(rel_residual(derived_object(b, "E", 0), b.rr.w_phiphi.e_rep) < 1e-14);
  CHECK(rel_residual(derived_object(b, "K", 0), b.ko.k.m) < 1e-14);
  CHECK((derived_object(b, "tau", 0.5) - Mat::Identity(4, 4)).norm() < 1e-10);
  CHECK(derived_object(b, "W", 0).rows() == 16);
  CHECK_THROWS_AS(derived_object(b, "Z", 0), std::invalid_argument);

  const std::string header = derived_header(b, "tau", 0.5);
  CHECK(header.find("tau") != std::string::npos);
}

TEST_CASE("matrix text format is self-describing") {
  Mat m(1, 2);
  m << Cplx(1, 0), Cplx(0, -0.5);
  const std::string text = format_matrix_text("demo", m);
  CHECK(text.find("# demo") == 0);
  CHECK(text.find("# 1 x 2") != std::string::npos);
  CHECK(text.find("[1, 0]") != std::string::npos);
  CHECK(text.find("[0, -0.5]") != std::string::npos);
}

}  // TEST_SUITE
