#include <doctest.h>

#include <cmath>
#include <limits>

#include "qglab/report.hpp"

using namespace qg;

TEST_SUITE("report") {

TEST_CASE("serialization is byte-deterministic and sorted by check_id") {
  auto build = [] {
    CheckReport r;
    r.add("zeta.rule.1", "zeta", 1e-12, 1e-9);
    r.add("alpha.rule.2", "alpha", 3.0e-10, 1e-9);
    r.add("alpha.rule.10", "alpha", 0.25, 1e-9);
    return r;
  };
  const std::string a = build().to_json();
  const std::string b = build().to_json();
  CHECK(a == b);
  // lexicographic: "alpha.rule.10" < "alpha.rule.2" < "zeta.rule.1"
  const auto p10 = a.find("alpha.rule.10");
  const auto p2 = a.find("alpha.rule.2\"");
  const auto pz = a.find("zeta.rule.1");
  REQUIRE(p10 != std::string::npos);
  REQUIRE(p2 != std::string::npos);
  REQUIRE(pz != std::string::npos);
  CHECK(p10 < p2);
  CHECK(p2 < pz);
}

TEST_CASE("summary counts and max residual") {
  CheckReport r;
  r.add("a.x.1", "x", 1e-12, 1e-9);
  r.add("a.x.2", "x", 0.5, 1e-9);
  CHECK(r.total() == 2);
  CHECK(r.passed() == 1);
  CHECK(!r.all_pass());
  CHECK(r.max_residual() == doctest::Approx(0.5));
  REQUIRE(r.failures().size() == 1);
  CHECK(r.failures()[0].check_id == "a.x.2");
}

TEST_CASE("non-finite residuals are clamped and fail") {
  CheckReport r;
  r.add("a.notanumber.1", "x", std::numeric_limits<Real>::quiet_NaN(), 1e-9);
  r.add("a.unbounded.1", "x", std::numeric_limits<Real>::infinity(), 1e-9);
  CHECK(r.passed() == 0);
  for (const auto& c : r.checks()) CHECK(std::isfinite(c.residual));
  const std::string j = r.to_json();
  CHECK(j.find("nan") == std::string::npos);
  CHECK(j.find("inf") == std::string::npos);
}

TEST_CASE("merge concatenates rows") {
  CheckReport a, b;
  a.add("a.x.1", "x", 0, 1e-9);
  b.add("b.y.1", "y", 0, 1e-9);
  a.merge(b);
  CHECK(a.total() == 2);
}

TEST_CASE("doubles render with 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(2.8e-15) == "2.8000000000000001e-15");
}

TEST_CASE("json strings are escaped") {
  CheckReport r;
  r.add("a.b.1", "quote \" backslash \\ done", 0, 1e-9);
  const std::string j = r.to_json();
  CHECK(j.find("quote \\\" backslash \\\\ done") != std::string::npos);
}

}  // TEST_SUITE
