#include <doctest.h>

#include <string>

#include "qglab/groupoid.hpp"

using namespace qg;

namespace {

bool mentions(const std::vector<std::string>& msgs, const std::string& needle) {
  for (const auto& m : msgs)
    if (m.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_SUITE("groupoid") {

TEST_CASE("pair groupoid composes like matrix units") {
  const FiniteGroupoid g = pair_groupoid(3);
  CHECK(g.n_arrows() == 9);
  CHECK(g.n_units() == 3);
  CHECK(groupoid_violations(g).empty());
  // arrow a_i_j runs from unit j to unit i and (i,j)(j,k) = (i,k)
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int p = g.arrow_index("a" + std::to_string(i) + "_" + std::to_string(j));
      REQUIRE(p >= 0);
      CHECK(g.tgt[p] == i);
      CHECK(g.src[p] == j);
      CHECK(g.inv[p] == g.arrow_index("a" + std::to_string(j) + "_" + std::to_string(i)));
      for (int k = 0; k < 3; ++k) {
        const int q = g.arrow_index("a" + std::to_string(j) + "_" + std::to_string(k));
        CHECK(g.comp(p, q) == g.arrow_index("a" + std::to_string(i) + "_" + std::to_string(k)));
      }
    }
}

TEST_CASE("group groupoids have one unit") {
  const FiniteGroupoid s3 = group_groupoid(s3_table());
  CHECK(s3.n_arrows() == 6);
  CHECK(s3.n_units() == 1);
  CHECK(groupoid_violations(s3).empty());

  const FiniteGroupoid z4 = group_groupoid(cyclic_table(4));
  CHECK(z4.n_arrows() == 4);
  CHECK(groupoid_violations(z4).empty());
}

TEST_CASE("non-group tables are rejected") {
  // not associative: a "multiplication" that is not a group law
  std::vector<std::vector<int>> bad = {{0, 1}, {1, 1}};
  CHECK_THROWS_AS(group_groupoid(bad), std::invalid_argument);
}

TEST_CASE("disjoint union concatenates arrows and units") {
  const FiniteGroupoid u = disjoint_union(pair_groupoid(2), group_groupoid(cyclic_table(2)));
  CHECK(u.n_arrows() == 6);
  CHECK(u.n_units() == 3);
  CHECK(groupoid_violations(u).empty());
  // no cross composition
  const int left = u.arrow_index("l_a0_1");
  const int right = u.arrow_index("r_g0");
  REQUIRE(left >= 0);
  REQUIRE(right >= 0);
  CHECK(!u.composable(left, right));
}

TEST_CASE("violations name the witnesses") {
  FiniteGroupoid g = pair_groupoid(2);
  const int p = g.arrow_index("a0_1");
  const int q = g.arrow_index("a1_1");
  g.comp(p, q) = -1;
  const auto v1 = groupoid_violations(g);
  CHECK(mentions(v1, "compose not total"));
  CHECK(mentions(v1, "a0_1"));

  FiniteGroupoid h = pair_groupoid(2);
  h.inv[h.arrow_index("a0_1")] = h.arrow_index("a0_1");
  CHECK(mentions(groupoid_violations(h), "inverse"));
}

TEST_CASE("check_groupoid reports one row per axiom family") {
  CheckReport ok;
  check_groupoid(pair_groupoid(2), 1e-9, ok, "examples.validategroupoid");
  CHECK(ok.total() == 5);
  CHECK(ok.all_pass());

  FiniteGroupoid g = pair_groupoid(2);
  g.comp(g.arrow_index("a0_1"), g.arrow_index("a1_1")) = -1;
  CheckReport bad;
  check_groupoid(g, 1e-9, bad, "examples.validategroupoid");
  CHECK(!bad.all_pass());
  CHECK(bad.failures()[0].check_id == "examples.validategroupoid.1");
}

}  // TEST_SUITE
