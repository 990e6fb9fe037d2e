#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qglab/report.hpp"
#include "qglab/types.hpp"

namespace qg {

// A finite groupoid with named arrows and units. src/tgt map arrows to unit
// indices, inv maps arrows to arrows, comp(p, q) holds the index of the
// product pq when src(p) = tgt(q) (and -1 when undefined or absent).
// Convention: (p, q) is composable iff src(p) = tgt(q); the product pq has
// tgt(pq) = tgt(p) and src(pq) = src(q).
struct FiniteGroupoid {
  std::vector<std::string> arrow_names;
  std::vector<std::string> unit_names;
  std::vector<int> src, tgt;      // arrow -> unit index
  std::vector<int> inv;           // arrow -> arrow index
  std::vector<int> unit_arrow;    // unit -> its identity arrow, -1 when absent
  Eigen::MatrixXi comp;           // comp(p, q) = pq, -1 when undefined

  int n_arrows() const { return static_cast<int>(arrow_names.size()); }
  int n_units() const { return static_cast<int>(unit_names.size()); }
  bool composable(int p, int q) const { return src[p] == tgt[q]; }
  int arrow_index(const std::string& name) const;
  int unit_index(const std::string& name) const;
};

// Left and right Haar weight data: strictly positive weights per unit.
struct HaarWeights {
  RealVec m;  // left
  RealVec n;  // right
};

FiniteGroupoid pair_groupoid(int n);
// table[i][j] = index of g_i g_j. Rejects tables that are not a group.
FiniteGroupoid group_groupoid(const std::vector<std::vector<int>>& table);
FiniteGroupoid disjoint_union(const FiniteGroupoid& g1, const FiniteGroupoid& g2);

std::vector<std::vector<int>> cyclic_table(int n);
std::vector<std::vector<int>> s3_table();

// Human-readable axiom violations, each naming the witnessing arrows.
std::vector<std::string> groupoid_violations(const FiniteGroupoid& g);

// One row per axiom family (compose totality/definedness, src-tgt laws,
// associativity, unit behaviour, inverse laws); residual = violation count.
void check_groupoid(const FiniteGroupoid& g, Real tol, CheckReport& report,
                    const std::string& id_prefix);

}  // namespace qg
