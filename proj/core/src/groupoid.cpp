#include "qglab/groupoid.hpp"

#include <algorithm>
#include <stdexcept>

namespace qg {

namespace {

struct GroupoidAudit {
  long compose = 0;      // totality on composable pairs, definedness elsewhere
  long srctgt = 0;       // src/tgt laws of products
  long assoc = 0;
  long units = 0;
  long inverses = 0;
  std::vector<std::string> messages;
};

GroupoidAudit audit_groupoid(const FiniteGroupoid& g) {
  GroupoidAudit a;
  const int na = g.n_arrows();
  const int nu = g.n_units();
  auto name = [&](int p) { return g.arrow_names[p]; };

  for (int p = 0; p < na; ++p)
    for (int q = 0; q < na; ++q) {
      const int pq = g.comp(p, q);
      if (g.composable(p, q)) {
        if (pq < 0) {
          ++a.compose;
          a.messages.push_back("compose not total on composable pair (" + name(p) + ", " +
                               name(q) + ")");
        } else {
          if (g.tgt[pq] != g.tgt[p] || g.src[pq] != g.src[q]) {
            ++a.srctgt;
            a.messages.push_back("product " + name(pq) + " of (" + name(p) + ", " + name(q) +
                                 ") violates src/tgt laws");
          }
        }
      } else if (pq >= 0) {
        ++a.compose;
        a.messages.push_back("compose defined on non-composable pair (" + name(p) + ", " +
                             name(q) + ")");
      }
    }

  for (int p = 0; p < na; ++p)
    for (int q = 0; q < na; ++q) {
      if (!g.composable(p, q) || g.comp(p, q) < 0) continue;
      for (int r = 0; r < na; ++r) {
        if (!g.composable(q, r) || g.comp(q, r) < 0) continue;
        const int left = g.comp(g.comp(p, q), r);
        const int right = g.comp(p, g.comp(q, r));
        if (left != right) {
          ++a.assoc;
          a.messages.push_back("associativity fails on (" + name(p) + ", " + name(q) + ", " +
                               name(r) + ")");
        }
      }
    }

  for (int u = 0; u < nu; ++u) {
    const int e = u < static_cast<int>(g.unit_arrow.size()) ? g.unit_arrow[u] : -1;
    if (e < 0 || g.src[e] != u || g.tgt[e] != u) {
      ++a.units;
      a.messages.push_back("unit " + g.unit_names[u] + " has no identity arrow");
      continue;
    }
    for (int p = 0; p < na; ++p) {
      if (g.src[p] == u && g.comp(p, e) != p) {
        ++a.units;
        a.messages.push_back("unit arrow " + name(e) + " is not a right identity for " + name(p));
      }
      if (g.tgt[p] == u && g.comp(e, p) != p) {
        ++a.units;
        a.messages.push_back("unit arrow " + name(e) + " is not a left identity for " + name(p));
      }
    }
  }

  for (int p = 0; p < na; ++p) {
    const int q = g.inv[p];
    if (q < 0 || q >= na) {
      ++a.inverses;
      a.messages.push_back("inverse of " + name(p) + " is out of range");
      continue;
    }
    if (g.inv[q] != p) {
      ++a.inverses;
      a.messages.push_back("inverse is not involutive on " + name(p));
    }
    if (g.src[q] != g.tgt[p] || g.tgt[q] != g.src[p]) {
      ++a.inverses;
      a.messages.push_back("inverse of " + name(p) + " does not swap src and tgt");
    } else {
      const int tu = g.tgt[p], su = g.src[p];
      const int te = tu < static_cast<int>(g.unit_arrow.size()) ? g.unit_arrow[tu] : -1;
      const int se = su < static_cast<int>(g.unit_arrow.size()) ? g.unit_arrow[su] : -1;
      if (g.comp(p, q) != te) {
        ++a.inverses;
        a.messages.push_back(name(p) + " * inv(" + name(p) + ") is not the tgt unit");
      }
      if (g.comp(q, p) != se) {
        ++a.inverses;
        a.messages.push_back("inv(" + name(p) + ") * " + name(p) + " is not the src unit");
      }
    }
  }

  return a;
}

}  // namespace

int FiniteGroupoid::arrow_index(const std::string& name) const {
  auto it = std::find(arrow_names.begin(), arrow_names.end(), name);
  return it == arrow_names.end() ? -1 : static_cast<int>(it - arrow_names.begin());
}

int FiniteGroupoid::unit_index(const std::string& name) const {
  auto it = std::find(unit_names.begin(), unit_names.end(), name);
  return it == unit_names.end() ? -1 : static_cast<int>(it - unit_names.begin());
}

FiniteGroupoid pair_groupoid(int n) {
  if (n < 1) throw std::invalid_argument("pair_groupoid: n must be >= 1");
  FiniteGroupoid g;
  for (int u = 0; u < n; ++u) g.unit_names.push_back("u" + std::to_string(u));
  // Arrow a{i}_{j} points j -> i, so tgt = i and src = j.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      g.arrow_names.push_back("a" + std::to_string(i) + "_" + std::to_string(j));
      g.tgt.push_back(i);
      g.src.push_back(j);
      g.inv.push_back(j * n + i);
    }
  g.unit_arrow.resize(n);
  for (int u = 0; u < n; ++u) g.unit_arrow[u] = u * n + u;
  g.comp = Eigen::MatrixXi::Constant(n * n, n * n, -1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) g.comp(i * n + j, j * n + k) = i * n + k;
  return g;
}

FiniteGroupoid group_groupoid(const std::vector<std::vector<int>>& table) {
  const int k = static_cast<int>(table.size());
  if (k < 1) throw std::invalid_argument("group_groupoid: empty table");
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != k)
      throw std::invalid_argument("group_groupoid: table is not square");
    for (int v : row)
      if (v < 0 || v >= k) throw std::invalid_argument("group_groupoid: entry out of range");
  }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < k; ++l)
        if (table[table[i][j]][l] != table[i][table[j][l]])
          throw std::invalid_argument("group_groupoid: table is not associative");
  int e = -1;
  for (int i = 0; i < k; ++i) {
    bool ident = true;
    for (int j = 0; j < k; ++j) ident = ident && table[i][j] == j && table[j][i] == j;
    if (ident) {
      e = i;
      break;
    }
  }
  if (e < 0) throw std::invalid_argument("group_groupoid: no identity element");
  std::vector<int> invs(k, -1);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (table[i][j] == e && table[j][i] == e) invs[i] = j;
  for (int i = 0; i < k; ++i)
    if (invs[i] < 0) throw std::invalid_argument("group_groupoid: element without inverse");

  FiniteGroupoid g;
  g.unit_names = {"u0"};
  for (int i = 0; i < k; ++i) {
    g.arrow_names.push_back("g" + std::to_string(i));
    g.src.push_back(0);
    g.tgt.push_back(0);
    g.inv.push_back(invs[i]);
  }
  g.unit_arrow = {e};
  g.comp = Eigen::MatrixXi::Constant(k, k, -1);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) g.comp(i, j) = table[i][j];
  return g;
}

FiniteGroupoid disjoint_union(const FiniteGroupoid& g1, const FiniteGroupoid& g2) {
  FiniteGroupoid g;
  const int na1 = g1.n_arrows(), nu1 = g1.n_units();
  for (const auto& s : g1.unit_names) g.unit_names.push_back("l_" + s);
  for (const auto& s : g2.unit_names) g.unit_names.push_back("r_" + s);
  for (const auto& s : g1.arrow_names) g.arrow_names.push_back("l_" + s);
  for (const auto& s : g2.arrow_names) g.arrow_names.push_back("r_" + s);
  for (int p = 0; p < na1; ++p) {
    g.src.push_back(g1.src[p]);
    g.tgt.push_back(g1.tgt[p]);
    g.inv.push_back(g1.inv[p]);
  }
  for (int p = 0; p < g2.n_arrows(); ++p) {
    g.src.push_back(g2.src[p] + nu1);
    g.tgt.push_back(g2.tgt[p] + nu1);
    g.inv.push_back(g2.inv[p] + na1);
  }
  for (int u = 0; u < nu1; ++u) g.unit_arrow.push_back(g1.unit_arrow[u]);
  for (int u = 0; u < g2.n_units(); ++u) g.unit_arrow.push_back(g2.unit_arrow[u] + na1);
  const int na = g.n_arrows();
  g.comp = Eigen::MatrixXi::Constant(na, na, -1);
  g.comp.topLeftCorner(na1, na1) = g1.comp;
  g.comp.bottomRightCorner(na - na1, na - na1) =
      (g2.comp.array() >= 0).select(g2.comp.array() + na1, g2.comp);
  return g;
}

std::vector<std::vector<int>> cyclic_table(int n) {
  if (n < 1) throw std::invalid_argument("cyclic_table: n must be >= 1");
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t[i][j] = (i + j) % n;
  return t;
}

std::vector<std::vector<int>> s3_table() {
  // Permutations of {0,1,2} listed as images (p[0], p[1], p[2]).
  const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
  auto find = [&](const int img[3]) {
    for (int k = 0; k < 6; ++k)
      if (perms[k][0] == img[0] && perms[k][1] == img[1] && perms[k][2] == img[2]) return k;
    throw std::logic_error("s3_table: composition left the table");
  };
  std::vector<std::vector<int>> t(6, std::vector<int>(6));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      int img[3];
      for (int x = 0; x < 3; ++x) img[x] = perms[i][perms[j][x]];
      t[i][j] = find(img);
    }
  return t;
}

std::vector<std::string> groupoid_violations(const FiniteGroupoid& g) {
  return audit_groupoid(g).messages;
}

void check_groupoid(const FiniteGroupoid& g, Real tol, CheckReport& report,
                    const std::string& id_prefix) {
  const GroupoidAudit a = audit_groupoid(g);
  report.add(id_prefix + ".1", "artifact-plumbing", static_cast<Real>(a.compose), tol);
  report.add(id_prefix + ".2", "artifact-plumbing", static_cast<Real>(a.srctgt), tol);
  report.add(id_prefix + ".3", "artifact-plumbing", static_cast<Real>(a.assoc), tol);
  report.add(id_prefix + ".4", "artifact-plumbing", static_cast<Real>(a.units), tol);
  report.add(id_prefix + ".5", "artifact-plumbing", static_cast<Real>(a.inverses), tol);
}

}  // namespace qg
