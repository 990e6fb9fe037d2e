#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qglab/algebra.hpp"
#include "qglab/matrix_ops.hpp"
#include "qglab/report.hpp"

namespace qg {

// The quantum groupoid tuple in coefficient form. A carries the ambient
// arithmetic; B and C are base algebras with their own tables plus embeddings
// into A's coefficient space (column j of emb_b = A-coefficients of B's
// basis element j). delta_coef maps A-coefficients to A⊗A-coefficients in
// the row-major kron basis (index i*d+j); e_coef is the canonical idempotent
// in the same basis. rbc is the base anti-isomorphism B -> C on coefficients,
// nu lives on B, mu = nu∘rbc⁻¹ on C, phi and psi on A.
struct QGTuple {
  FiniteStarAlgebra A, B, C;
  Mat emb_b, emb_c;
  Mat rbc;
  Mat delta_coef;
  Vec e_coef;
  Weight nu, mu;
  Weight phi, psi;

  QGTuple with_right_weight(Weight new_psi) const;
};

// Coefficient-space tensor arithmetic over one algebra: products, star and
// contractions on A⊗A and A⊗A⊗A vectors. Holds a pointer to the algebra,
// which must outlive it.
class TensorOps {
 public:
  explicit TensorOps(const FiniteStarAlgebra& a);

  const FiniteStarAlgebra& algebra() const { return *a_; }
  int d() const { return d_; }

  static Vec kron2(const Vec& x, const Vec& y);
  static Vec kron3(const Vec& x, const Vec& y, const Vec& z);
  Mat reshape2(const Vec& v) const;    // (i, j) = v(i*d + j)
  Vec flatten2(const Mat& m) const;
  Vec swap2(const Vec& v) const;

  Vec unit2() const;
  Vec emb_first(const Vec& x) const { return kron2(x, a_->unit()); }
  Vec emb_second(const Vec& y) const { return kron2(a_->unit(), y); }

  Vec mul2(const Vec& x, const Vec& y) const;
  Vec star2(const Vec& v) const { return s2_ * v.conjugate(); }
  const Mat& s2() const { return s2_; }

  // Left/right multiplication by a fixed A⊗A element as a d²×d² operator.
  Mat lmul2_matrix(const Vec& v) const;
  Mat rmul2_matrix(const Vec& v) const;

  Vec contract_second(const Vec& v, const Vec& w) const;  // (id⊗w)
  Vec contract_first(const Vec& v, const Vec& w) const;   // (w⊗id)

  Vec mul3(const Vec& x, const Vec& y) const;
  Vec contract_third3(const Vec& v, const Vec& w) const;  // (id⊗id⊗w)
  Vec contract_first3(const Vec& v, const Vec& w) const;  // (w⊗id⊗id)

  // Δ-dependent lifts; delta maps d to d² coefficients.
  Vec delta_first(const Vec& v, const Mat& delta) const;   // (Δ⊗id) on A⊗A
  Vec delta_second(const Vec& v, const Mat& delta) const;  // (id⊗Δ) on A⊗A
  Vec delta13(const Vec& x, const Mat& delta) const;       // Δ₁₃: d -> d³

  // Embeds an A⊗A vector into legs (1,2) or (2,3) of A⊗A⊗A with the unit
  // on the remaining leg.
  Vec leg12(const Vec& v) const;
  Vec leg23(const Vec& v) const;

 private:
  const FiniteStarAlgebra* a_;
  int d_;
  Mat s2_;
};

// GNS data and shared tensor scaffolding for one tuple; built once and
// consumed by every suite. Holds pointers into the tuple, which must
// outlive it.
struct QGContext {
  const QGTuple* t = nullptr;
  TensorOps ops;
  GNSRep gns_phi, gns_psi;  // on A
  GNSRep gns_nu, gns_mu;    // on B, C
  Mat bc_basis;             // d² x (dimB·dimC), column m*dimC+k = b_m⊗c_k
  std::optional<SpanSolver> bc_span;
  std::optional<SpanSolver> b_span, c_span;  // embedded base spans in A
  Mat e_bc;                 // E = Σ e_bc(m,k)·b_m⊗c_k
  Real e_bc_residual = 0;

  static QGContext build(const QGTuple& tuple);

  // Solves v = Σ X(m,k)·b_m⊗c_k; the residual is the B⊗C-membership defect.
  Mat bc_coeffs(const Vec& v, Real* residual = nullptr) const;

 private:
  explicit QGContext(const FiniteStarAlgebra& a) : ops(a) {}
};

// One row per definition axiom, labelled by the anchor it checks; throws
// std::invalid_argument on structural dimension mismatches.
void verify_axioms(const QGContext& ctx, Real tol, CheckReport& report);

struct GammaMaps {
  Mat gamma_b;          // dimC x dimB, from rbc∘σ^ν_{i/2}
  Mat gamma_c;          // dimB x dimC, from rbc⁻¹∘σ^μ_{-i/2}
  Mat gamma_b_from_e;   // same maps rebuilt from (E, ν) alone
  Mat gamma_c_from_e;
  Real from_e_residual = 0;
};

GammaMaps build_gamma_maps(const QGContext& ctx);
void check_gamma(const QGContext& ctx, const GammaMaps& gm, Real tol, CheckReport& report);

struct QMaps {
  Vec f1;                        // (id⊗γ_C)(E)
  Mat q_r, q_rho, q_l, q_lambda; // operators on A⊗A coefficients
  Real q_l_residual = 0;         // consistency of the defining solve
};

QMaps build_q_maps(const QGContext& ctx, const GammaMaps& gm);
// defQ_R dual route, idempotency, characterization identities on triples,
// module-respect, and the Q_L solve well-posedness row.
void check_q_maps(const QGContext& ctx, const QMaps& qm, Real tol, CheckReport& report);

// The four weighted invariance identities on basis pairs.
void invariance_identities(const QGContext& ctx, const QMaps& qm, Real tol, CheckReport& report);

// span{(ψ⊗id)(Δk)} = B and span{(id⊗φ)(Δk)} = C, both inclusions.
void base_reconstruction(const QGContext& ctx, Real tol, CheckReport& report);

// E as a solution of the linear part of its characterizing system, plus the
// dimension of the kernel directions that survive first-order idempotency
// at E (zero exactly when E is locally the unique solution).
void e_uniqueness_probe(const QGContext& ctx, Real tol, CheckReport& report);

}  // namespace qg
