#pragma once

#include "qglab/qgroupoid.hpp"
#include "qglab/regular_reps.hpp"

namespace qg {

// The involutive conjugate-linear operator on H_psi recovered from the
// two-parameter slice family of the (psi, phi)-legged W, with its polar
// parts k = i_op ∘ sqrt(l). The residual fields feed the report rows: the
// defining family must span H_psi (rank_defect), the conjugate-linear solve
// must be consistent (solve_residual), and the result must be an involution.
struct KOperator {
  ConjLinearOp k;
  ConjLinearOp i_op;
  Mat l;  // k.adjoint()∘k, positive-definite
  Real rank_defect = 0;
  Real solve_residual = 0;
};

KOperator build_K(const QGContext& ctx, const Mat& w_psi_phi);

// Well-posedness of K, the polar-part identities (involution, I self-adjoint,
// ILI = L^{-1}), the slice intertwinings of K with W and of the phi-side
// Tomita conjugation with W*, the commutations of L⊗∇ with W at integral and
// sampled imaginary powers, (I⊗J)W(I⊗J) = W*, and the V-side analogues with
// (∇_psi, L^{-1}, J_psi, I).
void modular_commutation_checks(const QGContext& ctx, const KOperator& ko, const RegReps& rr,
                                Real tol, CheckReport& report);

// R, tau_t and S on A coefficients, pulled back through the psi-GNS
// representation. The bundle keeps a pointer into the building context,
// which must outlive it.
struct AntipodeBundle {
  KOperator k;
  Mat r_map;  // x ↦ pullback of I·π(x)*·I
  Mat s_map;  // x ↦ pullback of I·(L^{1/2}π(x)L^{-1/2})*·I
  Real pullback_residual = 0;  // worst over R, S and tau at the sampled times

  const GNSRep* gns = nullptr;

  // Coefficient matrix of tau_z = pullback of L^{iz}·π(x)·L^{-iz}; complex z
  // gives the analytic continuation (tau_{-i} is conjugation by L).
  Mat tau(Cplx z, Real* residual = nullptr) const;
  // sigma' = R∘σ_{-t}∘R, the modular group of the composed weight phi∘R.
  Mat sigma_prime(const QGContext& ctx, Real t) const;
};

AntipodeBundle derive_antipode(const QGContext& ctx, const KOperator& ko);

// Three antipode routes that never touch K: a least-squares solve over the
// W slice family, and solves over the strong-invariance families of either
// Haar weight. Each residual reports the consistency of its defining system.
Mat antipode_from_w_slices(const QGContext& ctx, const Mat& w_psi_phi, Real* residual = nullptr);
Mat antipode_from_strong_left(const QGContext& ctx, Real* residual = nullptr);
Mat antipode_from_strong_right(const QGContext& ctx, Real* residual = nullptr);

// Slice identities S((id⊗ω)(W)) = (id⊗ω)(W*) and the V-side form, strong
// left/right invariance on basis pairs, the finite-sum domain
// characterization and its symmetric variant, the algebraic properties of S
// (S² = tau_{-i}, RS = SR, anti-multiplicativity, S(S(x)*)* = x), and the
// three-leg precursor identity of the right-invariance argument.
void antipode_cross_checks(const QGContext& ctx, const AntipodeBundle& bundle, const RegReps& rr,
                           Real tol, CheckReport& report);

// Covariance of Δ under sigma, tau, sigma^psi and R, invariance of E under
// the paired groups, and the slice characterization that pins tau down.
void relations_suite(const QGContext& ctx, const AntipodeBundle& bundle, Real tol,
                     CheckReport& report);

// Behaviour of S, R, tau, sigma, sigma^psi on the base algebras: the
// converse Δ-characterizations of B and C, stability under tau and R,
// restriction formulas against gamma_B/gamma_C, the base modular groups,
// and nu-invariance under sigma_t.
void restriction_suite(const QGContext& ctx, const AntipodeBundle& bundle, const GammaMaps& gm,
                       Real tol, CheckReport& report);

// Replaces psi by phi∘R, re-runs the definition axioms on the new tuple and
// re-derives R, tau, S from scratch, comparing against the originals. The
// re-derivation rows floor their tolerance at 1e-8 to absorb the two extra
// least-squares solves.
void phiR_suite(const QGContext& ctx, const AntipodeBundle& bundle, Real tol, CheckReport& report);

// Pairwise commutation of sigma, sigma', tau at sampled parameter pairs,
// psi-invariance under sigma_t∘tau_{-t}, and mu-invariance under sigma'.
void commutation_suite(const QGContext& ctx, const AntipodeBundle& bundle, Real tol,
                       CheckReport& report);

}  // namespace qg
