#pragma once

#include "qglab/qgroupoid.hpp"

namespace qg {

// One instance of the fundamental operator W on H_left⊗H_φ, built through
// its adjoint action W*(Λ(p)⊗Λφ(a)) = (Λ⊗Λφ)((Δa)(p⊗1)), together with the
// projections its partial-isometry laws must reproduce: e_rep is E pushed
// through the leg representations, g_l and g_lambda are the Q_L and Q_λ
// maps transported to operators.
struct WInstance {
  Mat w;
  Mat e_rep;
  Mat g_l, g_lambda;
};

// V on H_ψ⊗H_ψ with V(Λψ(p)⊗Λψ(a)) = (Λψ⊗Λψ)((Δp)(1⊗a)), its projections
// from E and the Q_R / Q_ρ maps, and both W instances. The left leg of W is
// ψ for the modular and polar constructions and φ for the pentagon suite;
// both are materialized so neither Hilbert space is silently identified
// with the other.
struct RegReps {
  Mat v;
  Mat e_rep_v;
  Mat g_r, g_rho;
  WInstance w_psiphi;
  WInstance w_phiphi;
};

Mat build_V(const QGContext& ctx);
WInstance build_W(const QGContext& ctx, const QMaps& qm, const GNSRep& left);
RegReps build_regular_reps(const QGContext& ctx, const QMaps& qm);

// Partial-isometry laws of V and W against the transported projections,
// intertwining and implementation of Δ, the adjoint action of V on its
// spanning family, slice reconstructions of algebra elements from V and W
// with their span of the represented algebra, the slice form of Δ, and the
// slice–modular conjugation identity.
void regular_rep_checks(const QGContext& ctx, const RegReps& rr, Real tol, CheckReport& report);

// Pentagon identity for a W with both legs on H_φ, the five equivalent
// product identities, the dual-route projection laws against the supplied
// e_rep and g_l, and coassociativity of the extended comultiplication
// x ↦ W*(1⊗x)W on a spanning set of the slice-generated algebra. Throws
// std::invalid_argument if w is not square of a perfect-square size.
void pentagon_checks(const Mat& w, const Mat& e_rep, const Mat& g_l, Real tol,
                     CheckReport& report);

}  // namespace qg
