#include "qglab/regular_reps.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qg {
namespace {

using SpMat = Eigen::SparseMatrix<Cplx>;

constexpr Real kLiftPrune = 1e-14;

// Lifts a two-leg operator to the named legs of a three-fold space as a
// sparse matrix, identity on the remaining leg. Entries below
// kLiftPrune·max|w| are dropped; for the operators built here the zeros are
// structural, so the lift stays near the permutation sparsity of w.
SpMat sparse_leg_lift(const Mat& w, Legs legs, const TripleDims& dims, Real prune) {
  const int n = dims.total();
  const Real cut = w.size() > 0 ? prune * w.cwiseAbs().maxCoeff() : 0;
  std::vector<Eigen::Triplet<Cplx>> trips;
  auto emit = [&](int rw, int cw, const Cplx& val) {
    switch (legs) {
      case Legs::one_two:
        for (int i = 0; i < dims.d3; ++i) trips.emplace_back(rw * dims.d3 + i, cw * dims.d3 + i, val);
        break;
      case Legs::two_three:
        for (int i = 0; i < dims.d1; ++i)
          trips.emplace_back(i * dims.d2 * dims.d3 + rw, i * dims.d2 * dims.d3 + cw, val);
        break;
      case Legs::one_three: {
        const int r1 = rw / dims.d3, r3 = rw % dims.d3;
        const int c1 = cw / dims.d3, c3 = cw % dims.d3;
        for (int i = 0; i < dims.d2; ++i)
          trips.emplace_back((r1 * dims.d2 + i) * dims.d3 + r3, (c1 * dims.d2 + i) * dims.d3 + c3,
                             val);
        break;
      }
    }
  };
  for (int c = 0; c < w.cols(); ++c)
    for (int r = 0; r < w.rows(); ++r)
      if (std::abs(w(r, c)) > cut) emit(r, c, w(r, c));
  SpMat out(n, n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Real sp_rel(const SpMat& a, const SpMat& b) {
  SpMat diff = a - b;
  return diff.norm() / std::max<Real>(1, b.norm());
}

// Pushes an A⊗A coefficient vector through a pair of representations.
Mat rep_tensor(const GNSRep& first, const GNSRep& second, const Vec& v2) {
  const int d = first.algebra().dim();
  const int df = first.dim(), ds = second.dim();
  Mat out = Mat::Zero(df * ds, df * ds);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Cplx c = v2(i * d + j);
      if (c == Cplx(0, 0)) continue;
      out += c * kron(first.rep_basis(i), second.rep_basis(j));
    }
  return out;
}

Real projection_defect(const Mat& g) {
  return std::max(rel_residual(g * g, g), rel_residual(g.adjoint(), g));
}

std::vector<int> onb_picks(int d) {
  std::vector<int> out{0};
  if (d > 2) out.push_back(d / 2);
  if (d > 1) out.push_back(d - 1);
  return out;
}

}  // namespace

Mat build_V(const QGContext& ctx) {
  const FiniteStarAlgebra& A = ctx.t->A;
  const int d = A.dim();
  Mat m(d * d, d * d);
  for (int p = 0; p < d; ++p)
    for (int a = 0; a < d; ++a)
      m.col(p * d + a) =
          ctx.ops.mul2(ctx.t->delta_coef.col(p), ctx.ops.emb_second(A.basis_coeff(a)));
  const Mat lift = kron(ctx.gns_psi.lroot(), ctx.gns_psi.lroot());
  const Mat lift_inv = kron(ctx.gns_psi.lroot_inv(), ctx.gns_psi.lroot_inv());
  return lift * m * lift_inv;
}

WInstance build_W(const QGContext& ctx, const QMaps& qm, const GNSRep& left) {
  const FiniteStarAlgebra& A = ctx.t->A;
  const int d = A.dim();
  Mat n(d * d, d * d);
  for (int p = 0; p < d; ++p)
    for (int a = 0; a < d; ++a)
      n.col(p * d + a) =
          ctx.ops.mul2(ctx.t->delta_coef.col(a), ctx.ops.emb_first(A.basis_coeff(p)));
  const Mat lift = kron(left.lroot(), ctx.gns_phi.lroot());
  const Mat lift_inv = kron(left.lroot_inv(), ctx.gns_phi.lroot_inv());
  WInstance out;
  out.w = (lift * n * lift_inv).adjoint();
  out.e_rep = rep_tensor(left, ctx.gns_phi, ctx.t->e_coef);
  out.g_l = lift * qm.q_l * lift_inv;
  out.g_lambda = lift * qm.q_lambda * lift_inv;
  return out;
}

RegReps build_regular_reps(const QGContext& ctx, const QMaps& qm) {
  RegReps rr;
  rr.v = build_V(ctx);
  const Mat lift = kron(ctx.gns_psi.lroot(), ctx.gns_psi.lroot());
  const Mat lift_inv = kron(ctx.gns_psi.lroot_inv(), ctx.gns_psi.lroot_inv());
  rr.e_rep_v = rep_tensor(ctx.gns_psi, ctx.gns_psi, ctx.t->e_coef);
  rr.g_r = lift * qm.q_r * lift_inv;
  rr.g_rho = lift * qm.q_rho * lift_inv;
  rr.w_psiphi = build_W(ctx, qm, ctx.gns_psi);
  rr.w_phiphi = build_W(ctx, qm, ctx.gns_phi);
  return rr;
}

void regular_rep_checks(const QGContext& ctx, const RegReps& rr, Real tol, CheckReport& report) {
  const FiniteStarAlgebra& A = ctx.t->A;
  const int d = A.dim();
  const GNSRep& gpsi = ctx.gns_psi;
  const GNSRep& gphi = ctx.gns_phi;
  const Mat& v = rr.v;
  const Mat id_d = Mat::Identity(d, d);

  std::vector<Mat> drep_psipsi(d), drep_psiphi(d);
  for (int x = 0; x < d; ++x) {
    drep_psipsi[x] = rep_tensor(gpsi, gpsi, ctx.t->delta_coef.col(x));
    drep_psiphi[x] = rep_tensor(gpsi, gphi, ctx.t->delta_coef.col(x));
  }

  report.add("regreps.K_psi=H_psi.1", "K_psi=H_psi", rel_residual(v * v.adjoint(), rr.e_rep_v),
             tol);
  report.add("regreps.K_psi=H_psi.2", "K_psi=H_psi", rel_residual(v * v.adjoint() * v, v), tol);

  report.add("regreps.G_R.1", "G_R", rel_residual(v.adjoint() * v, rr.g_r), tol);
  report.add("regreps.G_R.2", "G_R",
             std::max(projection_defect(rr.g_r), projection_defect(rr.g_rho)), tol);

  report.add("regreps.Vprop.1", "Vprop", rel_residual(rr.e_rep_v * v, v), tol);
  {
    Real worst = 0;
    for (int x = 0; x < d; ++x)
      worst = std::max(
          worst, rel_residual(v * kron(gpsi.rep_basis(x), id_d), drep_psipsi[x] * v));
    report.add("regreps.Vprop.2", "Vprop", worst, tol);
  }

  // Adjoint action on the spanning family: for a = (id⊗φ)(Δ(r*y)(1⊗s)) and
  // z = (id⊗id⊗φ)(Δ₁₃(r*y)Δ₂₃(s)), V*(Λψ(a)⊗Λψ(b)) = (Λψ⊗Λψ)(z(1⊗b)).
  {
    const Mat vstar = v.adjoint();
    const Mat& lpsi = gpsi.lroot();
    std::vector<Mat> ws(d, Mat(d, d));
    for (int s = 0; s < d; ++s)
      for (int k = 0; k < d; ++k)
        ws[s].row(k) = ctx.ops
                           .contract_second(ctx.ops.mul2(ctx.ops.emb_second(A.basis_coeff(k)),
                                                         ctx.t->delta_coef.col(s)),
                                            ctx.t->phi.values)
                           .transpose();
    Real worst = 0;
    for (int r = 0; r < d; ++r) {
      const Vec rstar = A.star(A.basis_coeff(r));
      for (int y = 0; y < d; ++y) {
        const Vec x = A.mul(rstar, A.basis_coeff(y));
        if (x.norm() < 1e-14) continue;
        const Vec dx = ctx.t->delta_coef * x;
        const Mat dm = ctx.ops.reshape2(dx);
        for (int s = 0; s < d; ++s) {
          const Vec acoef = ctx.ops.contract_second(
              ctx.ops.mul2(dx, ctx.ops.emb_second(A.basis_coeff(s))), ctx.t->phi.values);
          const Mat zmat = dm * ws[s];
          const Mat lhs = vstar * kron(Mat(gpsi.lambda(acoef)), lpsi);
          Mat rhs(d * d, d);
          for (int b = 0; b < d; ++b)
            rhs.col(b) = ctx.ops.flatten2(lpsi * (zmat * A.rmul_table(b).transpose()) *
                                          lpsi.transpose());
          worst = std::max(worst, rel_residual(lhs, rhs));
        }
      }
    }
    report.add("regreps.U^*.1", "U^*", worst, tol);
  }

  {
    Real isometry = 0, range = 0, absorb = 0, proj = 0;
    for (const WInstance* wi : {&rr.w_psiphi, &rr.w_phiphi}) {
      isometry = std::max(isometry, rel_residual(wi->w.adjoint() * wi->w, wi->e_rep));
      range = std::max(range, rel_residual(wi->w * wi->w.adjoint(), wi->g_l));
      absorb = std::max(absorb, rel_residual(wi->w * wi->w.adjoint() * wi->w, wi->w));
      proj = std::max({proj, projection_defect(wi->g_l), projection_defect(wi->g_lambda)});
    }
    report.add("regreps.Wpartialisometry.1", "Wpartialisometry", isometry, tol);
    report.add("regreps.Wpartialisometry.2", "Wpartialisometry", range, tol);
    const Mat wst = rr.w_psiphi.w.adjoint();
    report.add("regreps.Wpartialisometry.3", "Wpartialisometry",
               rel_residual(rr.w_psiphi.e_rep * wst, wst), tol);
    Real inter = 0;
    for (int x = 0; x < d; ++x)
      inter = std::max(inter, rel_residual(wst * kron(id_d, gphi.rep_basis(x)),
                                           drep_psiphi[x] * wst));
    report.add("regreps.Wpartialisometry.4", "Wpartialisometry", inter, tol);
    report.add("regreps.Wpartialisometry.5", "Wpartialisometry", absorb, tol);

    // Characterization of G_L on triple tensors: applying id⊗G_L to
    // (Λψ⊗Λψ⊗Λφ)(Δ₁₃(a)(y⊗c⊗1)) inserts E⊗1 before the second factor.
    const Mat& lpsi = gpsi.lroot();
    const Mat& lphi = gphi.lroot();
    auto lam3 = [&](const Vec& v3) {
      Vec t = apply_block(v3, lpsi, 1, d * d);
      t = apply_block(t, lpsi, d, d);
      return apply_block(t, lphi, d * d, 1);
    };
    std::vector<Vec> d13(d);
    for (int a = 0; a < d; ++a) d13[a] = ctx.ops.delta13(A.basis_coeff(a), ctx.t->delta_coef);
    Real charac = 0;
    for (int y = 0; y < d; ++y)
      for (int c = 0; c < d; ++c) {
        const Vec yc = TensorOps::kron2(A.basis_coeff(y), A.basis_coeff(c));
        const Vec l12 = ctx.ops.leg12(yc);
        const Vec l12e = ctx.ops.leg12(ctx.ops.mul2(ctx.t->e_coef, yc));
        for (int a = 0; a < d; ++a) {
          const Vec lhs = apply_block(lam3(ctx.ops.mul3(d13[a], l12)), rr.w_psiphi.g_l, d, 1);
          const Vec rhs = lam3(ctx.ops.mul3(d13[a], l12e));
          charac = std::max(charac, rel_residual_vec(lhs, rhs));
        }
      }
    report.add("regreps.Wpartialisometry.6", "Wpartialisometry", charac, tol);
    report.add("regreps.Wpartialisometry.7", "Wpartialisometry", proj, tol);
  }

  const Mat& w = rr.w_psiphi.w;
  const Mat wst = w.adjoint();
  {
    Real worst = 0;
    for (int x = 0; x < d; ++x)
      worst = std::max(
          worst, rel_residual(wst * kron(id_d, gphi.rep_basis(x)) * w, drep_psiphi[x]));
    report.add("regreps.DeltaW.1", "DeltaW", worst, tol);
  }

  {
    Real worst = 0;
    for (int s = 0; s < d; ++s)
      for (int r = 0; r < d; ++r) {
        const Mat lhs = slice_second(w, gphi.lambda_basis(s), gphi.lambda_basis(r), d, d);
        const Vec rhs = ctx.ops.contract_second(
            ctx.ops.mul2(ctx.t->delta_coef * A.star(A.basis_coeff(r)),
                         ctx.ops.emb_second(A.basis_coeff(s))),
            ctx.t->phi.values);
        worst = std::max(worst, rel_residual(lhs, gpsi.rep(rhs)));
      }
    report.add("regreps.idomegaW.1", "idomegaW", worst, tol);
  }

  {
    Real worst = 0;
    for (int b = 0; b < d; ++b)
      for (int a = 0; a < d; ++a) {
        const Mat lhs = slice_first(v, gpsi.lambda_basis(b), gpsi.lambda_basis(a), d, d);
        const Vec rhs = ctx.ops.contract_first(
            ctx.ops.mul2(ctx.ops.emb_first(A.star(A.basis_coeff(a))),
                         ctx.t->delta_coef.col(b)),
            ctx.t->psi.values);
        worst = std::max(worst, rel_residual(lhs, gpsi.rep(rhs)));
      }
    report.add("regreps.omegaidV.1", "omegaidV", worst, tol);
  }

  // Slices of V and of W against vector states span the represented algebra
  // and stay inside it.
  auto span_row = [&](const std::string& id, const std::string& ref, bool first_leg,
                      const Mat& op) {
    Mat sl(d * d, d * d);
    Real memb = 0;
    for (int u = 0; u < d; ++u)
      for (int z = 0; z < d; ++z) {
        const Mat s = first_leg ? slice_first(op, Vec::Unit(d, u), Vec::Unit(d, z), d, d)
                                : slice_second(op, Vec::Unit(d, u), Vec::Unit(d, z), d, d);
        Real res = 0;
        gpsi.op_to_coeffs(s, &res);
        memb = std::max(memb, res);
        sl.col(u * d + z) = Eigen::Map<const Vec>(s.data(), d * d);
      }
    const int rank = matrix_rank(sl);
    report.add(id, ref, std::max(memb, Real(d - rank)), tol);
  };
  span_row("regreps.omegaidV.2", "omegaidV", true, v);
  span_row("regreps.idomegaWclosureA.1", "idomegaWclosureA", false, w);

  // Slice form of Δ: for x = (id⊗ω(c·))(W), the pair representation of Δx
  // is the third-leg slice of W₁₃W₂₃, the 23 factor taken with both legs
  // on H_φ.
  {
    const TripleDims dims{d, d, d};
    const SpMat w13 = sparse_leg_lift(w, Legs::one_three, dims, kLiftPrune);
    const SpMat w23 = sparse_leg_lift(rr.w_phiphi.w, Legs::two_three, dims, kLiftPrune);
    const Mat m = Mat(SpMat(w13 * w23));
    const std::vector<int> picks = onb_picks(d);
    Real worst = 0;
    for (int c = 0; c < d; ++c) {
      const Mat cadj = gphi.rep_basis(c).adjoint();
      for (int xi_i : picks)
        for (int z_i : picks) {
          const Vec xi = Vec::Unit(d, xi_i);
          const Vec zeta = cadj * Vec::Unit(d, z_i);
          const Mat xop = slice_second(w, xi, zeta, d, d);
          Real memb = 0;
          const Vec xcoef = gpsi.op_to_coeffs(xop, &memb);
          const Mat lhs = rep_tensor(gpsi, gphi, ctx.t->delta_coef * xcoef);
          const Mat rhs = slice_second(m, xi, zeta, d * d, d);
          worst = std::max({worst, memb, rel_residual(rhs, lhs)});
        }
    }
    report.add("regreps.Deltaidomega.1", "Deltaidomega", worst, tol);
  }

  // Slice–modular identity: the adjoint of a W-slice is the W-slice at the
  // analytically continued arguments.
  {
    Real worst = 0;
    for (int a = 0; a < d; ++a)
      for (int x = 0; x < d; ++x) {
        const Vec ac = A.basis_coeff(a), xc = A.basis_coeff(x);
        const Mat lhs = slice_second(w, gphi.lambda(ac), gphi.lambda(xc), d, d);
        const Vec asig = gphi.sigma(A.star(ac), Cplx(0, -1));
        const Mat rhs =
            slice_second(w, gphi.lambda(asig), gphi.lambda(A.star(xc)), d, d).adjoint();
        worst = std::max(worst, rel_residual(lhs, rhs));
      }
    report.add("regreps.aplemma2.1", "aplemma2", worst, tol);
  }
}

void pentagon_checks(const Mat& w, const Mat& e_rep, const Mat& g_l, Real tol,
                     CheckReport& report) {
  const int d2 = static_cast<int>(w.rows());
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d2))));
  if (w.cols() != d2 || d * d != d2)
    throw std::invalid_argument("pentagon_checks: operator is not square on a two-fold space");
  const TripleDims dims{d, d, d};
  const SpMat w12 = sparse_leg_lift(w, Legs::one_two, dims, kLiftPrune);
  const SpMat w13 = sparse_leg_lift(w, Legs::one_three, dims, kLiftPrune);
  const SpMat w23 = sparse_leg_lift(w, Legs::two_three, dims, kLiftPrune);
  const SpMat w12s = w12.adjoint();
  const SpMat w23s = w23.adjoint();

  report.add("regreps.Wpentagon.1", "Wpentagon", sp_rel(w12 * w13 * w23, w23 * w12), tol);
  report.add("regreps.Wpentagon_alt.1", "Wpentagon_alt",
             sp_rel(w13 * w23 * w23s, w12s * w12 * w13), tol);
  report.add("regreps.Wpentagon_alt.2", "Wpentagon_alt", sp_rel(w12s * w23 * w12, w13 * w23),
             tol);
  report.add("regreps.Wpentagon_alt.3", "Wpentagon_alt", sp_rel(w23 * w12 * w23s, w12 * w13),
             tol);
  report.add("regreps.Wpentagon_alt.4", "Wpentagon_alt",
             sp_rel(w12 * w12s * w23, w23 * w12 * w12s), tol);
  report.add("regreps.Wpentagon_alt.5", "Wpentagon_alt",
             sp_rel(w12 * w23s * w23, w23s * w23 * w12), tol);
  report.add("regreps.Wpentagon_alt.6", "Wpentagon_alt",
             std::max(rel_residual(w.adjoint() * w, e_rep),
                      rel_residual(w * w.adjoint(), g_l)),
             tol);

  // Coassociativity of the extended comultiplication on a maximal
  // independent family of second-leg slices of w.
  Mat sl(d2, d2);
  for (int u = 0; u < d; ++u)
    for (int z = 0; z < d; ++z) {
      const Mat s = slice_second(w, Vec::Unit(d, u), Vec::Unit(d, z), d, d);
      sl.col(u * d + z) = Eigen::Map<const Vec>(s.data(), d2);
    }
  Eigen::ColPivHouseholderQR<Mat> qr(sl);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  const auto& piv = qr.colsPermutation().indices();
  const Mat id_d = Mat::Identity(d, d);
  Real worst = 0;
  for (int i = 0; i < rank; ++i) {
    const Vec colv = sl.col(piv(i));
    const Mat x = Eigen::Map<const Mat>(colv.data(), d, d);
    const Mat y = w.adjoint() * kron(id_d, x) * w;
    const Mat y23 = kron(id_d, y);
    const Mat y13 = embed_legs(y, Legs::one_three, dims);
    const Mat lhs = w12s * Mat(y23 * w12);
    const Mat rhs = w23s * Mat(y13 * w23);
    worst = std::max(worst, rel_residual(lhs, rhs));
  }
  report.add("regreps.vNqgroupoid.1", "vNqgroupoid", worst, tol);
}

}  // namespace qg
