#include "qglab/pipeline.hpp"

#include <cstdio>
#include <stdexcept>

namespace qg {

std::unique_ptr<BuiltObjects> build_all(QGTuple tuple) {
  auto out = std::make_unique<BuiltObjects>();
  out->tuple = std::move(tuple);
  out->ctx.emplace(QGContext::build(out->tuple));
  const QGContext& ctx = *out->ctx;
  out->gm = build_gamma_maps(ctx);
  out->qm = build_q_maps(ctx, out->gm);
  out->rr = build_regular_reps(ctx, out->qm);
  out->ko = build_K(ctx, out->rr.w_psiphi.w);
  out->ab = derive_antipode(ctx, out->ko);
  return out;
}

PipelineResult run_pipeline(const FiniteGroupoid& g, const HaarWeights& hw, ModelKind model,
                            const Tamper& tamper, Real tol) {
  if (model == ModelKind::kBoth)
    throw std::invalid_argument("run_pipeline takes a single model; expand kBoth upstream");

  PipelineResult result;
  CheckReport& report = result.report;
  check_groupoid(g, tol, report, "examples.validategroupoid");

  const char* stage = "examples";
  try {
    QGTuple tuple = model == ModelKind::kFunction ? function_model(g, hw, tamper)
                                                  : convolution_model(g, hw, tamper);
    stage = "qgroupoid";
    auto b = std::make_unique<BuiltObjects>();
    b->tuple = std::move(tuple);

    check_star_algebra(b->tuple.A, tol, report, "algebra.closure");
    check_star_algebra(b->tuple.B, tol, report, "algebra.closureB");
    check_star_algebra(b->tuple.C, tol, report, "algebra.closureC");

    b->ctx.emplace(QGContext::build(b->tuple));
    const QGContext& ctx = *b->ctx;
    check_gns(ctx.gns_phi, tol, report, "gns.phi");
    check_gns(ctx.gns_psi, tol, report, "gns.psi");
    check_gns(ctx.gns_nu, tol, report, "gns.nu");
    check_gns(ctx.gns_mu, tol, report, "gns.mu");
    check_modular(ctx.gns_phi, tol, report, "modular.phi");
    check_kms(ctx.gns_phi, tol, report, "kms.phi");
    check_kms(ctx.gns_psi, tol, report, "kms.psi");
    verify_axioms(ctx, tol, report);

    b->gm = build_gamma_maps(ctx);
    check_gamma(ctx, b->gm, tol, report);
    b->qm = build_q_maps(ctx, b->gm);
    check_q_maps(ctx, b->qm, tol, report);
    invariance_identities(ctx, b->qm, tol, report);
    base_reconstruction(ctx, tol, report);
    e_uniqueness_probe(ctx, tol, report);

    stage = "regreps";
    b->rr = build_regular_reps(ctx, b->qm);
    regular_rep_checks(ctx, b->rr, tol, report);
    pentagon_checks(b->rr.w_phiphi.w, b->rr.w_phiphi.e_rep, b->rr.w_phiphi.g_l, tol, report);

    stage = "antipode";
    b->ko = build_K(ctx, b->rr.w_psiphi.w);
    modular_commutation_checks(ctx, b->ko, b->rr, tol, report);
    b->ab = derive_antipode(ctx, b->ko);
    antipode_cross_checks(ctx, b->ab, b->rr, tol, report);
    relations_suite(ctx, b->ab, tol, report);
    restriction_suite(ctx, b->ab, b->gm, tol, report);
    phiR_suite(ctx, b->ab, tol, report);
    commutation_suite(ctx, b->ab, tol, report);

    result.built = std::move(b);
  } catch (const std::exception& e) {
    report.add(std::string(stage) + ".buildfailure.1",
               std::string("construction aborted: ") + e.what(), 1.0, tol);
  }
  return result;
}

Mat derived_object(const BuiltObjects& b, const std::string& what, Real t) {
  if (what == "S") return b.ab.s_map;
  if (what == "R") return b.ab.r_map;
  if (what == "tau") return b.ab.tau(Cplx(t, 0));
  if (what == "W") return b.rr.w_psiphi.w;
  if (what == "V") return b.rr.v;
  if (what == "K") return b.ko.k.m;
  if (what == "L") return b.ko.l;
  if (what == "nabla") return b.ctx->gns_phi.nabla();
  if (what == "E") return b.rr.w_phiphi.e_rep;
  throw std::invalid_argument("unknown derive target \"" + what +
                              "\" (expected S|R|tau|W|V|K|L|nabla|E)");
}

std::string derived_header(const BuiltObjects& b, const std::string& what, Real t) {
  const std::string alg = "columns/rows indexed by the algebra basis of " + b.tuple.A.label() +
                          "; column j = coefficients of the image of basis element j";
  if (what == "S") return "antipode S on algebra coefficients; " + alg;
  if (what == "R") return "unitary antipode R on algebra coefficients; " + alg;
  if (what == "tau") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", t);
    return "scaling map tau_t at t = " + std::string(buf) + " on algebra coefficients; " + alg;
  }
  if (what == "W")
    return "fundamental operator W on H_right ⊗ H_left in orthonormal GNS coordinates; "
           "tensor index row-major (i*d2 + j)";
  if (what == "V")
    return "fundamental operator V on H_right ⊗ H_right in orthonormal GNS coordinates; "
           "tensor index row-major (i*d + j)";
  if (what == "K")
    return "conjugate-linear K on H_right: v ↦ M·conj(v) with M the matrix below, "
           "orthonormal GNS coordinates";
  if (what == "L") return "positive operator L = K*K on H_right in orthonormal GNS coordinates";
  if (what == "nabla")
    return "modular operator of the left weight on H_left in orthonormal GNS coordinates";
  if (what == "E")
    return "canonical idempotent represented on H_left ⊗ H_left; tensor index row-major";
  throw std::invalid_argument("unknown derive target \"" + what + "\"");
}

std::string format_matrix_text(const std::string& header, const Mat& m) {
  std::string out;
  out.reserve(static_cast<size_t>(m.size()) * 48 + header.size() + 64);
  out += "# " + header + "\n";
  char buf[96];
  std::snprintf(buf, sizeof(buf), "# %ld x %ld\n", static_cast<long>(m.rows()),
                static_cast<long>(m.cols()));
  out += buf;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%s[%.17g, %.17g]", j ? " " : "", m(i, j).real(),
                    m(i, j).imag());
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace qg
