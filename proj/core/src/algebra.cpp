#include "qglab/algebra.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace qg {

namespace {

Vec flatten(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

}  // namespace

FiniteStarAlgebra FiniteStarAlgebra::from_basis(std::string label, std::vector<Mat> basis) {
  if (basis.empty()) throw std::invalid_argument("from_basis: empty basis");
  const int d = static_cast<int>(basis.size());
  const int n = static_cast<int>(basis[0].rows());
  for (const Mat& b : basis)
    if (b.rows() != n || b.cols() != n)
      throw std::invalid_argument("from_basis: basis elements must be square and equally sized");

  FiniteStarAlgebra alg;
  alg.label_ = std::move(label);
  alg.ambient_dim_ = n;
  alg.basis_ = std::move(basis);

  Mat cols(n * n, d);
  for (int i = 0; i < d; ++i) cols.col(i) = flatten(alg.basis_[i]);
  alg.span_.emplace(cols);

  Real worst = 0;

  alg.lmul_.resize(d);
  alg.rmul_.resize(d);
  for (int i = 0; i < d; ++i) {
    alg.lmul_[i].resize(d, d);
    alg.rmul_[i].resize(d, d);
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Real r = 0;
      Vec c = alg.span_->solve(flatten(alg.basis_[i] * alg.basis_[j]), &r);
      worst = std::max(worst, r);
      alg.lmul_[i].col(j) = c;   // coeffs of b_i * b_j
      alg.rmul_[j].col(i) = c;   // same product, seen as right multiplication by b_j
    }

  alg.star_mat_.resize(d, d);
  for (int i = 0; i < d; ++i) {
    Real r = 0;
    Vec c = alg.span_->solve(flatten(alg.basis_[i].adjoint()), &r);
    worst = std::max(worst, r);
    alg.star_mat_.col(i) = c;
  }

  // Two-sided unit by least squares: (sum_j u_j b_j) b_i has coeffs
  // rmul_[i] * u and b_i (sum_j u_j b_j) has coeffs lmul_[i] * u; both must
  // equal e_i.
  Mat unit_sys(2 * d * d, d);
  Vec unit_rhs = Vec::Zero(2 * d * d);
  for (int i = 0; i < d; ++i) {
    unit_sys.middleRows(i * d, d) = alg.rmul_[i];
    unit_sys.middleRows(d * d + i * d, d) = alg.lmul_[i];
    unit_rhs(i * d + i) = 1.0;
    unit_rhs(d * d + i * d + i) = 1.0;
  }
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(unit_sys);
  alg.unit_coeffs_ = cod.solve(unit_rhs);
  worst = std::max(worst, rel_residual_vec(unit_sys * alg.unit_coeffs_, unit_rhs));

  alg.build_residual_ = worst;
  return alg;
}

Vec FiniteStarAlgebra::coeffs(const Mat& x, Real* residual) const {
  return span_->solve(flatten(x), residual);
}

Mat FiniteStarAlgebra::to_element(const Vec& c) const {
  Mat out = Mat::Zero(ambient_dim_, ambient_dim_);
  for (int i = 0; i < dim(); ++i) out += c(i) * basis_[i];
  return out;
}

Mat FiniteStarAlgebra::lmul_matrix(const Vec& x) const {
  Mat out = Mat::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i)
    if (x(i) != Cplx(0, 0)) out += x(i) * lmul_[i];
  return out;
}

Mat FiniteStarAlgebra::rmul_matrix(const Vec& x) const {
  Mat out = Mat::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i)
    if (x(i) != Cplx(0, 0)) out += x(i) * rmul_[i];
  return out;
}

Vec FiniteStarAlgebra::basis_coeff(int i) const {
  Vec e = Vec::Zero(dim());
  e(i) = 1.0;
  return e;
}

Mat Weight::gram(const FiniteStarAlgebra& alg) const {
  const int d = alg.dim();
  Mat g(d, d);
  for (int i = 0; i < d; ++i) {
    Vec si = alg.star(alg.basis_coeff(i));
    Mat lm = alg.lmul_matrix(si);
    for (int j = 0; j < d; ++j) g(i, j) = apply(lm.col(j));
  }
  return g;
}

GNSRep GNSRep::build(const FiniteStarAlgebra& alg, const Weight& w) {
  GNSRep rep;
  rep.alg_ = &alg;
  rep.weight_ = w;
  rep.gram_ = w.gram(alg);
  rep.gram_ = 0.5 * (rep.gram_ + Mat(rep.gram_.adjoint()));
  rep.lroot_ = mat_sqrt(rep.gram_);
  rep.lroot_inv_ = mat_inv_sqrt(rep.gram_);

  const int d = alg.dim();
  rep.rep_cache_.resize(d);
  Mat rep_cols(d * d, d);
  for (int i = 0; i < d; ++i) {
    rep.rep_cache_[i] = rep.lroot_ * alg.lmul_table(i) * rep.lroot_inv_;
    rep_cols.col(i) = Eigen::Map<const Vec>(rep.rep_cache_[i].data(), d * d);
  }
  rep.rep_span_.emplace(rep_cols);

  // T Lambda(x) = Lambda(x*) in GNS coordinates.
  rep.tomita_ = ConjLinearOp{rep.lroot_ * alg.star_matrix() * rep.lroot_inv_.conjugate()};
  rep.nabla_ = rep.tomita_.adjoint().compose(rep.tomita_);
  rep.nabla_ = 0.5 * (rep.nabla_ + Mat(rep.nabla_.adjoint()));
  PolarConjParts polar = polar_conj(rep.tomita_);
  rep.jconj_ = polar.i_part;
  return rep;
}

Vec GNSRep::lambda_unit() const { return lroot_ * alg_->unit(); }

Mat GNSRep::rep(const Vec& coeffs) const {
  const int d = dim();
  Mat out = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    if (coeffs(i) != Cplx(0, 0)) out += coeffs(i) * rep_cache_[i];
  return out;
}

Vec GNSRep::op_to_coeffs(const Mat& op, Real* residual) const {
  return rep_span_->solve(Eigen::Map<const Vec>(op.data(), op.size()), residual);
}

Vec GNSRep::sigma(const Vec& coeffs, Cplx z, Real* residual) const {
  const Cplx iz = Cplx(0, 1) * z;
  Mat conj_op = mat_pow(nabla_, iz) * rep(coeffs) * mat_pow(nabla_, -iz);
  return op_to_coeffs(conj_op, residual);
}

Mat GNSRep::sigma_matrix(Cplx z, Real* residual) const {
  const int d = dim();
  const Cplx iz = Cplx(0, 1) * z;
  const Mat left = mat_pow(nabla_, iz);
  const Mat right = mat_pow(nabla_, -iz);
  Mat out(d, d);
  Real worst = 0;
  for (int i = 0; i < d; ++i) {
    Real r = 0;
    out.col(i) = op_to_coeffs(left * rep_cache_[i] * right, &r);
    worst = std::max(worst, r);
  }
  if (residual) *residual = worst;
  return out;
}

void check_star_algebra(const FiniteStarAlgebra& alg, Real tol, CheckReport& report,
                        const std::string& id_prefix) {
  const int d = alg.dim();

  Real closure = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Real r = 0;
      (void)alg.coeffs(alg.basis()[i] * alg.basis()[j], &r);
      closure = std::max(closure, r);
    }
  report.add(id_prefix + ".1", "artifact-plumbing", closure, tol);

  Real starclosure = 0;
  for (int i = 0; i < d; ++i) {
    Real r = 0;
    (void)alg.coeffs(Mat(alg.basis()[i].adjoint()), &r);
    starclosure = std::max(starclosure, r);
  }
  report.add(id_prefix + ".2", "artifact-plumbing", starclosure, tol);

  Real unit_defect = 0;
  for (int i = 0; i < d; ++i) {
    Vec e = alg.basis_coeff(i);
    unit_defect = std::max(unit_defect, rel_residual_vec(alg.mul(alg.unit(), e), e));
    unit_defect = std::max(unit_defect, rel_residual_vec(alg.mul(e, alg.unit()), e));
  }
  report.add(id_prefix + ".3", "artifact-plumbing", unit_defect, tol);

  // lmul is an algebra homomorphism iff the product is associative.
  Real assoc = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Mat lhs = alg.lmul_table(i) * alg.lmul_table(j);
      Mat rhs = alg.lmul_matrix(alg.lmul_table(i).col(j));
      assoc = std::max(assoc, rel_residual(lhs, rhs));
    }
  report.add(id_prefix + ".4", "artifact-plumbing", assoc, tol);

  Mat cols(alg.ambient_dim() * alg.ambient_dim(), d);
  for (int i = 0; i < d; ++i)
    cols.col(i) = Eigen::Map<const Vec>(alg.basis()[i].data(), alg.basis()[i].size());
  const int rank = matrix_rank(cols);
  report.add(id_prefix + ".5", "artifact-plumbing", static_cast<Real>(d - rank), tol);

  // star is an anti-multiplicative involution on coefficients.
  Real inv = rel_residual(alg.star_matrix() * alg.star_matrix().conjugate(),
                          Mat::Identity(d, d));
  report.add(id_prefix + ".6", "artifact-plumbing", inv, tol);
  Real antimult = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Vec lhs = alg.star(alg.lmul_table(i).col(j));
      Vec rhs = alg.mul(alg.star(alg.basis_coeff(j)), alg.star(alg.basis_coeff(i)));
      antimult = std::max(antimult, rel_residual_vec(lhs, rhs));
    }
  report.add(id_prefix + ".7", "artifact-plumbing", antimult, tol);
}

void check_gns(const GNSRep& rep, Real tol, CheckReport& report, const std::string& id_prefix) {
  const FiniteStarAlgebra& alg = rep.algebra();
  const int d = alg.dim();

  Real herm = rel_residual(rep.gram(), Mat(rep.gram().adjoint()));
  report.add(id_prefix + ".1", "GNSconstruction", herm, tol);

  Eigen::SelfAdjointEigenSolver<Mat> es(rep.gram());
  const Real lmax = std::max(es.eigenvalues().maxCoeff(), 1e-300);
  const Real lmin = es.eigenvalues().minCoeff();
  Real positivity = lmin / lmax < 1e-12 ? 1.0 : std::max(0.0, -lmin / lmax);
  report.add(id_prefix + ".2", "GNSconstruction", positivity, tol);

  // <Lambda(a), Lambda(b)> = w(b* a)
  Real pairing = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Cplx lhs = inner(rep.lambda_basis(i), rep.lambda_basis(j));
      Cplx rhs = rep.weight().apply(alg.mul(alg.star(alg.basis_coeff(j)), alg.basis_coeff(i)));
      pairing = std::max(pairing, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
  report.add(id_prefix + ".3", "GNSconstruction", pairing, tol);

  Real star_hom = 0, mult_hom = 0, covariance = 0;
  for (int i = 0; i < d; ++i) {
    star_hom = std::max(star_hom, rel_residual(rep.rep(alg.star(alg.basis_coeff(i))),
                                               Mat(rep.rep_basis(i).adjoint())));
    for (int j = 0; j < d; ++j) {
      mult_hom = std::max(mult_hom, rel_residual(rep.rep_basis(i) * rep.rep_basis(j),
                                                 rep.rep(alg.lmul_table(i).col(j))));
      covariance = std::max(
          covariance, rel_residual_vec(rep.rep_basis(i) * rep.lambda_basis(j),
                                       rep.lambda(alg.lmul_table(i).col(j))));
    }
  }
  report.add(id_prefix + ".4", "GNSconstruction", star_hom, tol);
  report.add(id_prefix + ".5", "GNSconstruction", mult_hom, tol);
  report.add(id_prefix + ".6", "GNSconstruction",
             rel_residual(rep.rep(alg.unit()), Mat::Identity(d, d)), tol);
  report.add(id_prefix + ".7", "GNSconstruction", covariance, tol);
}

void check_modular(const GNSRep& rep, Real tol, CheckReport& report,
                   const std::string& id_prefix) {
  const FiniteStarAlgebra& alg = rep.algebra();
  const int d = alg.dim();
  const Mat& mt = rep.tomita().m;

  Real tdef = 0;
  for (int i = 0; i < d; ++i)
    tdef = std::max(tdef, rel_residual_vec(rep.tomita().apply(rep.lambda_basis(i)),
                                           rep.lambda(alg.star(alg.basis_coeff(i)))));
  report.add(id_prefix + ".1", "modulartheory", tdef, tol);

  report.add(id_prefix + ".2", "modulartheory",
             rel_residual(mt * mt.conjugate(), Mat::Identity(d, d)), tol);

  Mat recon = rep.jconj().m * mat_sqrt(rep.nabla()).conjugate();
  report.add(id_prefix + ".3", "modulartheory", rel_residual(recon, mt), tol);

  const Mat& mj = rep.jconj().m;
  Real jinv = rel_residual(mj * mj.conjugate(), Mat::Identity(d, d));
  Real jsa = rel_residual(Mat(mj.transpose()), mj);
  report.add(id_prefix + ".4", "modulartheory", std::max(jinv, jsa), tol);

  Mat jnj = mj * rep.nabla().conjugate() * mj.conjugate();
  report.add(id_prefix + ".5", "modulartheory",
             rel_residual(jnj, mat_pow(rep.nabla(), Cplx(-1, 0))), tol);

  Real stab = 0;
  for (Real t : kSampledTimes) {
    Real r = 0;
    (void)rep.sigma_matrix(Cplx(t, 0), &r);
    stab = std::max(stab, r);
  }
  report.add(id_prefix + ".6", "modulartheory", stab, tol);

  Real commutant = 0;
  for (int i = 0; i < d; ++i) {
    Mat ji = mj * rep.rep_basis(i).conjugate() * mj.conjugate();
    for (int j = 0; j < d; ++j)
      commutant = std::max(
          commutant, rel_residual(ji * rep.rep_basis(j), rep.rep_basis(j) * ji));
  }
  report.add(id_prefix + ".7", "modulartheory", commutant, tol);

  Real grouplaw = 0;
  for (Real s : kSampledPairsS)
    for (Real t : kSampledPairsT) {
      Mat ss = rep.sigma_matrix(Cplx(s, 0));
      Mat st = rep.sigma_matrix(Cplx(t, 0));
      Mat sst = rep.sigma_matrix(Cplx(s + t, 0));
      grouplaw = std::max(grouplaw, rel_residual(ss * st, sst));
    }
  report.add(id_prefix + ".8", "modulartheory", grouplaw, tol);
}

void check_kms(const GNSRep& rep, Real tol, CheckReport& report, const std::string& id_prefix) {
  const FiniteStarAlgebra& alg = rep.algebra();
  const Weight& w = rep.weight();
  const int d = alg.dim();

  Mat sminus = rep.sigma_matrix(Cplx(0, -1));
  Real kms = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Cplx lhs = w.apply(alg.lmul_table(i).col(j));
      Cplx rhs = w.apply(alg.mul(alg.basis_coeff(j), sminus.col(i)));
      kms = std::max(kms, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
  report.add(id_prefix + ".1", "KMSweight", kms, tol);

  Real invar = 0;
  for (Real t : kSampledTimes) {
    Mat st = rep.sigma_matrix(Cplx(t, 0));
    for (int i = 0; i < d; ++i) {
      Cplx lhs = w.apply(st.col(i));
      Cplx rhs = w.values(i);
      invar = std::max(invar, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
  }
  report.add(id_prefix + ".2", "KMSweight", invar, tol);
}

}  // namespace qg
