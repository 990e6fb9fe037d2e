#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qglab/matrix_ops.hpp"
#include "qglab/report.hpp"

namespace qg {

// A *-closed unital matrix subalgebra, described by a linearly independent
// basis of ambient matrices. All derived arithmetic (products, star, unit)
// is carried out on the coefficient space C^dim through precomputed tables,
// so the ambient dimension only matters during construction.
class FiniteStarAlgebra {
 public:
  // Derives multiplication/star tables and the unit by least squares.
  // Closure defects accumulate into build_residual(); they are reported by
  // check_star_algebra rather than thrown.
  static FiniteStarAlgebra from_basis(std::string label, std::vector<Mat> basis);

  const std::string& label() const { return label_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  int ambient_dim() const { return ambient_dim_; }
  const std::vector<Mat>& basis() const { return basis_; }
  Real build_residual() const { return build_residual_; }

  Vec coeffs(const Mat& x, Real* residual = nullptr) const;
  Mat to_element(const Vec& c) const;

  const Vec& unit() const { return unit_coeffs_; }
  Vec mul(const Vec& x, const Vec& y) const { return lmul_matrix(x) * y; }
  Vec star(const Vec& x) const { return star_mat_ * x.conjugate(); }
  Mat lmul_matrix(const Vec& x) const;
  Mat rmul_matrix(const Vec& x) const;
  const Mat& star_matrix() const { return star_mat_; }
  const Mat& lmul_table(int i) const { return lmul_[i]; }
  const Mat& rmul_table(int i) const { return rmul_[i]; }
  Vec basis_coeff(int i) const;

  FiniteStarAlgebra() = default;

 private:
  std::string label_;
  int ambient_dim_ = 0;
  std::vector<Mat> basis_;
  std::optional<SpanSolver> span_;
  std::vector<Mat> lmul_, rmul_;
  Mat star_mat_;
  Vec unit_coeffs_;
  Real build_residual_ = 0;
};

// A linear functional on an algebra, given by its values on the basis.
// Faithfulness and positivity are properties of the induced Gram matrix and
// are checked, not assumed.
struct Weight {
  Vec values;

  Cplx apply(const Vec& coeffs) const { return (values.transpose() * coeffs)(0); }
  Mat gram(const FiniteStarAlgebra& alg) const;
};

// GNS realization of a faithful weight, in orthonormal coordinates obtained
// from the Hermitian square root of the Gram matrix, together with the
// modular data (T, nabla, J) of the induced inner product.
class GNSRep {
 public:
  static GNSRep build(const FiniteStarAlgebra& alg, const Weight& w);

  const FiniteStarAlgebra& algebra() const { return *alg_; }
  const Weight& weight() const { return weight_; }
  int dim() const { return static_cast<int>(gram_.rows()); }

  const Mat& gram() const { return gram_; }
  const Mat& lroot() const { return lroot_; }
  const Mat& lroot_inv() const { return lroot_inv_; }

  Vec lambda(const Vec& coeffs) const { return lroot_ * coeffs; }
  Vec lambda_basis(int i) const { return lroot_.col(i); }
  Vec lambda_unit() const;
  Mat rep(const Vec& coeffs) const;
  Mat rep_basis(int i) const { return rep_cache_[i]; }
  // Inverse of rep on its image; the residual measures distance from rep(A).
  Vec op_to_coeffs(const Mat& op, Real* residual = nullptr) const;

  const ConjLinearOp& tomita() const { return tomita_; }
  const Mat& nabla() const { return nabla_; }
  const ConjLinearOp& jconj() const { return jconj_; }
  Mat nabla_pow(Cplx z) const { return mat_pow(nabla_, z); }

  // Modular automorphism sigma_z on coefficients; real z is the usual group,
  // complex z the analytic continuation (sigma_{-i} is conjugation by nabla).
  Vec sigma(const Vec& coeffs, Cplx z, Real* residual = nullptr) const;
  Mat sigma_matrix(Cplx z, Real* residual = nullptr) const;

  GNSRep() = default;

 private:
  const FiniteStarAlgebra* alg_ = nullptr;
  Weight weight_;
  Mat gram_, lroot_, lroot_inv_;
  std::vector<Mat> rep_cache_;
  std::optional<SpanSolver> rep_span_;
  ConjLinearOp tomita_, jconj_;
  Mat nabla_;
};

inline constexpr Real kSampledTimes[] = {0.3, 1.0, -0.7};
inline constexpr Real kSampledPairsS[] = {0.3, 1.0};
inline constexpr Real kSampledPairsT[] = {-0.7, 0.4};

// Closure of products and adjoints, unit behaviour, associativity of the
// derived tables, linear independence of the basis.
void check_star_algebra(const FiniteStarAlgebra& alg, Real tol, CheckReport& report,
                        const std::string& id_prefix);

// Gram positivity, representation homomorphism laws, GNS covariance.
void check_gns(const GNSRep& rep, Real tol, CheckReport& report, const std::string& id_prefix);

// Tomita data: involutions, polar reconstruction, J nabla J, sigma stability
// of the represented algebra, commutant property, sigma group law.
void check_modular(const GNSRep& rep, Real tol, CheckReport& report,
                   const std::string& id_prefix);

// KMS identity w(xy) = w(y sigma_{-i}(x)) and sigma_t-invariance of w.
void check_kms(const GNSRep& rep, Real tol, CheckReport& report, const std::string& id_prefix);

}  // namespace qg
