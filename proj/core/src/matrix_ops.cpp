#include "qglab/matrix_ops.hpp"

#include <Eigen/Eigenvalues>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qg {

Mat kron(const Mat& a, const Mat& b) {
  constexpr Eigen::Index kMaxEntries = 1 << 27;
  if (a.rows() * b.rows() > 0 && a.rows() * b.rows() * a.cols() * b.cols() > kMaxEntries)
    throw std::length_error("kron: result dimensions exceed configured limit");
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Real frob(const Mat& m) { return m.norm(); }

Real rel_residual(const Mat& actual, const Mat& ref) {
  return (actual - ref).norm() / std::max(1.0, ref.norm());
}

Real rel_residual_vec(const Vec& actual, const Vec& ref) {
  return (actual - ref).norm() / std::max(1.0, ref.norm());
}

Mat mat_pow(const Mat& h, Cplx z) {
  if (!is_hermitian(h, 1e-10)) throw std::domain_error("mat_pow: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("mat_pow: eigensolver failed");
  const auto& ev = es.eigenvalues();
  const Real scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  Vec powered(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) <= scale * 1e-12)
      throw std::domain_error("mat_pow: operator is not positive definite");
    powered(i) = std::exp(z * std::log(ev(i)));
  }
  return es.eigenvectors() * powered.asDiagonal() * es.eigenvectors().adjoint();
}

Mat mat_sqrt(const Mat& h) { return mat_pow(h, Cplx(0.5, 0.0)); }
Mat mat_inv_sqrt(const Mat& h) { return mat_pow(h, Cplx(-0.5, 0.0)); }

bool is_hermitian(const Mat& m, Real tol) {
  return (m - m.adjoint()).norm() <= tol * std::max(1.0, m.norm());
}

Vec apply_block(const Vec& v, const Mat& m, int pre, int post) {
  const int din = static_cast<int>(m.cols());
  const int dout = static_cast<int>(m.rows());
  assert(v.size() == static_cast<Eigen::Index>(pre) * din * post);
  Vec out(static_cast<Eigen::Index>(pre) * dout * post);
  using RowMat = Eigen::Matrix<Cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  for (int p = 0; p < pre; ++p) {
    Eigen::Map<const RowMat> in(v.data() + static_cast<Eigen::Index>(p) * din * post, din, post);
    Eigen::Map<RowMat> dst(out.data() + static_cast<Eigen::Index>(p) * dout * post, dout, post);
    dst = m * in;
  }
  return out;
}

std::vector<int> swap23_perm(const TripleDims& dims) {
  std::vector<int> perm(dims.total());
  for (int i = 0; i < dims.d1; ++i)
    for (int j = 0; j < dims.d2; ++j)
      for (int k = 0; k < dims.d3; ++k)
        perm[(i * dims.d2 + j) * dims.d3 + k] = (i * dims.d3 + k) * dims.d2 + j;
  return perm;
}

Mat permute_rows(const Mat& x, const std::vector<int>& perm) {
  Mat out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) out.row(perm[r]) = x.row(r);
  return out;
}

Mat permute_cols(const Mat& x, const std::vector<int>& perm) {
  Mat out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) out.col(perm[c]) = x.col(c);
  return out;
}

namespace {

// (a (x) I_p) * x, where a is m-by-m acting on the leading index group.
Mat lmul_leading(const Mat& a, const Mat& x, int p) {
  const int m = static_cast<int>(a.rows());
  Mat out = Mat::Zero(x.rows(), x.cols());
  for (int i = 0; i < m; ++i) {
    auto dst = out.middleRows(static_cast<Eigen::Index>(i) * p, p);
    for (int j = 0; j < m; ++j) {
      if (a(i, j) == Cplx(0, 0)) continue;
      dst.noalias() += a(i, j) * x.middleRows(static_cast<Eigen::Index>(j) * p, p);
    }
  }
  return out;
}

// (I_p (x) a) * x
Mat lmul_trailing(const Mat& a, const Mat& x, int p) {
  const int m = static_cast<int>(a.rows());
  Mat out(x.rows(), x.cols());
  for (int i = 0; i < p; ++i)
    out.middleRows(static_cast<Eigen::Index>(i) * m, m).noalias() =
        a * x.middleRows(static_cast<Eigen::Index>(i) * m, m);
  return out;
}

}  // namespace

Mat lmul_legs(const Mat& a, Legs legs, const Mat& x, const TripleDims& dims) {
  switch (legs) {
    case Legs::one_two:
      assert(a.rows() == dims.d1 * dims.d2 && a.cols() == a.rows());
      return lmul_leading(a, x, dims.d3);
    case Legs::two_three:
      assert(a.rows() == dims.d2 * dims.d3 && a.cols() == a.rows());
      return lmul_trailing(a, x, dims.d1);
    case Legs::one_three: {
      assert(a.rows() == dims.d1 * dims.d3 && a.cols() == a.rows());
      const auto perm = swap23_perm(dims);
      Mat xp = permute_rows(x, perm);
      Mat yp = lmul_leading(a, xp, dims.d2);
      std::vector<int> inv(perm.size());
      for (size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
      return permute_rows(yp, inv);
    }
  }
  throw std::logic_error("lmul_legs: bad legs");
}

Mat rmul_legs(const Mat& x, const Mat& a, Legs legs, const TripleDims& dims) {
  return lmul_legs(a.transpose(), legs, x.transpose(), dims).transpose();
}

Mat embed_legs(const Mat& a, Legs legs, const TripleDims& dims) {
  return lmul_legs(a, legs, Mat::Identity(dims.total(), dims.total()), dims);
}

Mat tensor_swap(int d1, int d2) {
  Mat f = Mat::Zero(d1 * d2, d1 * d2);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j) f(j * d1 + i, i * d2 + j) = 1.0;
  return f;
}

Mat slice_second(const Mat& t, const Vec& xi, const Vec& zeta, int d1, int d2) {
  assert(t.rows() == d1 * d2 && t.cols() == d1 * d2);
  assert(xi.size() == d2 && zeta.size() == d2);
  Mat out(d1, d1);
  for (int a = 0; a < d1; ++a)
    for (int b = 0; b < d1; ++b) {
      Cplx acc(0, 0);
      for (int k = 0; k < d2; ++k)
        for (int l = 0; l < d2; ++l)
          acc += std::conj(zeta(k)) * t(a * d2 + k, b * d2 + l) * xi(l);
      out(a, b) = acc;
    }
  return out;
}

Mat slice_first(const Mat& t, const Vec& xi, const Vec& zeta, int d1, int d2) {
  assert(t.rows() == d1 * d2 && t.cols() == d1 * d2);
  assert(xi.size() == d1 && zeta.size() == d1);
  Mat out(d2, d2);
  for (int a = 0; a < d2; ++a)
    for (int b = 0; b < d2; ++b) {
      Cplx acc(0, 0);
      for (int k = 0; k < d1; ++k)
        for (int l = 0; l < d1; ++l)
          acc += std::conj(zeta(k)) * t(k * d2 + a, l * d2 + b) * xi(l);
      out(a, b) = acc;
    }
  return out;
}

PolarConjParts polar_conj(const ConjLinearOp& k) {
  Eigen::JacobiSVD<Mat> svd(k.m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) <= 1e-12 * sv(0))
    throw std::domain_error("polar_conj: operator is singular (smallest singular value " +
                            std::to_string(sv.size() ? sv(sv.size() - 1) : 0.0) + ")");
  Mat l = k.m.transpose() * k.m.conjugate();
  l = 0.5 * (l + Mat(l.adjoint()));
  Mat i = k.m * mat_inv_sqrt(l).conjugate();
  PolarConjParts parts{ConjLinearOp{std::move(i)}, std::move(l)};

  const Mat recon = parts.i_part.m * mat_sqrt(parts.l_part).conjugate();
  if (rel_residual(recon, k.m) > 1e-10)
    throw std::runtime_error("polar_conj: reconstruction failed");
  const Mat anti = parts.i_part.m * parts.i_part.m.transpose().conjugate();
  if (rel_residual(anti, Mat::Identity(anti.rows(), anti.cols())) > 1e-10)
    throw std::runtime_error("polar_conj: factor is not anti-unitary");
  return parts;
}

SpanSolver::SpanSolver(Mat basis_cols) : basis_(std::move(basis_cols)), cod_(basis_) {}

int SpanSolver::rank() const { return static_cast<int>(cod_.rank()); }

Vec SpanSolver::solve(const Vec& v, Real* residual) const {
  Vec c = cod_.solve(v);
  if (residual) *residual = rel_residual_vec(basis_ * c, v);
  return c;
}

Real SpanSolver::membership_residual(const Vec& v) const {
  Real r = 0;
  (void)solve(v, &r);
  return r;
}

Mat solve_linear_map(const Mat& inputs, const Mat& outputs, Real* residual) {
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(inputs.transpose());
  Mat m = cod.solve(outputs.transpose()).transpose();
  if (residual) *residual = rel_residual(m * inputs, outputs);
  return m;
}

int matrix_rank(const Mat& m, Real tol) {
  if (m.size() == 0) return 0;
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(m);
  cod.setThreshold(tol);
  return static_cast<int>(cod.rank());
}

}  // namespace qg
