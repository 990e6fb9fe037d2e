#pragma once

#include <array>
#include <vector>

#include "qglab/types.hpp"

namespace qg {

// Conventions used throughout:
//  - inner products are linear in the first slot: inner(u, v) = sum_i u_i conj(v_i);
//  - tensor/Kronecker index order is row-major, (i, j) -> i * d2 + j, matching kron().

inline Cplx inner(const Vec& u, const Vec& v) { return v.dot(u); }

// omega_{xi,zeta}(T) = inner(T xi, zeta)
inline Cplx vector_functional(const Mat& t, const Vec& xi, const Vec& zeta) {
  return zeta.dot(t * xi);
}

Mat kron(const Mat& a, const Mat& b);

Real frob(const Mat& m);

// Frobenius distance scaled by max(1, ||ref||_F).
Real rel_residual(const Mat& actual, const Mat& ref);
Real rel_residual_vec(const Vec& actual, const Vec& ref);

// h^z for Hermitian positive-definite h, via the spectral decomposition.
Mat mat_pow(const Mat& h, Cplx z);
Mat mat_sqrt(const Mat& h);
Mat mat_inv_sqrt(const Mat& h);

bool is_hermitian(const Mat& m, Real tol = kDefaultTol);

// Contracts the middle axis of a (pre, din, post)-shaped vector with m (dout x din).
Vec apply_block(const Vec& v, const Mat& m, int pre, int post);

// --- operators on a three-fold tensor space -------------------------------

struct TripleDims {
  int d1, d2, d3;
  int total() const { return d1 * d2 * d3; }
};

enum class Legs { one_two, two_three, one_three };

// Row-index permutation exchanging axes 2 and 3: (i,j,k) -> (i,k,j).
std::vector<int> swap23_perm(const TripleDims& dims);
Mat permute_rows(const Mat& x, const std::vector<int>& perm);   // out.row(perm[r]) = x.row(r)
Mat permute_cols(const Mat& x, const std::vector<int>& perm);   // out.col(perm[c]) = x.col(c)

// Structured products with an operator acting on two of the three legs; these
// avoid materializing the ambient embedding of `a`.
Mat lmul_legs(const Mat& a, Legs legs, const Mat& x, const TripleDims& dims);
Mat rmul_legs(const Mat& x, const Mat& a, Legs legs, const TripleDims& dims);
Mat embed_legs(const Mat& a, Legs legs, const TripleDims& dims);

// Swap matrix F with F (u (x) v) = v (x) u.
Mat tensor_swap(int d1, int d2);

// (id (x) omega_{xi,zeta})(T) for T on H1 (x) H2; result acts on H1.
Mat slice_second(const Mat& t, const Vec& xi, const Vec& zeta, int d1, int d2);
// (omega_{xi,zeta} (x) id)(T); result acts on H2.
Mat slice_first(const Mat& t, const Vec& xi, const Vec& zeta, int d1, int d2);

// --- conjugate-linear operators -------------------------------------------

// v -> m * conj(v).  The adjoint of a conjugate-linear K is the conjugate-linear
// operator K^* with inner(K v, w) = inner(K^* w, v); in matrix form m^T.
struct ConjLinearOp {
  Mat m;

  Vec apply(const Vec& v) const { return m * v.conjugate(); }
  ConjLinearOp adjoint() const { return {m.transpose()}; }
  // this o other is linear: m * conj(other.m)
  Mat compose(const ConjLinearOp& other) const { return m * other.m.conjugate(); }
  ConjLinearOp after_linear(const Mat& t) const { return {m * t.conjugate()}; }
  ConjLinearOp before_linear(const Mat& t) const { return {t * m}; }

  static ConjLinearOp conjugation(int n) { return {Mat::Identity(n, n)}; }
};

// Polar parts of an invertible conjugate-linear k: k = i_part o sqrt(l_part),
// with l_part = (k^* k) Hermitian positive and i_part anti-unitary.
struct PolarConjParts {
  ConjLinearOp i_part;
  Mat l_part;
};
PolarConjParts polar_conj(const ConjLinearOp& k);

// --- span / least-squares helpers ------------------------------------------

class SpanSolver {
 public:
  explicit SpanSolver(Mat basis_cols);

  int rank() const;
  // Coefficients c with basis * c ~= v; optional relative residual.
  Vec solve(const Vec& v, Real* residual = nullptr) const;
  Real membership_residual(const Vec& v) const;
  const Mat& basis() const { return basis_; }

 private:
  Mat basis_;
  Eigen::CompleteOrthogonalDecomposition<Mat> cod_;
};

// Least-squares M with M * inputs ~= outputs (columns are samples).
Mat solve_linear_map(const Mat& inputs, const Mat& outputs, Real* residual = nullptr);

int matrix_rank(const Mat& m, Real tol = 1e-10);

}  // namespace qg
