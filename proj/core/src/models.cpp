#include "qglab/models.hpp"

#include <random>
#include <stdexcept>

namespace qg {

namespace {

Real unit_double(std::mt19937_64& rng) {
  // Top 53 bits -> [0, 1); identical across platforms, unlike the
  // distribution adapters.
  return static_cast<Real>(rng() >> 11) * 0x1.0p-53;
}

void apply_tamper(QGTuple& t, const FiniteGroupoid& g, const Tamper& tamper) {
  if (tamper.e_noise != 0) {
    std::mt19937_64 rng(tamper.e_seed);
    const int d2 = t.A.dim() * t.A.dim();
    Vec raw(d2);
    for (int i = 0; i < d2; ++i) {
      const Real re = 2 * unit_double(rng) - 1;
      const Real im = 2 * unit_double(rng) - 1;
      raw(i) = Cplx(re, im);
    }
    const TensorOps ops(t.A);
    t.e_coef += tamper.e_noise * Vec(0.5 * (raw + ops.star2(raw)));
  }
  if (tamper.phi_arrow >= 0) {
    if (tamper.phi_arrow >= t.A.dim())
      throw std::invalid_argument("tamper: phi arrow out of range");
    // Both p and inv(p), so the Gram matrix stays Hermitian and GNS still
    // builds; the invariance identities are what break.
    t.phi.values(tamper.phi_arrow) = Cplx(tamper.phi_value, 0);
    t.phi.values(g.inv[tamper.phi_arrow]) = Cplx(tamper.phi_value, 0);
  }
}

void finish_common(QGTuple& t, const FiniteGroupoid& g, const Tamper& tamper) {
  const int nu = g.n_units();
  t.rbc = Mat::Identity(nu, nu);
  t.nu.values = Vec::Ones(nu);
  t.mu.values = t.rbc.inverse().transpose() * t.nu.values;
  apply_tamper(t, g, tamper);
}

}  // namespace

QGTuple function_model(const FiniteGroupoid& g, const HaarWeights& hw,
                       const Tamper& tamper) {
  const int n = g.n_arrows(), nu = g.n_units();
  std::vector<Mat> abasis(n);
  for (int p = 0; p < n; ++p) {
    Mat m = Mat::Zero(n, n);
    m(p, p) = 1;
    abasis[p] = std::move(m);
  }

  QGTuple t;
  t.A = FiniteStarAlgebra::from_basis("K(G)", abasis);

  std::vector<Mat> bbasis(nu), cbasis(nu);
  t.emb_b = Mat::Zero(n, nu);
  t.emb_c = Mat::Zero(n, nu);
  for (int u = 0; u < nu; ++u) {
    Mat fb = Mat::Zero(n, n), fc = Mat::Zero(n, n);
    for (int p = 0; p < n; ++p) {
      if (g.src[p] == u) {
        fb(p, p) = 1;
        t.emb_b(p, u) = 1;
      }
      if (g.tgt[p] == u) {
        fc(p, p) = 1;
        t.emb_c(p, u) = 1;
      }
    }
    bbasis[u] = std::move(fb);
    cbasis[u] = std::move(fc);
  }
  t.B = FiniteStarAlgebra::from_basis("B", bbasis);
  t.C = FiniteStarAlgebra::from_basis("C", cbasis);

  t.delta_coef = Mat::Zero(n * n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const int r = g.comp(p, q);
      if (r >= 0) t.delta_coef(p * n + q, r) = 1;
    }
  t.e_coef = Vec::Zero(n * n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (g.composable(p, q)) t.e_coef(p * n + q) = 1;

  t.phi.values.resize(n);
  t.psi.values.resize(n);
  for (int p = 0; p < n; ++p) {
    t.phi.values(p) = Cplx(hw.m(g.src[p]), 0);
    t.psi.values(p) = Cplx(hw.n(g.tgt[p]), 0);
  }
  finish_common(t, g, tamper);
  return t;
}

QGTuple convolution_model(const FiniteGroupoid& g, const HaarWeights& hw,
                          const Tamper& tamper) {
  const int n = g.n_arrows(), nu = g.n_units();
  std::vector<Mat> abasis(n);
  for (int p = 0; p < n; ++p) {
    Mat m = Mat::Zero(n, n);
    for (int q = 0; q < n; ++q) {
      const int r = g.comp(p, q);
      if (r >= 0) m(r, q) = 1;
    }
    abasis[p] = std::move(m);
  }

  QGTuple t;
  t.A = FiniteStarAlgebra::from_basis("C*(G)", abasis);

  std::vector<Mat> ubasis(nu);
  t.emb_b = Mat::Zero(n, nu);
  for (int u = 0; u < nu; ++u) {
    const int ua = g.unit_arrow[u];
    if (ua < 0)
      throw std::invalid_argument("convolution_model: unit lacks an identity arrow");
    ubasis[u] = abasis[ua];
    t.emb_b(ua, u) = 1;
  }
  t.B = FiniteStarAlgebra::from_basis("B", ubasis);
  t.C = FiniteStarAlgebra::from_basis("C", ubasis);
  t.emb_c = t.emb_b;

  t.delta_coef = Mat::Zero(n * n, n);
  for (int p = 0; p < n; ++p) t.delta_coef(p * n + p, p) = 1;
  t.e_coef = Vec::Zero(n * n);
  for (int u = 0; u < nu; ++u) {
    const int ua = g.unit_arrow[u];
    t.e_coef(ua * n + ua) = 1;
  }

  t.phi.values = Vec::Zero(n);
  t.psi.values = Vec::Zero(n);
  for (int u = 0; u < nu; ++u) {
    const int ua = g.unit_arrow[u];
    t.phi.values(ua) = Cplx(hw.m(u), 0);
    t.psi.values(ua) = Cplx(hw.n(u), 0);
  }
  finish_common(t, g, tamper);
  return t;
}

Mat inversion_oracle(const FiniteGroupoid& g) {
  const int n = g.n_arrows();
  Mat p = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) p(g.inv[i], i) = 1;
  return p;
}

}  // namespace qg
