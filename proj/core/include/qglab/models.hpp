#pragma once

#include <cstdint>

#include "qglab/groupoid.hpp"
#include "qglab/qgroupoid.hpp"

namespace qg {

// Deliberate defects injected while a model is assembled; this is what the
// negative-control fixtures switch on. A default-constructed Tamper is inert.
struct Tamper {
  Real e_noise = 0;  // amplitude of self-adjoint noise added to E
  std::uint64_t e_seed = 1;
  int phi_arrow = -1;  // when >= 0, φ is set to phi_value there and on the inverse
  Real phi_value = 0;

  bool active() const { return e_noise != 0 || phi_arrow >= 0; }
};

// Commutative model: functions on arrows, acting diagonally on C^|G|.
// Δf(p,q) = f(pq), E = indicator of composable pairs, B/C = src/tgt
// pullbacks, φ(f) = Σ f(p)·m(src p), ψ(f) = Σ f(p)·n(tgt p).
QGTuple function_model(const FiniteGroupoid& g, const HaarWeights& hw,
                       const Tamper& tamper = {});

// Convolution model: span{λ_p} in the left regular representation on
// l²(arrows), Δλ_p = λ_p⊗λ_p, E = Σ_u λ_u⊗λ_u, B = C = span of the unit
// arrows, φ(λ_p) = [p unit]·m(p), ψ(λ_p) = [p unit]·n(p).
QGTuple convolution_model(const FiniteGroupoid& g, const HaarWeights& hw,
                          const Tamper& tamper = {});

// Coefficient permutation sending basis element p to inv(p). This is the
// antipode of both models and serves as the independent combinatorial oracle.
Mat inversion_oracle(const FiniteGroupoid& g);

}  // namespace qg
