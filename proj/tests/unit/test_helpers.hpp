#pragma once

#include <cstdint>

#include "qglab/types.hpp"

namespace qgtest {

// Deterministic pseudo-random complex fills so property tests are repeatable
// without an RNG dependency.
class Lcg {
 public:
  explicit Lcg(std::uint64_t seed) : state_(seed ? seed : 1) {}

  double uniform() {  // in [-1, 1)
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state_ >> 11) / 4503599627370496.0 - 1.0;
  }
  qg::Cplx cplx() {
    const double re = uniform();
    return {re, uniform()};
  }
  qg::Vec vec(int n) {
    qg::Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx();
    return v;
  }
  qg::Mat mat(int r, int c) {
    qg::Mat m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = cplx();
    return m;
  }

 private:
  std::uint64_t state_;
};

}  // namespace qgtest
