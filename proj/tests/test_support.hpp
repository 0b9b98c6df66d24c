#pragma once

// Seeded generators for property tests.

#include <cmath>
#include <random>

#include "lrshrink/composition.hpp"
#include "lrshrink/error.hpp"

namespace lrshrink::test {

using Gen = std::mt19937_64;

inline Matrix normal_matrix(Gen& g, Index rows, Index cols, double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = n(g);
  }
  return m;
}

inline Index uniform_index(Gen& g, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(g);
}

inline double uniform(Gen& g, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }

/// Random compositions with log-parts spread over a few units.
inline CompositionMatrix random_composition(Gen& g, Index n, Index d, double spread = 1.0) {
  return closure(normal_matrix(g, n, d, spread).array().exp().matrix());
}

/// Well-conditioned symmetric positive definite k x k matrix.
inline Matrix random_spd(Gen& g, Index k) {
  const Matrix a = normal_matrix(g, k, k);
  Matrix s = a * a.transpose() / static_cast<double>(k);
  s.diagonal().array() += 0.5;
  return 0.5 * (s + s.transpose());
}

inline Vector random_alpha(Gen& g, Index d, double lo = 0.1, double hi = 3.0) {
  Vector a(d);
  for (Index i = 0; i < d; ++i) a(i) = uniform(g, lo, hi);
  return a;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

template <class F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::logic_error("expected an lrshrink::Error");
}

}  // namespace lrshrink::test
