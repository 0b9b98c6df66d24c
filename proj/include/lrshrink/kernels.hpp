#pragma once

#include <functional>

#include "lrshrink/types.hpp"

// Hot loops behind covariance estimation and shrinkage-intensity estimation.
//
// `parallel` holds the OpenMP kernels used by the library. They split work by
// output column and reduce per-column partials in a fixed order, so results
// do not depend on the thread count. `reference` holds straightforward serial
// versions kept for testing and benchmarking; they share no code with the
// parallel ones.
//
// Notation: x is N x k, w_m = xc_m xc_m^T is the per-sample cross product of
// the centred row m, and s = N/(N-1) * mean_m(w_m) is the sample covariance.
// The covariance-of-covariance estimate is
//   var(s_ij)        = N/(N-1)^3 * sum_m (w_mij - wbar_ij)^2
//   cov(s_ij, t_ij)  = N/(N-1)^3 * sum_m (w_mij - wbar_ij)(t(w_m)_ij - t(wbar)_ij)
// for a target t that is linear in s.

namespace lrshrink::kernels {

struct DiagonalMoments {
  double sum_var_offdiag = 0.0;  ///< sum_{i!=j} var(s_ij)
  double sum_sq_offdiag = 0.0;   ///< sum_{i!=j} s_ij^2
  Vector var_diag;               ///< var(s_ii) for each i
};

struct TargetMoments {
  double sum_var_offdiag = 0.0;     ///< sum_{i!=j} var(s_ij)
  double sum_cov_offdiag = 0.0;     ///< sum_{i!=j} cov(s_ij, t_ij)
  double sum_sq_dev_offdiag = 0.0;  ///< sum_{i!=j} (s_ij - t_ij)^2
};

/// Linear target map used by the reference kernel: symmetric k x k -> k x k.
using LinearTarget = std::function<Matrix(const Matrix&)>;

Matrix center_columns(const Matrix& x);

namespace parallel {

/// Unbiased sample covariance (divisor N-1).
Matrix covariance(const Matrix& x);

DiagonalMoments diagonal_moments(const Matrix& x);

/// Moments for a target whose off-diagonal entries are t_ij = u + b_i + b_j.
/// `u` (length N) and `b` (N x k, or empty for b = 0) give that decomposition
/// evaluated on each per-sample cross product w_m of the centred data `xc`.
TargetMoments separable_target_moments(const Matrix& xc, const Vector& u, const Matrix& b);

}  // namespace parallel

namespace reference {

Matrix covariance(const Matrix& x);
DiagonalMoments diagonal_moments(const Matrix& x);
/// Forms every w_m explicitly and applies `target` to it.
TargetMoments target_moments(const Matrix& x, const LinearTarget& target);

}  // namespace reference

}  // namespace lrshrink::kernels
