#pragma once

#include <vector>

#include "lrshrink/composition.hpp"
#include "lrshrink/types.hpp"

namespace lrshrink {

enum class Representation { Alr, Clr, Basis };

std::string_view to_string(Representation repr);

/// Symmetric covariance tagged with its representation.
///
/// ALR form is (D-1) x (D-1) relative to reference part `ref()`; CLR and
/// basis forms are D x D. Labels always describe all D parts.
class CovMatrix {
 public:
  static CovMatrix alr(Matrix values, Index ref, Labels labels = {});
  static CovMatrix clr(Matrix values, Labels labels = {});
  static CovMatrix basis(Matrix values, Labels labels = {});

  const Matrix& values() const noexcept { return values_; }
  Representation representation() const noexcept { return repr_; }
  /// Reference part of an ALR covariance; -1 otherwise.
  Index ref() const noexcept { return ref_; }
  /// Number of parts D of the underlying composition.
  Index parts() const noexcept { return repr_ == Representation::Alr ? values_.rows() + 1 : values_.rows(); }
  const Labels& labels() const noexcept { return labels_; }
  /// Original part index of each row/column.
  std::vector<Index> part_indices() const;

 private:
  CovMatrix(Matrix values, Representation repr, Index ref, Labels labels);

  Matrix values_;
  Representation repr_;
  Index ref_;
  Labels labels_;
};

/// Partial correlations; row r describes original part `parts[r]`.
struct PartialCorrMatrix {
  Matrix values;
  std::vector<Index> parts;
  Labels labels;
};

/// Unbiased sample covariance, divisor N-1.
Matrix sample_covariance(const Matrix& x);
CovMatrix sample_covariance(const AlrMatrix& x);
CovMatrix sample_covariance(const ClrMatrix& y);
CovMatrix sample_covariance(const BasisMatrix& b);

// Elementwise transformations between logratio and basis covariances.
// Sigma is ALR, Gamma is CLR, Omega is basis.

CovMatrix sigma_to_gamma(const CovMatrix& sigma);
CovMatrix gamma_to_sigma(const CovMatrix& gamma, Index ref);
CovMatrix omega_to_sigma(const CovMatrix& omega, Index ref);
CovMatrix omega_to_gamma(const CovMatrix& omega);
/// omega_ij = gamma_ij + beta_i + beta_j with beta computed from the given
/// log basis. There is no default basis: the size variation is not
/// identifiable from relative data alone.
CovMatrix logratio_to_omega(const CovMatrix& gamma_or_sigma, const BasisMatrix& basis, const CompositionMatrix& p);
/// Re-expresses an ALR covariance relative to another reference part.
CovMatrix change_reference(const CovMatrix& sigma, Index new_ref);

/// Moore-Penrose pseudoinverse of a symmetric matrix via its eigendecomposition.
/// Eigenvalues below k * max|lambda| * 1e-12 are treated as zero.
Matrix pseudoinverse(const Matrix& m);

/// Ratio of extreme eigenvalues of a symmetric matrix; infinity when singular.
double condition_number(const Matrix& m);

/// Partial correlations r_ij = -p_ij / sqrt(p_ii p_jj) of a precision matrix.
Matrix partial_correlation_from_precision(const Matrix& precision);

/// ALR and basis input are inverted directly and must have condition number
/// below 1e12 (SingularCovariance otherwise); CLR input goes through the
/// pseudoinverse and yields all D parts.
PartialCorrMatrix partial_correlation(const CovMatrix& c);

}  // namespace lrshrink
