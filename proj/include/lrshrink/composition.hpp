#pragma once

#include <span>

#include "lrshrink/types.hpp"

namespace lrshrink {

// Data representations of compositional samples. Rows are samples, columns
// are parts. Every type validates its invariants on construction, so holding
// one is proof that the data are well-formed.

/// Nonnegative integer counts; the discrete basis of a composition.
class CountMatrix {
 public:
  explicit CountMatrix(Matrix values, Labels labels = {});

  const Matrix& values() const noexcept { return values_; }
  const Labels& labels() const noexcept { return labels_; }
  Index samples() const noexcept { return values_.rows(); }
  Index parts() const noexcept { return values_.cols(); }

  Vector row_totals() const { return values_.rowwise().sum(); }
  bool has_zeros() const { return (values_.array() == 0.0).any(); }
  bool row_has_zeros(Index row) const { return (values_.row(row).array() == 0.0).any(); }

  CountMatrix select_rows(std::span<const Index> rows) const;
  /// Column subset; rows whose total over the subset vanishes are rejected.
  CountMatrix select_parts(std::span<const Index> parts) const;

 private:
  Matrix values_;
  Labels labels_;
};

/// Strictly positive rows summing to one.
class CompositionMatrix {
 public:
  /// Rows within kSumTolerance of unit sum are renormalized; others rejected.
  explicit CompositionMatrix(Matrix values, Labels labels = {});

  const Matrix& values() const noexcept { return values_; }
  const Labels& labels() const noexcept { return labels_; }
  Index samples() const noexcept { return values_.rows(); }
  Index parts() const noexcept { return values_.cols(); }

  CompositionMatrix select_rows(std::span<const Index> rows) const;

 private:
  Matrix values_;
  Labels labels_;
};

/// Additive logratios log(p_j / p_ref). The reference column is removed and
/// the remaining parts keep their original order.
class AlrMatrix {
 public:
  AlrMatrix(Matrix values, Index ref, Labels labels = {});

  const Matrix& values() const noexcept { return values_; }
  /// Labels of all D parts (including the reference), if known.
  const Labels& labels() const noexcept { return labels_; }
  Index ref() const noexcept { return ref_; }
  Index samples() const noexcept { return values_.rows(); }
  Index parts() const noexcept { return values_.cols() + 1; }

 private:
  Matrix values_;
  Index ref_;
  Labels labels_;
};

/// Centred logratios log(p_j / g(p)); rows sum to zero.
class ClrMatrix {
 public:
  explicit ClrMatrix(Matrix values, Labels labels = {});

  const Matrix& values() const noexcept { return values_; }
  const Labels& labels() const noexcept { return labels_; }
  Index samples() const noexcept { return values_.rows(); }
  Index parts() const noexcept { return values_.cols(); }

 private:
  Matrix values_;
  Labels labels_;
};

/// Logarithms of a basis m = t * p.
class BasisMatrix {
 public:
  explicit BasisMatrix(Matrix values, Labels labels = {});

  const Matrix& values() const noexcept { return values_; }
  const Labels& labels() const noexcept { return labels_; }
  Index samples() const noexcept { return values_.rows(); }
  Index parts() const noexcept { return values_.cols(); }

 private:
  Matrix values_;
  Labels labels_;
};

CompositionMatrix closure(const Matrix& raw, Labels labels = {});
/// Closure of counts. Zero counts must be imputed first.
CompositionMatrix closure(const CountMatrix& counts);

AlrMatrix alr(const CompositionMatrix& p, Index ref);
/// Inverse ALR. Rows are shifted by their maximum before exponentiating.
CompositionMatrix alr_inverse(const AlrMatrix& x);
ClrMatrix clr(const CompositionMatrix& p);

/// Constant-size basis (t = 1): log p.
BasisMatrix log_basis(const CompositionMatrix& p);
/// Counts as their own basis: log m. Fails with ZeroEntry on unimputed zeros.
BasisMatrix log_basis(const CountMatrix& counts);

}  // namespace lrshrink
