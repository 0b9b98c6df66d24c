#include "lrshrink/composition.hpp"

#include <cmath>
#include <string>

#include "lrshrink/error.hpp"

namespace lrshrink {
namespace {

void check_labels(const Labels& labels, Index parts) {
  if (!labels.empty() && static_cast<Index>(labels.size()) != parts) {
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(parts) + " part labels, got " +
                                              std::to_string(labels.size()));
  }
}

void check_parts(Index parts) {
  if (parts < 3) {
    throw Error(ErrorCode::DimensionTooSmall, "compositions need at least 3 parts, got " + std::to_string(parts));
  }
}

void check_finite(const Matrix& values, const char* what) {
  if (!values.allFinite()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
}

Matrix gather_rows(const Matrix& values, std::span<const Index> rows) {
  Matrix out(static_cast<Index>(rows.size()), values.cols());
  for (Index r = 0; r < out.rows(); ++r) {
    const Index src = rows[static_cast<std::size_t>(r)];
    if (src < 0 || src >= values.rows()) throw Error(ErrorCode::InvalidArgument, "row index out of range");
    out.row(r) = values.row(src);
  }
  return out;
}

}  // namespace

CountMatrix::CountMatrix(Matrix values, Labels labels) : values_(std::move(values)), labels_(std::move(labels)) {
  if (values_.rows() < 1) throw Error(ErrorCode::TooFewSamples, "count matrix has no rows");
  check_parts(values_.cols());
  check_labels(labels_, values_.cols());
  for (Index i = 0; i < values_.rows(); ++i) {
    double total = 0.0;
    for (Index j = 0; j < values_.cols(); ++j) {
      const double v = values_(i, j);
      if (!std::isfinite(v) || v < 0.0 || v != std::floor(v)) {
        throw Error(ErrorCode::NotACountMatrix, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                                    ") is not a nonnegative integer");
      }
      total += v;
    }
    if (total <= 0.0) throw Error(ErrorCode::EmptyRow, "row " + std::to_string(i + 1) + " has total 0");
  }
}

CountMatrix CountMatrix::select_rows(std::span<const Index> rows) const {
  return CountMatrix(gather_rows(values_, rows), labels_);
}

CountMatrix CountMatrix::select_parts(std::span<const Index> parts) const {
  Matrix out(values_.rows(), static_cast<Index>(parts.size()));
  Labels labels;
  for (Index c = 0; c < out.cols(); ++c) {
    const Index src = parts[static_cast<std::size_t>(c)];
    if (src < 0 || src >= values_.cols()) throw Error(ErrorCode::InvalidArgument, "part index out of range");
    out.col(c) = values_.col(src);
    if (!labels_.empty()) labels.push_back(labels_[static_cast<std::size_t>(src)]);
  }
  return CountMatrix(std::move(out), std::move(labels));
}

CompositionMatrix::CompositionMatrix(Matrix values, Labels labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
  check_parts(values_.cols());
  check_labels(labels_, values_.cols());
  check_finite(values_, "composition");
  if ((values_.array() <= 0.0).any()) {
    throw Error(ErrorCode::NonPositiveEntry, "compositions must be strictly positive");
  }
  for (Index i = 0; i < values_.rows(); ++i) {
    const double total = values_.row(i).sum();
    if (std::abs(total - 1.0) > kSumTolerance) {
      throw Error(ErrorCode::NotAComposition, "row " + std::to_string(i + 1) + " sums to " + std::to_string(total));
    }
    values_.row(i) /= total;
  }
}

CompositionMatrix CompositionMatrix::select_rows(std::span<const Index> rows) const {
  return CompositionMatrix(gather_rows(values_, rows), labels_);
}

AlrMatrix::AlrMatrix(Matrix values, Index ref, Labels labels)
    : values_(std::move(values)), ref_(ref), labels_(std::move(labels)) {
  check_parts(values_.cols() + 1);
  if (ref_ < 0 || ref_ > values_.cols()) {
    throw Error(ErrorCode::BadReferenceIndex, "reference " + std::to_string(ref_) + " outside [0, " +
                                                  std::to_string(values_.cols()) + "]");
  }
  check_labels(labels_, values_.cols() + 1);
  check_finite(values_, "ALR matrix");
}

ClrMatrix::ClrMatrix(Matrix values, Labels labels) : values_(std::move(values)), labels_(std::move(labels)) {
  check_parts(values_.cols());
  check_labels(labels_, values_.cols());
  check_finite(values_, "CLR matrix");
  for (Index i = 0; i < values_.rows(); ++i) {
    if (std::abs(values_.row(i).sum()) > kSumTolerance) {
      throw Error(ErrorCode::InvalidArgument, "CLR row " + std::to_string(i + 1) + " does not sum to zero");
    }
  }
}

BasisMatrix::BasisMatrix(Matrix values, Labels labels) : values_(std::move(values)), labels_(std::move(labels)) {
  check_parts(values_.cols());
  check_labels(labels_, values_.cols());
  check_finite(values_, "log basis");
}

CompositionMatrix closure(const Matrix& raw, Labels labels) {
  check_parts(raw.cols());
  check_finite(raw, "closure input");
  if ((raw.array() <= 0.0).any()) {
    throw Error(ErrorCode::NonPositiveEntry, "closure needs strictly positive entries; impute zeros first");
  }
  Matrix out = raw;
  for (Index i = 0; i < out.rows(); ++i) out.row(i) /= out.row(i).sum();
  return CompositionMatrix(std::move(out), std::move(labels));
}

CompositionMatrix closure(const CountMatrix& counts) { return closure(counts.values(), counts.labels()); }

AlrMatrix alr(const CompositionMatrix& p, Index ref) {
  const Index d = p.parts();
  if (ref < 0 || ref >= d) {
    throw Error(ErrorCode::BadReferenceIndex, "reference " + std::to_string(ref) + " outside [0, " +
                                                  std::to_string(d - 1) + "]");
  }
  const Matrix logs = p.values().array().log().matrix();
  Matrix out(p.samples(), d - 1);
  for (Index j = 0, c = 0; j < d; ++j) {
    if (j == ref) continue;
    out.col(c++) = logs.col(j) - logs.col(ref);
  }
  return AlrMatrix(std::move(out), ref, p.labels());
}

CompositionMatrix alr_inverse(const AlrMatrix& x) {
  const Index d = x.parts();
  const Matrix& v = x.values();
  if (v.size() > 0 && v.cwiseAbs().maxCoeff() > 700.0) {
    throw Error(ErrorCode::OverflowRisk, "|x| > 700 cannot be exponentiated safely");
  }
  Matrix out(x.samples(), d);
  for (Index i = 0; i < v.rows(); ++i) {
    const double shift = std::max(0.0, v.row(i).maxCoeff());
    double total = 0.0;
    for (Index j = 0, c = 0; j < d; ++j) {
      const double e = j == x.ref() ? std::exp(-shift) : std::exp(v(i, c++) - shift);
      out(i, j) = e;
      total += e;
    }
    out.row(i) /= total;
  }
  return CompositionMatrix(std::move(out), x.labels());
}

ClrMatrix clr(const CompositionMatrix& p) {
  Matrix logs = p.values().array().log().matrix();
  const Vector means = logs.rowwise().mean();
  logs.colwise() -= means;
  return ClrMatrix(std::move(logs), p.labels());
}

BasisMatrix log_basis(const CompositionMatrix& p) {
  return BasisMatrix(p.values().array().log().matrix(), p.labels());
}

BasisMatrix log_basis(const CountMatrix& counts) {
  if (counts.has_zeros()) throw Error(ErrorCode::ZeroEntry, "zero counts reached the log; impute them first");
  return BasisMatrix(counts.values().array().log().matrix(), counts.labels());
}

}  // namespace lrshrink
