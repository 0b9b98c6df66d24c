#include "lrshrink/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lrshrink/error.hpp"
#include "lrshrink/kernels.hpp"

namespace lrshrink {
namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kMaxConditionNumber = 1e12;

void require_repr(const CovMatrix& c, Representation expected, const char* op) {
  if (c.representation() != expected) {
    throw Error(ErrorCode::RepresentationMismatch, std::string(op) + " expects a " +
                                                       std::string(to_string(expected)) + " covariance, got " +
                                                       std::string(to_string(c.representation())));
  }
}

void require_ref(Index ref, Index parts) {
  if (ref < 0 || ref >= parts) {
    throw Error(ErrorCode::BadReferenceIndex,
                "reference " + std::to_string(ref) + " outside [0, " + std::to_string(parts - 1) + "]");
  }
}

// gamma_ij = m_ij - mean_k m_ik - mean_k m_kj + mean_kl m_kl
Matrix double_center(const Matrix& m) {
  const Index d = m.rows();
  const double dd = static_cast<double>(d);
  Vector row_mean(d);
  Vector col_mean(d);
  for (Index i = 0; i < d; ++i) {
    double r = 0.0;
    double c = 0.0;
    for (Index k = 0; k < d; ++k) {
      r += m(i, k);
      c += m(k, i);
    }
    row_mean(i) = r / dd;
    col_mean(i) = c / dd;
  }
  const double total_mean = row_mean.sum() / dd;
  Matrix out(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) out(i, j) = (m(i, j) + total_mean) - (row_mean(i) + col_mean(j));
  }
  return out;
}

// sigma_ij = m_ij - m_iD - m_Dj + m_DD over the non-reference indices.
Matrix reference_contrast(const Matrix& m, Index ref) {
  const Index d = m.rows();
  Matrix out(d - 1, d - 1);
  for (Index i = 0, a = 0; i < d; ++i) {
    if (i == ref) continue;
    for (Index j = 0, b = 0; j < d; ++j) {
      if (j == ref) continue;
      out(a, b++) = (m(i, j) + m(ref, ref)) - (m(i, ref) + m(j, ref));
    }
    ++a;
  }
  return out;
}

// Zero row and column inserted at the reference position: sigma_iD vanishes.
Matrix pad_reference(const Matrix& sigma, Index ref) {
  const Index d = sigma.rows() + 1;
  Matrix out = Matrix::Zero(d, d);
  for (Index i = 0, a = 0; i < d; ++i) {
    if (i == ref) continue;
    for (Index j = 0, b = 0; j < d; ++j) {
      if (j == ref) continue;
      out(i, j) = sigma(a, b++);
    }
    ++a;
  }
  return out;
}

}  // namespace

std::string_view to_string(Representation repr) {
  switch (repr) {
    case Representation::Alr: return "ALR";
    case Representation::Clr: return "CLR";
    case Representation::Basis: return "BASIS";
  }
  return "?";
}

CovMatrix::CovMatrix(Matrix values, Representation repr, Index ref, Labels labels)
    : values_(std::move(values)), repr_(repr), ref_(ref), labels_(std::move(labels)) {
  if (values_.rows() != values_.cols()) throw Error(ErrorCode::ShapeMismatch, "covariance must be square");
  if (!values_.allFinite()) throw Error(ErrorCode::InvalidArgument, "covariance has non-finite entries");
  const Index d = parts();
  if (d < 3) throw Error(ErrorCode::DimensionTooSmall, "covariance must describe at least 3 parts");
  if (repr_ == Representation::Alr) require_ref(ref_, d);
  if (!labels_.empty() && static_cast<Index>(labels_.size()) != d) {
    throw Error(ErrorCode::ShapeMismatch, "label count does not match the number of parts");
  }
  const double scale = std::max(1.0, values_.cwiseAbs().maxCoeff());
  if ((values_ - values_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw Error(ErrorCode::NotSymmetric, "covariance is not symmetric");
  }
}

CovMatrix CovMatrix::alr(Matrix values, Index ref, Labels labels) {
  return CovMatrix(std::move(values), Representation::Alr, ref, std::move(labels));
}

CovMatrix CovMatrix::clr(Matrix values, Labels labels) {
  return CovMatrix(std::move(values), Representation::Clr, -1, std::move(labels));
}

CovMatrix CovMatrix::basis(Matrix values, Labels labels) {
  return CovMatrix(std::move(values), Representation::Basis, -1, std::move(labels));
}

std::vector<Index> CovMatrix::part_indices() const {
  std::vector<Index> idx;
  for (Index j = 0; j < parts(); ++j) {
    if (repr_ == Representation::Alr && j == ref_) continue;
    idx.push_back(j);
  }
  return idx;
}

Matrix sample_covariance(const Matrix& x) { return kernels::parallel::covariance(x); }

CovMatrix sample_covariance(const AlrMatrix& x) {
  return CovMatrix::alr(sample_covariance(x.values()), x.ref(), x.labels());
}

CovMatrix sample_covariance(const ClrMatrix& y) { return CovMatrix::clr(sample_covariance(y.values()), y.labels()); }

CovMatrix sample_covariance(const BasisMatrix& b) {
  return CovMatrix::basis(sample_covariance(b.values()), b.labels());
}

CovMatrix sigma_to_gamma(const CovMatrix& sigma) {
  require_repr(sigma, Representation::Alr, "sigma_to_gamma");
  return CovMatrix::clr(double_center(pad_reference(sigma.values(), sigma.ref())), sigma.labels());
}

CovMatrix gamma_to_sigma(const CovMatrix& gamma, Index ref) {
  require_repr(gamma, Representation::Clr, "gamma_to_sigma");
  require_ref(ref, gamma.parts());
  return CovMatrix::alr(reference_contrast(gamma.values(), ref), ref, gamma.labels());
}

CovMatrix omega_to_sigma(const CovMatrix& omega, Index ref) {
  require_repr(omega, Representation::Basis, "omega_to_sigma");
  require_ref(ref, omega.parts());
  return CovMatrix::alr(reference_contrast(omega.values(), ref), ref, omega.labels());
}

CovMatrix omega_to_gamma(const CovMatrix& omega) {
  require_repr(omega, Representation::Basis, "omega_to_gamma");
  return CovMatrix::clr(double_center(omega.values()), omega.labels());
}

CovMatrix logratio_to_omega(const CovMatrix& gamma_or_sigma, const BasisMatrix& basis, const CompositionMatrix& p) {
  if (gamma_or_sigma.representation() == Representation::Basis) {
    throw Error(ErrorCode::RepresentationMismatch, "logratio_to_omega expects an ALR or CLR covariance");
  }
  const CovMatrix gamma =
      gamma_or_sigma.representation() == Representation::Alr ? sigma_to_gamma(gamma_or_sigma) : gamma_or_sigma;
  const Index d = gamma.parts();
  if (basis.parts() != d || p.parts() != d || basis.samples() != p.samples()) {
    throw Error(ErrorCode::ShapeMismatch, "basis, composition and covariance disagree in shape");
  }
  if (p.samples() < 2) throw Error(ErrorCode::TooFewSamples, "need at least 2 samples to estimate beta");

  // log g(m) per sample, and its covariance with each clr coordinate.
  const Vector log_gmean = basis.values().rowwise().mean();
  Matrix joint(p.samples(), d + 1);
  joint.leftCols(d) = clr(p).values();
  joint.col(d) = log_gmean;
  const Matrix c = sample_covariance(joint);
  const double var_g = c(d, d);
  Vector beta(d);
  for (Index j = 0; j < d; ++j) beta(j) = c(j, d) + 0.5 * var_g;

  Matrix omega(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) omega(i, j) = gamma.values()(i, j) + beta(i) + beta(j);
  }
  return CovMatrix::basis(std::move(omega), gamma.labels());
}

CovMatrix change_reference(const CovMatrix& sigma, Index new_ref) {
  return gamma_to_sigma(sigma_to_gamma(sigma), new_ref);
}

Matrix pseudoinverse(const Matrix& m) {
  const Index k = m.rows();
  if (m.cols() != k) throw Error(ErrorCode::ShapeMismatch, "pseudoinverse expects a square matrix");
  if (k == 0) return m;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const Vector& lambda = eig.eigenvalues();
  const double max_abs = lambda.cwiseAbs().maxCoeff();
  if (max_abs == 0.0) return Matrix::Zero(k, k);
  const double cutoff = static_cast<double>(k) * max_abs * 1e-12;
  Vector inv = Vector::Zero(k);
  for (Index i = 0; i < k; ++i) {
    if (std::abs(lambda(i)) > cutoff) inv(i) = 1.0 / lambda(i);
  }
  const Matrix& v = eig.eigenvectors();
  Matrix out = v * inv.asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

double condition_number(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Matrix partial_correlation_from_precision(const Matrix& precision) {
  const Index k = precision.rows();
  Matrix r = Matrix::Identity(k, k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double denom = precision(i, i) * precision(j, j);
      double v = denom > 0.0 ? -precision(i, j) / std::sqrt(denom) : 0.0;
      v = std::clamp(v, -1.0, 1.0);
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return r;
}

PartialCorrMatrix partial_correlation(const CovMatrix& c) {
  Matrix precision;
  if (c.representation() == Representation::Clr) {
    precision = pseudoinverse(c.values());
  } else {
    if (condition_number(c.values()) >= kMaxConditionNumber) {
      throw Error(ErrorCode::SingularCovariance, "covariance is singular or ill-conditioned; shrink it first");
    }
    const Index k = c.values().rows();
    precision = c.values().ldlt().solve(Matrix::Identity(k, k));
  }
  PartialCorrMatrix out;
  out.values = partial_correlation_from_precision(precision);
  out.parts = c.part_indices();
  if (!c.labels().empty()) {
    for (Index p : out.parts) out.labels.push_back(c.labels()[static_cast<std::size_t>(p)]);
  }
  return out;
}

}  // namespace lrshrink
