#include "lrshrink/shrinkage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrshrink/error.hpp"
#include "lrshrink/kernels.hpp"

namespace lrshrink {
namespace {

void require_samples(const Matrix& x, Index min_rows) {
  if (x.rows() < min_rows) {
    throw Error(ErrorCode::TooFewSamples,
                "need at least " + std::to_string(min_rows) + " samples, got " + std::to_string(x.rows()));
  }
}

LambdaEstimate clamp_ratio(double numerator, double denominator) {
  LambdaEstimate est;
  if (denominator == 0.0) {
    // The target already equals the estimate; every lambda is optimal.
    est.value = 1.0;
    est.preclamp = 1.0;
    est.degenerate = true;
    return est;
  }
  est.preclamp = numerator / denominator;
  est.value = std::clamp(est.preclamp, 0.0, 1.0);
  return est;
}

double median(Vector v) {
  std::sort(v.data(), v.data() + v.size());
  const Index n = v.size();
  return n % 2 == 1 ? v(n / 2) : 0.5 * (v(n / 2 - 1) + v(n / 2));
}

// alpha recovered from diag(Gamma) of an LU covariance:
// gamma_ii = alpha_i (1 - 2/D) + sum(alpha) / D^2 and sum(gamma_ii) = sum(alpha) (1 - 1/D).
Vector alpha_from_clr_diagonal(const Vector& gdiag, LuTargetForm form) {
  if (form == LuTargetForm::Published) return gdiag;
  const double d = static_cast<double>(gdiag.size());
  const double offset = gdiag.sum() / (d * (d - 1.0));
  return ((gdiag.array() - offset) * (d / (d - 2.0))).matrix();
}

Matrix lu_gamma_from(const Vector& alpha) {
  const Index d = alpha.size();
  const double dd = static_cast<double>(d);
  const double mean = alpha.sum() / dd;
  Matrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      g(i, j) = i == j ? alpha(i) - (2.0 * alpha(i) - mean) / dd : -(alpha(i) + alpha(j) - mean) / dd;
    }
  }
  return g;
}

struct AlrTargetParts {
  Matrix target;
  Vector alpha;  // k non-reference entries followed by the reference
};

AlrTargetParts alr_target_parts(const Matrix& s, LuTargetForm form) {
  const Index k = s.rows();
  const double d = static_cast<double>(k + 1);
  const double total = s.sum();
  Vector gdiag(k + 1);
  for (Index i = 0; i < k; ++i) gdiag(i) = s(i, i) - 2.0 / d * s.row(i).sum() + total / (d * d);
  gdiag(k) = total / (d * d);

  AlrTargetParts out;
  out.target.resize(k, k);
  if (form == LuTargetForm::Published) {
    const double off = 2.0 * total / (d * d);
    for (Index i = 0; i < k; ++i) {
      for (Index j = 0; j < k; ++j) out.target(i, j) = i == j ? s(i, i) - 2.0 / d * s.row(i).sum() + off : off;
    }
    out.alpha = gdiag;
    return out;
  }
  out.alpha = alpha_from_clr_diagonal(gdiag, form);
  const double ref = out.alpha(k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) out.target(i, j) = i == j ? out.alpha(i) + ref : ref;
  }
  return out;
}

std::vector<std::string> lambda_warnings(const LambdaEstimate& lambda, const char* what) {
  if (!lambda.degenerate) return {};
  return {std::string(what) + ": zero denominator, lambda set to 1"};
}

ShrinkageEstimate diagonal_estimate(CovMatrix cov, DiagonalShrinkage&& shrunk) {
  ShrinkageEstimate est{std::move(cov), shrunk.lambda, shrunk.lambda_var, TargetKind::Diagonal, {}};
  est.warnings = lambda_warnings(shrunk.lambda, "lambda");
  if (shrunk.lambda_var) {
    for (auto& w : lambda_warnings(*shrunk.lambda_var, "lambda_var")) est.warnings.push_back(std::move(w));
  }
  return est;
}

}  // namespace

std::string_view to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::Diagonal: return "DIAGONAL";
    case TargetKind::LuAlr: return "LU_ALR";
    case TargetKind::LuClr: return "LU_CLR";
    case TargetKind::Custom: return "CUSTOM";
  }
  return "?";
}

Matrix shrink(const Matrix& s, const Matrix& t, double lambda) {
  if (s.rows() != t.rows() || s.cols() != t.cols()) throw Error(ErrorCode::ShapeMismatch, "S and T differ in shape");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::LambdaOutOfRange, "lambda " + std::to_string(lambda) + " outside [0, 1]");
  }
  return lambda * t + (1.0 - lambda) * s;
}

LambdaEstimate estimate_lambda_diagonal(const Matrix& x) {
  require_samples(x, 3);
  const kernels::DiagonalMoments m = kernels::parallel::diagonal_moments(x);
  return clamp_ratio(m.sum_var_offdiag, m.sum_sq_offdiag);
}

LambdaEstimate estimate_lambda_general(const Matrix& x, TargetKind kind, LuTargetForm form, CrossTerm cross) {
  require_samples(x, 3);
  const Matrix xc = kernels::center_columns(x);
  const Index n = x.rows();
  const Index k = x.cols();
  Vector u = Vector::Zero(n);
  Matrix b;

  // Off-diagonal target entries evaluated on each w_m = xc_m xc_m^T take the
  // form u_m + b_mi + b_mj.
  if (kind == TargetKind::LuAlr) {
    const double d = static_cast<double>(k + 1);
    for (Index m = 0; m < n; ++m) {
      const double zbar = xc.row(m).sum() / d;  // mean over D entries, reference being 0
      const double gamma_ref = zbar * zbar;
      if (form == LuTargetForm::Published) {
        u(m) = 2.0 * gamma_ref;
      } else {
        const double sum_g = xc.row(m).squaredNorm() - d * gamma_ref;
        u(m) = (gamma_ref - sum_g / (d * (d - 1.0))) * d / (d - 2.0);
      }
    }
  } else if (kind == TargetKind::LuClr) {
    const double d = static_cast<double>(k);
    b.resize(n, k);
    for (Index m = 0; m < n; ++m) {
      const Vector alpha = alpha_from_clr_diagonal(xc.row(m).transpose().cwiseAbs2(), form);
      u(m) = alpha.sum() / (d * d);
      b.row(m) = -alpha.transpose() / d;
    }
  }

  const kernels::TargetMoments mom = kernels::parallel::separable_target_moments(xc, u, b);
  const double numerator =
      mom.sum_var_offdiag - (cross == CrossTerm::Exact ? mom.sum_cov_offdiag : 0.0);
  return clamp_ratio(numerator, mom.sum_sq_dev_offdiag);
}

VarianceShrinkage shrink_variances(const Vector& variances, const Matrix& x, std::optional<double> lambda_override) {
  require_samples(x, 3);
  if (variances.size() != x.cols()) throw Error(ErrorCode::ShapeMismatch, "one variance per data column expected");
  const double target = median(variances);
  VarianceShrinkage out;
  if (lambda_override) {
    if (!(*lambda_override >= 0.0 && *lambda_override <= 1.0)) {
      throw Error(ErrorCode::LambdaOutOfRange, "lambda_var override outside [0, 1]");
    }
    out.lambda_var = {*lambda_override, *lambda_override, false};
  } else {
    const kernels::DiagonalMoments m = kernels::parallel::diagonal_moments(x);
    out.lambda_var = clamp_ratio(m.var_diag.sum(), (variances.array() - target).square().sum());
  }
  const double lv = out.lambda_var.value;
  out.variances = (lv * target + (1.0 - lv) * variances.array()).matrix();
  return out;
}

DiagonalShrinkage shrink_toward_diagonal(const Matrix& x, const DiagonalShrinkageOptions& options) {
  require_samples(x, 3);
  const Matrix c = sample_covariance(x);
  DiagonalShrinkage out;
  out.lambda = estimate_lambda_diagonal(x);
  const double keep = 1.0 - out.lambda.value;
  const Index k = c.rows();
  const Vector v = c.diagonal();
  Vector scale = Vector::Ones(k);
  Vector diag = v;
  if (options.shrink_variances) {
    VarianceShrinkage sv = shrink_variances(v, x, options.lambda_var_override);
    for (Index i = 0; i < k; ++i) scale(i) = v(i) > 0.0 ? std::sqrt(sv.variances(i) / v(i)) : 0.0;
    diag = sv.variances;
    out.lambda_var = sv.lambda_var;
  }
  out.covariance.resize(k, k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < j; ++i) out.covariance(i, j) = out.covariance(j, i) = keep * c(i, j) * scale(i) * scale(j);
    out.covariance(j, j) = diag(j);
  }
  return out;
}

ShrinkageEstimate shrink_basis_pipeline(const CompositionMatrix& p, OutputForm output,
                                        const DiagonalShrinkageOptions& options) {
  const BasisMatrix basis = log_basis(p);
  DiagonalShrinkage shrunk = shrink_toward_diagonal(basis.values(), options);
  const CovMatrix omega = CovMatrix::basis(shrunk.covariance, p.labels());
  CovMatrix out = output.repr == Representation::Alr   ? omega_to_sigma(omega, output.ref)
                  : output.repr == Representation::Clr ? omega_to_gamma(omega)
                                                       : omega;
  return diagonal_estimate(std::move(out), std::move(shrunk));
}

ShrinkageEstimate shrink_basis_pipeline(const CountMatrix& counts, OutputForm output,
                                        const DiagonalShrinkageOptions& options) {
  if (counts.has_zeros()) throw Error(ErrorCode::ZeroEntry, "zero counts reached the log; impute them first");
  return shrink_basis_pipeline(closure(counts), output, options);
}

ShrinkageEstimate shrink_logratio_naive(const AlrMatrix& x, const DiagonalShrinkageOptions& options) {
  DiagonalShrinkage shrunk = shrink_toward_diagonal(x.values(), options);
  return diagonal_estimate(CovMatrix::alr(shrunk.covariance, x.ref(), x.labels()), std::move(shrunk));
}

ShrinkageEstimate shrink_logratio_naive(const ClrMatrix& y, const DiagonalShrinkageOptions& options) {
  DiagonalShrinkage shrunk = shrink_toward_diagonal(y.values(), options);
  return diagonal_estimate(CovMatrix::clr(shrunk.covariance, y.labels()), std::move(shrunk));
}

Matrix lu_alr_target_map(const Matrix& s, LuTargetForm form) { return alr_target_parts(s, form).target; }

Matrix lu_clr_target_map(const Matrix& g, LuTargetForm form) {
  return lu_gamma_from(alpha_from_clr_diagonal(g.diagonal(), form));
}

LuTarget lu_target_alr(const CovMatrix& s, LuTargetForm form) {
  if (s.representation() != Representation::Alr) {
    throw Error(ErrorCode::RepresentationMismatch, "ALR LU target needs an ALR covariance");
  }
  AlrTargetParts parts = alr_target_parts(s.values(), form);
  const Index d = s.parts();
  Vector alpha(d);
  const std::vector<Index> idx = s.part_indices();
  for (std::size_t c = 0; c < idx.size(); ++c) alpha(idx[c]) = parts.alpha(static_cast<Index>(c));
  alpha(s.ref()) = parts.alpha(d - 1);
  const bool negative = (alpha.array() <= 0.0).any();
  return {CovMatrix::alr(std::move(parts.target), s.ref(), s.labels()), std::move(alpha), negative};
}

LuTarget lu_target_clr(const CovMatrix& g, LuTargetForm form) {
  if (g.representation() != Representation::Clr) {
    throw Error(ErrorCode::RepresentationMismatch, "CLR LU target needs a CLR covariance");
  }
  Vector alpha = alpha_from_clr_diagonal(g.values().diagonal(), form);
  const bool negative = (alpha.array() <= 0.0).any();
  return {CovMatrix::clr(lu_gamma_from(alpha), g.labels()), std::move(alpha), negative};
}

ShrinkageEstimate shrink_logratio_direct(const CovMatrix& s_or_g, const Matrix& x, TargetKind kind,
                                         LuTargetForm form) {
  if (x.cols() != s_or_g.values().cols()) {
    throw Error(ErrorCode::ShapeMismatch, "data columns do not match the covariance");
  }
  std::vector<std::string> warnings;
  Matrix target;
  LambdaEstimate lambda;
  if (kind == TargetKind::LuAlr || kind == TargetKind::LuClr) {
    const LuTarget lu = kind == TargetKind::LuAlr ? lu_target_alr(s_or_g, form) : lu_target_clr(s_or_g, form);
    if (lu.negative_alpha) warnings.emplace_back("LU target implies non-positive alpha");
    target = lu.target.values();
    lambda = estimate_lambda_general(x, kind, form);
  } else {
    target = s_or_g.values().diagonal().asDiagonal();
    lambda = estimate_lambda_general(x, TargetKind::Diagonal);
  }
  for (auto& w : lambda_warnings(lambda, "lambda")) warnings.push_back(std::move(w));
  const Matrix shrunk = shrink(s_or_g.values(), target, lambda.value);
  CovMatrix cov = s_or_g.representation() == Representation::Alr
                      ? CovMatrix::alr(shrunk, s_or_g.ref(), s_or_g.labels())
                  : s_or_g.representation() == Representation::Clr ? CovMatrix::clr(shrunk, s_or_g.labels())
                                                                     : CovMatrix::basis(shrunk, s_or_g.labels());
  return {std::move(cov), lambda, std::nullopt, kind, std::move(warnings)};
}

namespace {

void check_prior(const WishartPrior& prior, Index n, const Vector& xbar, const Matrix& s) {
  const Index k = s.rows();
  if (s.cols() != k || prior.scale.rows() != k || prior.scale.cols() != k || xbar.size() != k ||
      prior.mu0.size() != k) {
    throw Error(ErrorCode::ShapeMismatch, "prior, mean and covariance dimensions disagree");
  }
  if (n < 1) throw Error(ErrorCode::TooFewSamples, "N must be positive");
  if (prior.nu < k) throw Error(ErrorCode::InvalidArgument, "nu must be at least the dimension");
  if (!(prior.kappa > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa must be positive");
  if (prior.scale.llt().info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "prior scale V is not positive definite");
  }
}

Matrix mean_discrepancy(const WishartPrior& prior, Index n, const Vector& xbar) {
  const double nd = static_cast<double>(n);
  const Vector delta = xbar - prior.mu0;
  return prior.kappa * nd / (prior.kappa + nd) * delta * delta.transpose();
}

}  // namespace

BayesShrinkage bayes_equivalence(const WishartPrior& prior, Index n, const Vector& xbar, const Matrix& s) {
  check_prior(prior, n, xbar, s);
  const double nu = static_cast<double>(prior.nu);
  const double nd = static_cast<double>(n);
  BayesShrinkage out;
  out.lambda = (nu + 1.0) / (nu + nd);
  out.target = (prior.scale + mean_discrepancy(prior, n, xbar)) / (nu + 1.0);
  return out;
}

Matrix posterior_scale(const WishartPrior& prior, Index n, const Vector& xbar, const Matrix& s) {
  check_prior(prior, n, xbar, s);
  return static_cast<double>(n - 1) * s + prior.scale + mean_discrepancy(prior, n, xbar);
}

}  // namespace lrshrink
