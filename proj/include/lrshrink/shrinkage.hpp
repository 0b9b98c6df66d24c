#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lrshrink/composition.hpp"
#include "lrshrink/covariance.hpp"

namespace lrshrink {

enum class TargetKind { Diagonal, LuAlr, LuClr, Custom };

std::string_view to_string(TargetKind kind);

/// How the LU targets obtain alpha from the diagonal of the CLR covariance.
///
/// Consistent inverts the LU relation between alpha and diag(Gamma), so an LU
/// covariance is its own target and the target keeps diag(Gamma).
/// Published uses diag(Gamma) itself as alpha (the printed closed forms).
enum class LuTargetForm { Consistent, Published };

/// Whether the lambda estimate includes the cov(s_ij, t_ij) correction.
enum class CrossTerm { Exact, Ignore };

struct LambdaEstimate {
  double value = 0.0;     ///< clamped to [0, 1]
  double preclamp = 0.0;  ///< raw ratio before clamping
  bool degenerate = false;  ///< zero denominator; value set to 1
};

struct ShrinkageEstimate {
  CovMatrix covariance;
  LambdaEstimate lambda;
  std::optional<LambdaEstimate> lambda_var;
  TargetKind target_kind = TargetKind::Diagonal;
  std::vector<std::string> warnings;
};

/// Normal-Wishart prior: Sigma^-1 ~ W(V, nu), mu | Sigma ~ N(mu0, Sigma / kappa).
struct WishartPrior {
  int nu = 0;
  Matrix scale;  // V
  double kappa = 1.0;
  Vector mu0;
};

/// lambda * t + (1 - lambda) * s.
Matrix shrink(const Matrix& s, const Matrix& t, double lambda);

/// Optimal intensity toward diag(C) for data x (N x k), N >= 3:
/// sum_{i!=j} var(c_ij) / sum_{i!=j} c_ij^2.
LambdaEstimate estimate_lambda_diagonal(const Matrix& x);

/// Optimal intensity for a target that is linear in the sample covariance:
/// sum_{i!=j} [var(s_ij) - cov(s_ij, t_ij)] / sum_{i!=j} (s_ij - t_ij)^2.
/// For LuAlr, x holds ALR data (D = k + 1); for LuClr, CLR data (D = k).
/// Diagonal and Custom use the diagonal target.
LambdaEstimate estimate_lambda_general(const Matrix& x, TargetKind kind,
                                       LuTargetForm form = LuTargetForm::Consistent,
                                       CrossTerm cross = CrossTerm::Exact);

struct VarianceShrinkage {
  Vector variances;
  LambdaEstimate lambda_var;
};

/// Shrinks variances toward their median. `lambda_override` forces lambda_var.
VarianceShrinkage shrink_variances(const Vector& variances, const Matrix& x,
                                   std::optional<double> lambda_override = std::nullopt);

struct DiagonalShrinkageOptions {
  bool shrink_variances = true;
  std::optional<double> lambda_var_override;
};

struct DiagonalShrinkage {
  Matrix covariance;
  LambdaEstimate lambda;
  std::optional<LambdaEstimate> lambda_var;
};

/// Sample covariance of x shrunk toward its diagonal. With variance
/// shrinkage on, the correlations are shrunk by lambda and rescaled with the
/// shrunk variances, which keeps the result positive definite for lambda > 0.
DiagonalShrinkage shrink_toward_diagonal(const Matrix& x, const DiagonalShrinkageOptions& options = {});

/// Requested logratio representation of a shrunk basis covariance.
struct OutputForm {
  Representation repr = Representation::Clr;
  Index ref = -1;

  static OutputForm alr(Index ref) { return {Representation::Alr, ref}; }
  static OutputForm clr() { return {Representation::Clr, -1}; }
};

/// Shrinks the constant-size basis covariance cov(log p) toward its diagonal
/// and maps the result to ALR or CLR form.
ShrinkageEstimate shrink_basis_pipeline(const CompositionMatrix& p, OutputForm output,
                                        const DiagonalShrinkageOptions& options = {});
/// Counts must be zero-free (ZeroEntry otherwise); they are closed first.
ShrinkageEstimate shrink_basis_pipeline(const CountMatrix& counts, OutputForm output,
                                        const DiagonalShrinkageOptions& options = {});

/// Diagonal-target shrinkage applied directly to logratio data.
ShrinkageEstimate shrink_logratio_naive(const AlrMatrix& x, const DiagonalShrinkageOptions& options = {});
ShrinkageEstimate shrink_logratio_naive(const ClrMatrix& y, const DiagonalShrinkageOptions& options = {});

struct LuTarget {
  CovMatrix target;
  Vector implied_alpha;       ///< alpha the target was built from (length D)
  bool negative_alpha = false;  ///< some implied alpha is not positive
};

LuTarget lu_target_alr(const CovMatrix& s, LuTargetForm form = LuTargetForm::Consistent);
LuTarget lu_target_clr(const CovMatrix& g, LuTargetForm form = LuTargetForm::Consistent);

/// Raw linear maps behind lu_target_alr / lu_target_clr, for any symmetric
/// input (the ALR map is the same for every reference position).
Matrix lu_alr_target_map(const Matrix& s, LuTargetForm form = LuTargetForm::Consistent);
Matrix lu_clr_target_map(const Matrix& g, LuTargetForm form = LuTargetForm::Consistent);

/// Shrinks an ALR (LuAlr) or CLR (LuClr) covariance toward its LU target,
/// with lambda estimated from the logratio data x it was computed from.
/// Diagonal and Custom shrink toward diag(s_or_g).
ShrinkageEstimate shrink_logratio_direct(const CovMatrix& s_or_g, const Matrix& x, TargetKind kind,
                                         LuTargetForm form = LuTargetForm::Consistent);

struct BayesShrinkage {
  double lambda = 0.0;
  Matrix target;
};

/// Intensity and target for which the shrinkage estimator times (nu + N)
/// equals the posterior Wishart scale.
BayesShrinkage bayes_equivalence(const WishartPrior& prior, Index n, const Vector& xbar, const Matrix& s);
/// V* = (N-1) S + V + kappa N / (kappa + N) (xbar - mu0)(xbar - mu0)^T.
Matrix posterior_scale(const WishartPrior& prior, Index n, const Vector& xbar, const Matrix& s);

}  // namespace lrshrink
