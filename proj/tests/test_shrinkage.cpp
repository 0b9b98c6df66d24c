#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "lrshrink/lu.hpp"
#include "lrshrink/shrinkage.hpp"
#include "lrshrink/simulation.hpp"
#include "test_support.hpp"

using namespace lrshrink;
using namespace lrshrink::test;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

Matrix gaussian_rows(Gen& g, Index n, const Matrix& cov) {
  const Matrix l = cov.llt().matrixL();
  return normal_matrix(g, n, cov.rows()) * l.transpose();
}

bool positive_definite(const Matrix& m) { return Eigen::LLT<Matrix>(m).info() == Eigen::Success; }

}  // namespace

TEST_CASE("convex combination") {
  const Matrix s = Matrix::Constant(1, 1, 2.0);
  const Matrix t = Matrix::Constant(1, 1, 4.0);
  CHECK(shrink(s, t, 0.0)(0, 0) == 2.0);
  CHECK(shrink(s, t, 1.0)(0, 0) == 4.0);
  CHECK(shrink(s, t, 0.5)(0, 0) == 3.0);
  CHECK(error_code_of([&] { shrink(s, t, 1.5); }) == ErrorCode::LambdaOutOfRange);
  CHECK(error_code_of([&] { shrink(s, t, -0.1); }) == ErrorCode::LambdaOutOfRange);
  CHECK(error_code_of([&] { shrink(s, Matrix::Zero(2, 2), 0.5); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("diagonal lambda needs three samples") {
  CHECK(error_code_of([] { estimate_lambda_diagonal(Matrix::Ones(2, 3)); }) == ErrorCode::TooFewSamples);
  CHECK(error_code_of([] { estimate_lambda_general(Matrix::Ones(2, 3), TargetKind::LuClr); }) ==
        ErrorCode::TooFewSamples);
}

TEST_CASE("diagonal lambda is near 1 for uncorrelated columns at small N") {
  Gen g(1);
  std::vector<double> lambdas;
  for (int s = 0; s < 100; ++s) lambdas.push_back(estimate_lambda_diagonal(normal_matrix(g, 10, 10)).value);
  CHECK(median(lambdas) > 0.8);
}

TEST_CASE("diagonal lambda is near 0 for duplicated high-variance columns at large N") {
  Gen g(2);
  std::vector<double> lambdas;
  for (int s = 0; s < 100; ++s) {
    Matrix x = normal_matrix(g, 500, 4, 0.1);
    x.col(0) = 10.0 * normal_matrix(g, 500, 1);
    x.col(1) = x.col(0);
    lambdas.push_back(estimate_lambda_diagonal(x).value);
  }
  CHECK(median(lambdas) < 0.2);
}

TEST_CASE("zero denominator gives lambda 1") {
  Matrix x = Matrix::Ones(6, 3);
  x.col(0) << 1, 2, 3, 4, 5, 7;
  const auto est = estimate_lambda_diagonal(x);
  CHECK(est.value == 1.0);
  CHECK(est.degenerate);
  const auto lu = estimate_lambda_general(Matrix::Constant(6, 4, 2.0), TargetKind::LuClr);
  CHECK(lu.value == 1.0);
  CHECK(lu.degenerate);
}

TEST_CASE("general machinery reduces to the diagonal formula") {
  Gen g(3);
  for (int t = 0; t < 50; ++t) {
    const Matrix x = normal_matrix(g, uniform_index(g, 3, 40), uniform_index(g, 2, 20));
    const auto a = estimate_lambda_diagonal(x);
    const auto b = estimate_lambda_general(x, TargetKind::Diagonal);
    CHECK(std::abs(a.preclamp - b.preclamp) < 1e-12 * std::max(1.0, std::abs(a.preclamp)));
  }
}

TEST_CASE("lambda estimates stay in [0, 1] and keep the raw ratio") {
  Gen g(4);
  for (int t = 0; t < 100; ++t) {
    const Matrix x = normal_matrix(g, uniform_index(g, 3, 8), uniform_index(g, 3, 10));
    for (auto kind : {TargetKind::Diagonal, TargetKind::LuAlr, TargetKind::LuClr}) {
      const auto est = estimate_lambda_general(x, kind);
      CHECK(est.value >= 0.0);
      CHECK(est.value <= 1.0);
      CHECK(est.value == std::clamp(est.preclamp, 0.0, 1.0));
    }
  }
}

TEST_CASE("LU population gets more shrinkage than a non-LU population") {
  Gen g(5);
  const Index d = 8;
  const Index n = 10;
  std::vector<double> lu_lambda;
  std::vector<double> other_lambda;
  for (int s = 0; s < 100; ++s) {
    const AlphaVector alpha(random_alpha(g, d, 0.5, 2.0));
    const Matrix lu = lu_sigma(alpha).values();
    Matrix other = random_spd(g, d - 1);
    // Same overall scale, strongly correlated structure.
    const Vector f = normal_matrix(g, d - 1, 1);
    other += 3.0 * f * f.transpose();
    lu_lambda.push_back(estimate_lambda_general(gaussian_rows(g, n, lu), TargetKind::LuAlr).value);
    other_lambda.push_back(estimate_lambda_general(gaussian_rows(g, n, other), TargetKind::LuAlr).value);
  }
  CHECK(median(lu_lambda) > median(other_lambda));
}

TEST_CASE("variance shrinkage") {
  Gen g(6);
  const Matrix x = normal_matrix(g, 12, 5);
  const Vector equal = Vector::Constant(5, 2.0);
  const auto same = shrink_variances(equal, x);
  CHECK(max_abs(same.variances - equal) == 0.0);

  const Vector v = (Vector(5) << 1, 2, 3, 4, 10).finished();
  const auto full = shrink_variances(v, x, 1.0);
  CHECK(max_abs(full.variances - Vector::Constant(5, 3.0)) == 0.0);
  CHECK(full.lambda_var.value == 1.0);
  CHECK(error_code_of([&] { shrink_variances(v, x, 1.2); }) == ErrorCode::LambdaOutOfRange);
  CHECK(error_code_of([&] { shrink_variances(Vector::Ones(4), x); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("shrunk variances beat raw variances for an equal-variance population") {
  Gen g(7);
  double raw = 0.0;
  double shrunk = 0.0;
  for (int s = 0; s < 100; ++s) {
    const Matrix x = normal_matrix(g, 6, 20);
    const Vector v = sample_covariance(x).diagonal();
    raw += (v.array() - 1.0).square().sum();
    shrunk += (shrink_variances(v, x).variances.array() - 1.0).square().sum();
  }
  CHECK(shrunk < raw);
}

TEST_CASE("diagonal shrinkage keeps correlations consistent with the shrunk variances") {
  Gen g(8);
  const Matrix x = normal_matrix(g, 9, 6) * random_spd(g, 6);
  const auto plain = shrink_toward_diagonal(x, {.shrink_variances = false, .lambda_var_override = std::nullopt});
  const Matrix c = sample_covariance(x);
  CHECK(!plain.lambda_var);
  CHECK(max_abs(plain.covariance - shrink(c, Matrix(c.diagonal().asDiagonal()), plain.lambda.value)) < 1e-14);

  const auto both = shrink_toward_diagonal(x);
  REQUIRE(both.lambda_var);
  const Vector v = both.covariance.diagonal();
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 6; ++j) {
      if (i == j) continue;
      const double r_shrunk = both.covariance(i, j) / std::sqrt(v(i) * v(j));
      const double r_raw = c(i, j) / std::sqrt(c(i, i) * c(j, j));
      CHECK(r_shrunk == doctest::Approx((1.0 - both.lambda.value) * r_raw).epsilon(1e-12));
    }
  }
}

TEST_CASE("basis pipeline approaches the sample covariance when lambda vanishes") {
  Gen g(9);
  const Index d = 4;
  const Matrix omega = 0.2 * Matrix::Identity(d, d) + Matrix::Constant(d, d, 0.0);
  Matrix cov = omega;
  cov(0, 1) = cov(1, 0) = 0.15;
  cov(2, 3) = cov(3, 2) = -0.15;
  const Matrix logs = gaussian_rows(g, 20000, cov);
  const auto p = closure(logs.array().exp().matrix());
  const auto est = shrink_basis_pipeline(p, OutputForm::alr(d - 1),
                                         {.shrink_variances = false, .lambda_var_override = std::nullopt});
  CHECK(est.lambda.value < 0.01);
  const Matrix plain = sample_covariance(alr(p, d - 1)).values();
  CHECK(max_abs(est.covariance.values() - plain) < 0.01 * max_abs(plain));
}

TEST_CASE("basis pipeline is invertible where the sample ALR covariance is not") {
  Gen g(10);
  const Index d = 40;
  const auto sigma = CovMatrix::alr(random_spd(g, d - 1), d - 1);
  const auto p = sample_logistic_normal(Vector::Zero(d - 1), sigma, 8, 77);
  const auto plain = sample_covariance(alr(p, d - 1));
  CHECK(condition_number(plain.values()) >= 1e12);
  const auto est = shrink_basis_pipeline(p, OutputForm::alr(d - 1));
  CHECK(est.lambda.value > 0.0);
  CHECK(positive_definite(est.covariance.values()));
  CHECK(condition_number(est.covariance.values()) < 1e12);
  CHECK_NOTHROW(partial_correlation(est.covariance));
}

TEST_CASE("basis pipeline output is positive definite for small N") {
  Gen g(11);
  for (int t = 0; t < 50; ++t) {
    const Index d = uniform_index(g, 5, 30);
    const Index n = uniform_index(g, 3, d);
    const auto p = random_composition(g, n, d, 1.5);
    const auto est = shrink_basis_pipeline(p, OutputForm::alr(uniform_index(g, 0, d - 1)));
    if (est.lambda.value > 0.0) CHECK(positive_definite(est.covariance.values()));
    CHECK(max_abs(est.covariance.values() - est.covariance.values().transpose()) < 1e-12);
  }
}

TEST_CASE("basis pipeline partial correlations agree between ALR and CLR output") {
  Gen g(12);
  for (int t = 0; t < 20; ++t) {
    const Index d = uniform_index(g, 4, 20);
    const auto p = random_composition(g, uniform_index(g, 3, 15), d);
    const auto a = partial_correlation(shrink_basis_pipeline(p, OutputForm::alr(d - 1)).covariance);
    const auto c = partial_correlation(shrink_basis_pipeline(p, OutputForm::clr()).covariance);
    CHECK(max_abs(a.values - c.values.topLeftCorner(d - 1, d - 1)) < 1e-9);
  }
}

TEST_CASE("shrinking then transforming equals transforming then shrinking") {
  Gen g(13);
  for (int t = 0; t < 20; ++t) {
    const Index d = uniform_index(g, 3, 15);
    const auto p = random_composition(g, uniform_index(g, 3, 20), d);
    const DiagonalShrinkageOptions off{.shrink_variances = false, .lambda_var_override = std::nullopt};
    const auto est = shrink_basis_pipeline(p, OutputForm::alr(0), off);
    const auto c = sample_covariance(log_basis(p));
    const auto s = omega_to_sigma(c, 0);
    const auto target = omega_to_sigma(CovMatrix::basis(c.values().diagonal().asDiagonal()), 0);
    const Matrix expected = shrink(s.values(), target.values(), est.lambda.value);
    CHECK(max_abs(est.covariance.values() - expected) < 1e-12);
  }
}

TEST_CASE("basis pipeline refuses zero counts") {
  Matrix m(3, 3);
  m << 1, 2, 3, 0, 4, 5, 6, 7, 8;
  CHECK(error_code_of([&] { shrink_basis_pipeline(CountMatrix(m), OutputForm::clr()); }) == ErrorCode::ZeroEntry);
  m(1, 0) = 1;
  CHECK_NOTHROW(shrink_basis_pipeline(CountMatrix(m), OutputForm::clr()));
}

TEST_CASE("naive arms shrink logratio data toward their own diagonal") {
  Gen g(14);
  const auto p = random_composition(g, 10, 6);
  const DiagonalShrinkageOptions off{.shrink_variances = false, .lambda_var_override = std::nullopt};
  const auto a = shrink_logratio_naive(alr(p, 2), off);
  CHECK(a.covariance.representation() == Representation::Alr);
  CHECK(a.covariance.ref() == 2);
  const Matrix s = sample_covariance(alr(p, 2)).values();
  CHECK(max_abs(a.covariance.values() - shrink(s, Matrix(s.diagonal().asDiagonal()), a.lambda.value)) < 1e-14);
  const auto c = shrink_logratio_naive(clr(p), off);
  CHECK(c.covariance.representation() == Representation::Clr);
}

TEST_CASE("published ALR target on the identity") {
  const auto t = lu_target_alr(CovMatrix::alr(Matrix::Identity(2, 2), 2), LuTargetForm::Published).target.values();
  CHECK(t(0, 1) == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
  CHECK(t(0, 0) == doctest::Approx(7.0 / 9.0).epsilon(1e-15));
  CHECK(t(1, 1) == doctest::Approx(7.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("published targets are not fixed points of LU matrices") {
  const AlphaVector ones(Vector::Ones(3));
  const auto t = lu_target_alr(lu_sigma(ones), LuTargetForm::Published).target.values();
  CHECK(t(0, 1) == doctest::Approx(4.0 / 3.0));
  const auto tc = lu_target_clr(lu_gamma(ones), LuTargetForm::Published).target.values();
  CHECK(tc(0, 0) == doctest::Approx(4.0 / 9.0));
}

TEST_CASE("LU targets reproduce LU matrices") {
  Gen g(15);
  for (int t = 0; t < 200; ++t) {
    const AlphaVector alpha(random_alpha(g, uniform_index(g, 3, 40)));
    const auto s = lu_sigma(alpha);
    const auto gm = lu_gamma(alpha);
    const auto ta = lu_target_alr(s);
    const auto tc = lu_target_clr(gm);
    CHECK(max_abs(ta.target.values() - s.values()) < 1e-12 * std::max(1.0, max_abs(s.values())));
    CHECK(max_abs(tc.target.values() - gm.values()) < 1e-12 * std::max(1.0, max_abs(gm.values())));
    CHECK(max_abs(ta.implied_alpha - alpha.values()) < 1e-11);
    CHECK(!ta.negative_alpha);
  }
  const AlphaVector a4((Vector(4) << 1, 2, 3, 4).finished());
  CHECK(max_abs(lu_target_clr(lu_gamma(a4)).target.values() - lu_gamma(a4).values()) < 1e-12);
}

TEST_CASE("LU targets of zero and equal-diagonal inputs") {
  CHECK(max_abs(lu_target_alr(CovMatrix::alr(Matrix::Zero(3, 3), 3)).target.values()) == 0.0);
  CHECK(max_abs(lu_target_clr(CovMatrix::clr(Matrix::Zero(4, 4))).target.values()) == 0.0);
  Gen g(16);
  for (int t = 0; t < 20; ++t) {
    const Index d = uniform_index(g, 3, 10);
    Matrix m = random_spd(g, d);
    m.diagonal().setConstant(uniform(g, 1.0, 3.0));
    const auto tc = lu_target_clr(CovMatrix::clr(m)).target.values();
    CHECK(tc.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);
    CHECK(max_abs(tc.diagonal() - m.diagonal()) < 1e-12);
  }
}

TEST_CASE("target kind must match the representation") {
  const auto s = CovMatrix::alr(Matrix::Identity(3, 3), 3);
  const auto gm = sigma_to_gamma(s);
  CHECK(error_code_of([&] { lu_target_alr(gm); }) == ErrorCode::RepresentationMismatch);
  CHECK(error_code_of([&] { lu_target_clr(s); }) == ErrorCode::RepresentationMismatch);
  Gen g(17);
  const Matrix x = normal_matrix(g, 6, 3);
  CHECK(error_code_of([&] { shrink_logratio_direct(s, x, TargetKind::LuClr); }) ==
        ErrorCode::RepresentationMismatch);
  CHECK(error_code_of([&] { shrink_logratio_direct(s, normal_matrix(g, 6, 4), TargetKind::LuAlr); }) ==
        ErrorCode::ShapeMismatch);
}

TEST_CASE("direct LU shrinkage") {
  Gen g(18);
  const Index d = 6;
  const auto p = random_composition(g, 8, d);
  const auto x = alr(p, d - 1);
  const auto s = sample_covariance(x);
  const auto est = shrink_logratio_direct(s, x.values(), TargetKind::LuAlr);
  CHECK(est.target_kind == TargetKind::LuAlr);
  const Matrix t = lu_target_alr(s).target.values();
  CHECK(max_abs(est.covariance.values() - shrink(s.values(), t, est.lambda.value)) < 1e-14);

  const auto y = clr(p);
  const auto gm = sample_covariance(y);
  const auto ec = shrink_logratio_direct(gm, y.values(), TargetKind::LuClr);
  CHECK(ec.covariance.values().rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);

  const auto custom = shrink_logratio_direct(s, x.values(), TargetKind::Custom);
  CHECK(custom.target_kind == TargetKind::Custom);
  CHECK(max_abs(custom.covariance.values() -
                shrink(s.values(), Matrix(s.values().diagonal().asDiagonal()), custom.lambda.value)) < 1e-14);
}

TEST_CASE("Bayesian equivalence") {
  WishartPrior prior{1, Matrix::Identity(1, 1), 1.0, Vector::Zero(1)};
  const auto b = bayes_equivalence(prior, 3, Vector::Zero(1), Matrix::Identity(1, 1));
  CHECK(b.lambda == doctest::Approx(0.5));

  Gen g(19);
  for (int t = 0; t < 100; ++t) {
    const Index k = uniform_index(g, 1, 8);
    const Index n = uniform_index(g, 2, 50);
    WishartPrior pr{static_cast<int>(uniform_index(g, k, k + 10)), random_spd(g, k), uniform(g, 0.1, 5.0),
                    normal_matrix(g, k, 1)};
    const Vector xbar = normal_matrix(g, k, 1);
    const Matrix s = random_spd(g, k);
    const auto eq = bayes_equivalence(pr, n, xbar, s);
    const Matrix lhs = static_cast<double>(pr.nu + n) * shrink(s, eq.target, eq.lambda);
    const Matrix rhs = posterior_scale(pr, n, xbar, s);
    CHECK(max_abs(lhs - rhs) < 1e-10 * std::max(1.0, max_abs(rhs)));

    pr.mu0 = xbar;
    const auto same = bayes_equivalence(pr, n, xbar, s);
    CHECK(max_abs(same.target - pr.scale / (pr.nu + 1.0)) < 1e-15);
  }
}

TEST_CASE("Bayesian prior validation") {
  const WishartPrior ok{2, Matrix::Identity(2, 2), 1.0, Vector::Zero(2)};
  CHECK(error_code_of([&] { bayes_equivalence(ok, 3, Vector::Zero(3), Matrix::Identity(2, 2)); }) ==
        ErrorCode::ShapeMismatch);
  WishartPrior low = ok;
  low.nu = 1;
  CHECK(error_code_of([&] { bayes_equivalence(low, 3, Vector::Zero(2), Matrix::Identity(2, 2)); }) ==
        ErrorCode::InvalidArgument);
  WishartPrior indefinite = ok;
  indefinite.scale(1, 1) = -1.0;
  CHECK(error_code_of([&] { bayes_equivalence(indefinite, 3, Vector::Zero(2), Matrix::Identity(2, 2)); }) ==
        ErrorCode::NotPositiveDefinite);
}
