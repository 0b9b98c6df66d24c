#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "lrshrink/lu.hpp"
#include "lrshrink/simulation.hpp"
#include "test_support.hpp"

using namespace lrshrink;
using namespace lrshrink::test;

namespace {

AlphaVector alpha_of(std::initializer_list<double> v) {
  Vector a(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) a(i++) = x;
  return AlphaVector(a);
}

// Pair partial correlation written with its leave-one-out sums.
double leave_one_out_pcor(const Vector& alpha, Index i, Index j) {
  double si = 0.0;
  double sj = 0.0;
  for (Index k = 0; k < alpha.size(); ++k) {
    if (k != i) si += 1.0 / alpha(k);
    if (k != j) sj += 1.0 / alpha(k);
  }
  return std::sqrt((1.0 / alpha(i)) * (1.0 / alpha(j)) / (si * sj));
}

}  // namespace

TEST_CASE("alpha validation") {
  CHECK(error_code_of([] { alpha_of({1, 0, 2}); }) == ErrorCode::NonPositiveAlpha);
  CHECK(error_code_of([] { alpha_of({1, -2, 2}); }) == ErrorCode::NonPositiveAlpha);
  CHECK(error_code_of([] { alpha_of({1, 2}); }) == ErrorCode::DimensionTooSmall);
}

TEST_CASE("LU sigma examples") {
  const Matrix s = lu_sigma(alpha_of({1, 1, 1})).values();
  CHECK(s(0, 0) == 2.0);
  CHECK(s(0, 1) == 1.0);
  const auto s4 = lu_sigma(alpha_of({1, 2, 3, 4}));
  CHECK(s4.ref() == 3);
  CHECK(s4.values().diagonal() == Vector((Vector(3) << 5, 6, 7).finished()));
  CHECK(s4.values()(0, 2) == 4.0);
}

TEST_CASE("LU gamma examples") {
  const Matrix g = lu_gamma(alpha_of({1, 1, 1})).values();
  CHECK(g(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(g(0, 1) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("LU matrices agree with the covariance maps") {
  Gen gen(1);
  for (int t = 0; t < 100; ++t) {
    const AlphaVector a(random_alpha(gen, uniform_index(gen, 3, 30)));
    const Index d = a.parts();
    const auto omega = CovMatrix::basis(a.values().asDiagonal().toDenseMatrix());
    const auto s = lu_sigma(a);
    const auto g = lu_gamma(a);
    CHECK(max_abs(s.values() - omega_to_sigma(omega, d - 1).values()) < 1e-12);
    CHECK(max_abs(g.values() - omega_to_gamma(omega).values()) < 1e-12);
    CHECK(max_abs(g.values() - sigma_to_gamma(s).values()) < 1e-12);
    CHECK(g.values().rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    CHECK(Eigen::LLT<Matrix>(s.values()).info() == Eigen::Success);
  }
}

TEST_CASE("LU determinant") {
  CHECK(lu_determinant(alpha_of({1, 1, 1})) == doctest::Approx(3.0));
  CHECK(lu_determinant(alpha_of({1, 2, 3})) == doctest::Approx(11.0));
  CHECK(lu_sigma(alpha_of({1, 2, 3})).values().determinant() == doctest::Approx(11.0));
  Gen gen(2);
  for (int t = 0; t < 100; ++t) {
    const AlphaVector a(random_alpha(gen, uniform_index(gen, 3, 20)));
    const double numeric = lu_sigma(a).values().partialPivLu().determinant();
    const double closed = lu_determinant(a);
    CHECK(closed > 0.0);
    CHECK(std::abs(closed - numeric) < 1e-10 * std::abs(numeric));
    CHECK(std::abs(lu_determinant_product_form(a) - closed) < 1e-12 * closed);
  }
}

TEST_CASE("LU inverse") {
  const Matrix inv = lu_sigma_inverse(alpha_of({1, 1, 1}));
  CHECK(inv(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(inv(0, 1) == doctest::Approx(-1.0 / 3.0));

  const Index d = 500;
  const double alpha = 2.5;
  const Matrix big = lu_sigma_inverse(AlphaVector(Vector::Constant(d, alpha)));
  CHECK(big(7, 7) == doctest::Approx((d - 1.0) / d / alpha).epsilon(1e-13));

  Gen gen(3);
  for (int t = 0; t < 100; ++t) {
    const AlphaVector a(random_alpha(gen, uniform_index(gen, 3, 50)));
    const Index k = a.parts() - 1;
    CHECK(max_abs(lu_sigma(a).values() * lu_sigma_inverse(a) - Matrix::Identity(k, k)) < 1e-10);
  }
}

TEST_CASE("LU partial correlation examples") {
  CHECK(lu_partial_correlation(alpha_of({1, 1, 1})).values(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(lu_partial_correlation(alpha_of({1, 1, 1, 1})).values(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const auto r = lu_partial_correlation(alpha_of({1, 2, 3}));
  CHECK(r.values(0, 1) == doctest::Approx(std::sqrt(0.45)).epsilon(1e-14));
  CHECK(r.values(0, 1) == doctest::Approx(0.6708).epsilon(1e-4));
  CHECK(partial_correlation(lu_sigma(alpha_of({1, 2, 3}))).values(0, 1) == doctest::Approx(std::sqrt(0.45)));
}

TEST_CASE("closed-form partial correlations match numeric inversion and the leave-one-out form") {
  Gen gen(4);
  for (int t = 0; t < 100; ++t) {
    const AlphaVector a(random_alpha(gen, uniform_index(gen, 3, 50)));
    const Index d = a.parts();
    const auto closed = lu_partial_correlation(a);
    const auto numeric = partial_correlation(lu_sigma(a));
    CHECK(max_abs(closed.values - numeric.values) < 1e-10);
    const auto all = lu_partial_correlation_all(a);
    CHECK(max_abs(all.values - partial_correlation(lu_gamma(a)).values) < 1e-10);
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) {
        if (i == j) continue;
        CHECK(all.values(i, j) > 0.0);
        CHECK(std::abs(all.values(i, j) - leave_one_out_pcor(a.values(), i, j)) < 1e-12);
      }
    }
  }
}

TEST_CASE("pair partial correlation falls as other parts lose variance") {
  Vector a = (Vector(5) << 1.0, 2.0, 0.5, 1.5, 3.0).finished();
  double prev = lu_pair_partial_correlation(a, 0, 1);
  for (int step = 0; step < 20; ++step) {
    a(3) *= 0.7;  // a_3 = 1/alpha_3 grows
    const double r = lu_pair_partial_correlation(a, 0, 1);
    CHECK(r < prev);
    prev = r;
  }
  a(4) = 1e12;  // a part with huge basis variance barely matters
  const Vector without = (Vector(4) << a(0), a(1), a(2), a(3)).finished();
  CHECK(lu_pair_partial_correlation(a, 0, 1) == doctest::Approx(lu_pair_partial_correlation(without, 0, 1)).epsilon(1e-10));
}

TEST_CASE("strongest pair") {
  CHECK(strongest_pair(alpha_of({3, 1, 2, 0.5})).first == 1);
  CHECK(strongest_pair(alpha_of({3, 1, 2, 0.5})).second == 3);
  const auto tie = strongest_pair(alpha_of({1, 1, 1, 1}));
  CHECK(tie.first == 0);
  CHECK(tie.second == 1);
}

TEST_CASE("removal sequences") {
  const auto a = alpha_of({1, 5, 2, 5, 3});
  const auto seq = removal_sequence(a, {0, 2}, RemovalOrder::SmallestInverseFirst);
  CHECK(seq == std::vector<Index>{1, 3});
  const auto r1 = removal_sequence(AlphaVector(Vector::Ones(12)), {2, 7}, RemovalOrder::Random, 9);
  const auto r2 = removal_sequence(AlphaVector(Vector::Ones(12)), {2, 7}, RemovalOrder::Random, 9);
  CHECK(r1 == r2);
  CHECK(r1.size() == 9);
  const std::set<Index> unique(r1.begin(), r1.end());
  CHECK(unique.size() == 9);
  CHECK(!unique.count(2));
  CHECK(!unique.count(7));
}

TEST_CASE("dilution with equal alpha is exactly 1/(D-1)") {
  const AlphaVector a(Vector::Ones(11));
  const auto seq = removal_sequence(a, {0, 1}, RemovalOrder::SmallestInverseFirst);
  const auto series = dilution_experiment(a, {0, 1}, seq);
  REQUIRE(series.size() == 9);
  for (std::size_t k = 0; k < series.size(); ++k) {
    CHECK(series[k].parts == static_cast<Index>(k) + 3);
    CHECK(series[k].partial_correlation == 1.0 / static_cast<double>(series[k].parts - 1));
  }
  CHECK(series.front().partial_correlation == 0.5);
  CHECK(series.back().partial_correlation == 0.1);

  const auto shuffled = dilution_experiment(a, {0, 1}, removal_sequence(a, {0, 1}, RemovalOrder::Random, 3));
  for (std::size_t k = 0; k < series.size(); ++k) CHECK(shuffled[k].partial_correlation == series[k].partial_correlation);
}

TEST_CASE("dilution series decreases for random alpha") {
  Gen gen(5);
  for (int t = 0; t < 20; ++t) {
    const AlphaVector a(random_alpha(gen, uniform_index(gen, 4, 60)));
    const auto pair = strongest_pair(a);
    const auto series = dilution_experiment(a, pair, removal_sequence(a, pair, RemovalOrder::Random, 11));
    for (std::size_t k = 1; k < series.size(); ++k) {
      CHECK(series[k].partial_correlation < series[k - 1].partial_correlation);
    }
    CHECK(series.back().partial_correlation == doctest::Approx(lu_pair_partial_correlation(a.values(), pair.first, pair.second)));
  }
}

TEST_CASE("dilution argument checks") {
  const AlphaVector a(Vector::Ones(6));
  const std::vector<Index> with_pair{2, 0};
  CHECK(error_code_of([&] { dilution_experiment(a, {0, 1}, with_pair); }) == ErrorCode::PairRemoved);
  const std::vector<Index> repeated{2, 2};
  CHECK(error_code_of([&] { dilution_experiment(a, {0, 1}, repeated); }) == ErrorCode::InvalidArgument);
  const std::vector<Index> outside{9};
  CHECK(error_code_of([&] { dilution_experiment(a, {0, 1}, outside); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("logratio covariances of disjoint pairs vanish for LU data") {
  const AlphaVector a = alpha_of({0.5, 1.0, 1.5, 0.8, 1.2});
  const Index d = a.parts();
  const auto p = sample_logistic_normal(Vector::Zero(d - 1), lu_sigma(a), 100000, 2024);
  const Matrix logp = p.values().array().log();
  const auto lr = [&](Index i, Index k) { return Vector(logp.col(i) - logp.col(k)); };
  const auto cov = [](const Vector& u, const Vector& v) {
    return ((u.array() - u.mean()) * (v.array() - v.mean())).sum() / static_cast<double>(u.size() - 1);
  };
  CHECK(std::abs(cov(lr(0, 1), lr(2, 3))) < 0.05);
  CHECK(std::abs(cov(lr(0, 4), lr(1, 3))) < 0.05);
  CHECK(std::abs(cov(lr(2, 0), lr(4, 1))) < 0.05);
  // Shared reference: covariance equals the reference variance.
  CHECK(cov(lr(0, 4), lr(1, 4)) == doctest::Approx(a[4]).epsilon(0.05));
}
