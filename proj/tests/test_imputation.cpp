#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lrshrink/imputation.hpp"
#include "test_support.hpp"

using namespace lrshrink;
using namespace lrshrink::test;

namespace {

CountMatrix counts_of(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return CountMatrix(m);
}

CountMatrix random_counts(Gen& g, Index n, Index d, int max_count) {
  Matrix m(n, d);
  for (Index i = 0; i < n; ++i) {
    do {
      for (Index j = 0; j < d; ++j) m(i, j) = static_cast<double>(uniform_index(g, 0, max_count) * uniform_index(g, 0, 1));
    } while (m.row(i).sum() < 2.0);
  }
  return CountMatrix(m);
}

void check_valid(const ImputedFrequencies& f) {
  CHECK((f.values.values().array() > 0.0).all());
  CHECK((f.values.values().rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-9);
}

}  // namespace

TEST_CASE("CZM worked example") {
  const auto f = impute_czm(counts_of({{0, 1, 1}}), 0.65);
  const double delta = 0.65 / 3.0;
  CHECK(f.values.values()(0, 0) == doctest::Approx(delta).epsilon(1e-15));
  CHECK(f.values.values()(0, 1) == doctest::Approx(0.5 * (1.0 - delta)).epsilon(1e-15));
  CHECK(f.values.values()(0, 0) == doctest::Approx(0.2167).epsilon(1e-3));
  CHECK(f.values.values()(0, 2) == doctest::Approx(0.3917).epsilon(1e-3));
  CHECK(f.method == ImputationMethod::Czm);
  CHECK(f.delta_fraction == 0.65);
}

TEST_CASE("CZM leaves zero-free rows as their closure") {
  const auto c = counts_of({{2, 2, 4}, {1, 7, 3}});
  const auto f = impute_czm(c);
  CHECK((f.values.values().array() == closure(c).values().array()).all());
  CHECK(f.values.values()(0, 2) == 0.5);
}

TEST_CASE("CZM boundary rows") {
  check_valid(impute_czm(counts_of({{0, 0, 5}})));
  CHECK(error_code_of([] { impute_czm(counts_of({{0, 0, 0, 1}}), 0.9); }) == ErrorCode::DeltaOutOfRange);
  CHECK(error_code_of([] { impute_czm(counts_of({{0, 1, 1}}), 0.0); }) == ErrorCode::DeltaOutOfRange);
  CHECK(error_code_of([] { impute_czm(counts_of({{0, 1, 1}}), 1.0); }) == ErrorCode::DeltaOutOfRange);
}

TEST_CASE("frequency shrinkage worked example") {
  const auto f = impute_freq_shrink(counts_of({{0, 1, 9}}));
  const double lambda = 0.18 / (9.0 * (1.0 / 9.0 + std::pow(1.0 / 3.0 - 0.1, 2) + std::pow(1.0 / 3.0 - 0.9, 2)));
  CHECK(f.row_lambda(0) == doctest::Approx(lambda).epsilon(1e-14));
  CHECK(f.row_lambda(0) == doctest::Approx(0.041096).epsilon(1e-5));
  CHECK(f.values.values()(0, 0) == doctest::Approx(lambda / 3.0).epsilon(1e-14));
  CHECK(f.values.values()(0, 2) == doctest::Approx(lambda / 3.0 + (1.0 - lambda) * 0.9).epsilon(1e-14));
  check_valid(f);
}

TEST_CASE("frequency shrinkage of uniform counts") {
  const auto f = impute_freq_shrink(counts_of({{3, 3, 3}}));
  CHECK(f.row_lambda(0) == 1.0);
  for (Index j = 0; j < 3; ++j) CHECK(f.values.values()(0, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("frequency shrinkage falls back to CZM when lambda is 0") {
  const auto f = impute_freq_shrink(counts_of({{5, 0, 0}, {1, 2, 3}}));
  CHECK(f.row_lambda(0) == 0.0);
  CHECK(f.warnings.size() == 1);
  CHECK(f.values.values()(0, 1) == doctest::Approx(0.65 / 6.0));
  check_valid(f);
}

TEST_CASE("frequency shrinkage needs totals of at least 2") {
  CHECK(error_code_of([] { impute_freq_shrink(counts_of({{0, 1, 0}})); }) == ErrorCode::RowTotalTooSmall);
}

TEST_CASE("frequency shrinkage tends to ML frequencies as counts grow") {
  double prev = 1.0;
  for (double scale : {10.0, 100.0, 1000.0, 10000.0, 100000.0}) {
    const auto f = impute_freq_shrink(counts_of({{scale * 1, scale * 3, scale * 6}}));
    CHECK(f.row_lambda(0) < prev);
    prev = f.row_lambda(0);
    CHECK(std::abs(f.values.values()(0, 2) - 0.6) < 10.0 / scale);
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("imputed outputs are positive with unit sums") {
  Gen g(1);
  for (int t = 0; t < 100; ++t) {
    const auto c = random_counts(g, uniform_index(g, 1, 10), uniform_index(g, 3, 12), 30);
    const auto s = impute_freq_shrink(c);
    check_valid(s);
    try {
      check_valid(impute_czm(c, 0.3));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DeltaOutOfRange);
    }
    // Shrinkage never moves a row away from uniform.
    const Matrix theta = c.values().array().colwise() / c.row_totals().array();
    for (Index i = 0; i < c.samples(); ++i) {
      const double dd = static_cast<double>(c.parts());
      const double before = (theta.row(i).array() - 1.0 / dd).square().sum();
      const double after = (s.values.values().row(i).array() - 1.0 / dd).square().sum();
      if (s.row_lambda(i) > 0.0) CHECK(after <= before + 1e-15);
    }
  }
}

TEST_CASE("dispatch") {
  const auto c = counts_of({{0, 2, 4}});
  CHECK(impute(c, ImputationMethod::Czm).method == ImputationMethod::Czm);
  CHECK(impute(c, ImputationMethod::FreqShrink).method == ImputationMethod::FreqShrink);
  CHECK(to_string(ImputationMethod::FreqShrink) == "freq-shrink");
}

TEST_CASE("fallback for a single nonzero part in many parts stays admissible") {
  Matrix m = Matrix::Zero(1, 40);
  m(0, 3) = 2.0;
  CHECK(error_code_of([&] { impute_czm(CountMatrix(m)); }) == ErrorCode::DeltaOutOfRange);
  const auto f = impute_freq_shrink(CountMatrix(m));
  check_valid(f);
  CHECK(f.values.values()(0, 0) == doctest::Approx(0.65 / 40.0));
  CHECK(!czm_feasible(2.0, 39));
  CHECK(czm_feasible(100.0, 39));
}
