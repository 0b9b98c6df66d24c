#include "lrshrink/imputation.hpp"

#include <algorithm>
#include <string>

#include "lrshrink/error.hpp"

namespace lrshrink {
namespace {

void check_delta_fraction(double f) {
  if (!(f > 0.0 && f < 1.0)) {
    throw Error(ErrorCode::DeltaOutOfRange, "delta fraction must lie in (0, 1)");
  }
}

// `floor_zeros` raises the pseudo detection limit denominator to z + 1 so the
// replacement mass stays below 1 (used by the frequency-shrinkage fallback).
Eigen::RowVectorXd czm_row(const Eigen::RowVectorXd& counts, double delta_fraction, Index row,
                           bool floor_zeros = false) {
  const double n = counts.sum();
  if (n <= 0.0) throw Error(ErrorCode::EmptyRow, "row " + std::to_string(row + 1) + " has total 0");
  const double zeros = static_cast<double>((counts.array() == 0.0).count());
  const double delta = delta_fraction / ((floor_zeros ? std::max(n, zeros) : n) + 1.0);
  const double keep = 1.0 - zeros * delta;
  if (keep <= 0.0) {
    throw Error(ErrorCode::DeltaOutOfRange,
                "row " + std::to_string(row + 1) + ": replacement mass exceeds 1; lower the delta fraction");
  }
  Eigen::RowVectorXd out(counts.size());
  for (Index j = 0; j < counts.size(); ++j) out(j) = counts(j) == 0.0 ? delta : counts(j) / n * keep;
  return out;
}

}  // namespace

std::string_view to_string(ImputationMethod method) {
  switch (method) {
    case ImputationMethod::Czm: return "czm";
    case ImputationMethod::FreqShrink: return "freq-shrink";
  }
  return "?";
}

ImputedFrequencies impute_czm(const CountMatrix& counts, double delta_fraction) {
  check_delta_fraction(delta_fraction);
  Matrix out(counts.samples(), counts.parts());
  for (Index i = 0; i < counts.samples(); ++i) out.row(i) = czm_row(counts.values().row(i), delta_fraction, i);
  return {CompositionMatrix(std::move(out), counts.labels()), ImputationMethod::Czm, delta_fraction, {}, {}};
}

ImputedFrequencies impute_freq_shrink(const CountMatrix& counts) {
  const Index d = counts.parts();
  const double uniform = 1.0 / static_cast<double>(d);
  Matrix out(counts.samples(), d);
  Vector lambdas(counts.samples());
  std::vector<std::string> warnings;
  for (Index i = 0; i < counts.samples(); ++i) {
    const Eigen::RowVectorXd row = counts.values().row(i);
    const double n = row.sum();
    if (n < 2.0) throw Error(ErrorCode::RowTotalTooSmall, "row " + std::to_string(i + 1) + " has total below 2");
    const Eigen::RowVectorXd theta = row / n;
    const double numerator = 1.0 - theta.squaredNorm();
    const double denominator = (n - 1.0) * (theta.array() - uniform).square().sum();
    // Zero denominator: the frequencies already are the uniform target.
    const double lambda = denominator == 0.0 ? 1.0 : std::clamp(numerator / denominator, 0.0, 1.0);
    lambdas(i) = lambda;
    if (lambda == 0.0 && (row.array() == 0.0).any()) {
      warnings.push_back("row " + std::to_string(i + 1) + ": shrinkage intensity 0 with zeros; used CZM");
      out.row(i) = czm_row(row, kDefaultDeltaFraction, i, true);
      continue;
    }
    out.row(i) = (lambda * uniform + (1.0 - lambda) * theta.array()).matrix();
  }
  return {CompositionMatrix(std::move(out), counts.labels()), ImputationMethod::FreqShrink, kDefaultDeltaFraction,
          std::move(lambdas), std::move(warnings)};
}

bool czm_feasible(double total, Index zeros, double delta_fraction) {
  return total > 0.0 && static_cast<double>(zeros) * delta_fraction / (total + 1.0) < 1.0;
}

ImputedFrequencies impute(const CountMatrix& counts, ImputationMethod method, double delta_fraction) {
  return method == ImputationMethod::Czm ? impute_czm(counts, delta_fraction) : impute_freq_shrink(counts);
}

}  // namespace lrshrink
