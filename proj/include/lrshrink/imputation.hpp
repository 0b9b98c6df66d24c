#pragma once

#include <string>
#include <vector>

#include "lrshrink/composition.hpp"

namespace lrshrink {

enum class ImputationMethod { Czm, FreqShrink };

std::string_view to_string(ImputationMethod method);

struct ImputedFrequencies {
  CompositionMatrix values;
  ImputationMethod method;
  double delta_fraction = 0.0;   ///< CZM parameter (also used by fallbacks)
  Vector row_lambda;             ///< frequency-shrinkage intensity per row (empty for CZM)
  std::vector<std::string> warnings;
};

inline constexpr double kDefaultDeltaFraction = 0.65;

/// Count zero multiplicative replacement. In a row with total n and z zeros,
/// zeros become delta = f / (n + 1) and nonzero cells (c / n)(1 - z delta).
ImputedFrequencies impute_czm(const CountMatrix& counts, double delta_fraction = kDefaultDeltaFraction);

/// James-Stein shrinkage of row frequencies toward the uniform distribution.
/// Rows whose intensity is 0 but that still contain zeros (a single nonzero
/// part) fall back to CZM with delta = f / (max(n, z) + 1).
ImputedFrequencies impute_freq_shrink(const CountMatrix& counts);

/// Whether CZM can replace the zeros of a row with total n and z zeros.
bool czm_feasible(double total, Index zeros, double delta_fraction = kDefaultDeltaFraction);

ImputedFrequencies impute(const CountMatrix& counts, ImputationMethod method,
                          double delta_fraction = kDefaultDeltaFraction);

}  // namespace lrshrink
