#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrshrink/covariance.hpp"

// Closed forms for logratio uncorrelated (LU) compositions: compositions
// obtained by closing a basis with uncorrelated log components. alpha_k is
// the variance of log m_k; the last part (index D-1) serves as ALR reference.

namespace lrshrink {

class AlphaVector {
 public:
  explicit AlphaVector(Vector values);

  const Vector& values() const noexcept { return values_; }
  Index parts() const noexcept { return values_.size(); }
  double operator[](Index i) const { return values_(i); }

 private:
  Vector values_;
};

/// sigma_ij = alpha_i + alpha_D on the diagonal, alpha_D elsewhere.
CovMatrix lu_sigma(const AlphaVector& alpha);
CovMatrix lu_gamma(const AlphaVector& alpha);

/// |Sigma| = sum_i prod_{k != i} alpha_k.
double lu_determinant(const AlphaVector& alpha);
/// The equivalent form prod_i alpha_i * sum_i 1/alpha_i.
double lu_determinant_product_form(const AlphaVector& alpha);

/// Closed-form inverse of lu_sigma(alpha). Each element of the cofactor form
/// is divided through by prod(alpha) so that large D does not overflow:
/// diagonal a_i (H - a_i) / H, off-diagonal -a_i a_j / H with a = 1/alpha,
/// H = sum_k a_k.
Matrix lu_sigma_inverse(const AlphaVector& alpha);

/// Closure-induced partial correlation of parts i != j:
/// sqrt(a_i a_j / ((H - a_i)(H - a_j))). Does not depend on the reference.
double lu_pair_partial_correlation(const Vector& alpha, Index i, Index j);

/// Partial correlations of parts 0..D-2 (the ALR block for reference D-1).
PartialCorrMatrix lu_partial_correlation(const AlphaVector& alpha);
/// All D parts; pairs touching part D-1 equal what a rotated reference gives.
PartialCorrMatrix lu_partial_correlation_all(const AlphaVector& alpha);

struct PartPair {
  Index first = 0;
  Index second = 1;
};

/// Pair with the largest closure-induced partial correlation; ties go to the
/// lexicographically smallest pair.
PartPair strongest_pair(const AlphaVector& alpha);

enum class RemovalOrder { SmallestInverseFirst, Random };

/// Order in which the parts outside `pair` are eliminated. The default
/// removes the part with the smallest 1/alpha (largest alpha) first, ties by
/// index; Random is a seeded shuffle.
std::vector<Index> removal_sequence(const AlphaVector& alpha, PartPair pair, RemovalOrder order,
                                    std::uint64_t seed = 0);

struct DilutionPoint {
  Index parts;
  double partial_correlation;
};

/// Partial correlation of `pair` as parts are eliminated in `order`,
/// reported for ascending D (from D - order.size() up to the full D).
std::vector<DilutionPoint> dilution_experiment(const AlphaVector& alpha, PartPair pair,
                                               std::span<const Index> order);

}  // namespace lrshrink
