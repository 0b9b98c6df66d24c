#pragma once

#include <cstdint>
#include <random>

#include "lrshrink/composition.hpp"
#include "lrshrink/covariance.hpp"

namespace lrshrink {

using Rng = std::mt19937_64;

/// SplitMix64 mix of (master seed, repetition, stage). Each Monte-Carlo stage
/// draws from its own stream, so results do not depend on execution order.
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t repetition, std::uint64_t stage);
Rng make_rng(std::uint64_t master_seed, std::uint64_t repetition, std::uint64_t stage);

/// N logistic-normal compositions: alr(p) ~ N(mu, Sigma), reference Sigma.ref().
CompositionMatrix sample_logistic_normal(const Vector& mu, const CovMatrix& sigma, Index n, Rng& rng);
CompositionMatrix sample_logistic_normal(const Vector& mu, const CovMatrix& sigma, Index n, std::uint64_t seed);

/// log f_N(alr(p) | mu, Sigma) - sum_j log p_j for a single composition.
double logistic_normal_logdensity(const Vector& p, const Vector& mu, const CovMatrix& sigma);

/// Multinomial counts with the given per-row totals.
CountMatrix sample_multinomial(const CompositionMatrix& p, const Eigen::VectorXi& totals, Rng& rng);

}  // namespace lrshrink
