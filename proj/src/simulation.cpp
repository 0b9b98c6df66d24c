#include "lrshrink/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lrshrink/error.hpp"

namespace lrshrink {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Eigen::LLT<Matrix> cholesky(const CovMatrix& sigma) {
  if (sigma.representation() != Representation::Alr) {
    throw Error(ErrorCode::RepresentationMismatch, "logistic normal needs an ALR covariance");
  }
  Eigen::LLT<Matrix> llt(sigma.values());
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "Sigma is not positive definite");
  return llt;
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t repetition, std::uint64_t stage) {
  return splitmix64(splitmix64(splitmix64(master_seed) ^ repetition) ^ (stage * 0xd1b54a32d192ed03ULL));
}

Rng make_rng(std::uint64_t master_seed, std::uint64_t repetition, std::uint64_t stage) {
  return Rng(stream_seed(master_seed, repetition, stage));
}

CompositionMatrix sample_logistic_normal(const Vector& mu, const CovMatrix& sigma, Index n, Rng& rng) {
  const Index k = sigma.values().rows();
  if (mu.size() != k) throw Error(ErrorCode::ShapeMismatch, "mu and Sigma differ in dimension");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  const Eigen::LLT<Matrix> llt = cholesky(sigma);
  const Matrix lower = llt.matrixL();
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, k);
  Vector z(k);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < k; ++j) z(j) = normal(rng);
    x.row(i) = (mu + lower * z).transpose();
  }
  return alr_inverse(AlrMatrix(std::move(x), sigma.ref(), sigma.labels()));
}

CompositionMatrix sample_logistic_normal(const Vector& mu, const CovMatrix& sigma, Index n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_logistic_normal(mu, sigma, n, rng);
}

double logistic_normal_logdensity(const Vector& p, const Vector& mu, const CovMatrix& sigma) {
  const Index k = sigma.values().rows();
  if (p.size() != k + 1 || mu.size() != k) throw Error(ErrorCode::ShapeMismatch, "dimension mismatch");
  const Eigen::LLT<Matrix> llt = cholesky(sigma);
  const CompositionMatrix comp(p.transpose());
  const Vector x = alr(comp, sigma.ref()).values().row(0).transpose();
  const Vector resid = llt.matrixL().solve(x - mu);
  const Matrix lower = llt.matrixL();
  const double log_det = 2.0 * lower.diagonal().array().log().sum();
  const double log_normal =
      -0.5 * static_cast<double>(k) * std::log(2.0 * std::numbers::pi) - 0.5 * log_det - 0.5 * resid.squaredNorm();
  return log_normal - comp.values().array().log().sum();
}

CountMatrix sample_multinomial(const CompositionMatrix& p, const Eigen::VectorXi& totals, Rng& rng) {
  if (totals.size() != p.samples()) throw Error(ErrorCode::ShapeMismatch, "one total per row expected");
  Matrix counts(p.samples(), p.parts());
  for (Index i = 0; i < p.samples(); ++i) {
    int remaining = totals(i);
    double mass = 1.0;
    for (Index j = 0; j < p.parts(); ++j) {
      int c = 0;
      if (j == p.parts() - 1) {
        c = remaining;
      } else if (remaining > 0) {
        const double q = std::clamp(p.values()(i, j) / mass, 0.0, 1.0);
        c = std::binomial_distribution<int>(remaining, q)(rng);
      }
      counts(i, j) = c;
      remaining -= c;
      mass -= p.values()(i, j);
    }
  }
  return CountMatrix(std::move(counts), p.labels());
}

}  // namespace lrshrink
