#include "lrshrink/lu.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "lrshrink/error.hpp"

namespace lrshrink {
namespace {

double pair_value(double ai, double aj, double harmonic_total) {
  // Written so that equal alpha gives exactly 1/(D-1).
  return std::sqrt(ai * aj) / std::sqrt((harmonic_total - ai) * (harmonic_total - aj));
}

void check_pair(PartPair pair, Index parts) {
  if (pair.first == pair.second || pair.first < 0 || pair.second < 0 || pair.first >= parts ||
      pair.second >= parts) {
    throw Error(ErrorCode::InvalidArgument, "pair must name two distinct parts");
  }
}

}  // namespace

AlphaVector::AlphaVector(Vector values) : values_(std::move(values)) {
  if (values_.size() < 3) throw Error(ErrorCode::DimensionTooSmall, "alpha needs at least 3 parts");
  for (Index i = 0; i < values_.size(); ++i) {
    if (!(values_(i) > 0.0) || !std::isfinite(values_(i))) {
      throw Error(ErrorCode::NonPositiveAlpha, "alpha[" + std::to_string(i) + "] must be positive and finite");
    }
  }
}

CovMatrix lu_sigma(const AlphaVector& alpha) {
  const Index d = alpha.parts();
  const double ref = alpha[d - 1];
  Matrix s = Matrix::Constant(d - 1, d - 1, ref);
  for (Index i = 0; i < d - 1; ++i) s(i, i) = alpha[i] + ref;
  return CovMatrix::alr(std::move(s), d - 1);
}

CovMatrix lu_gamma(const AlphaVector& alpha) {
  const Index d = alpha.parts();
  const double dd = static_cast<double>(d);
  const double mean = alpha.values().sum() / dd;
  Matrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      g(i, j) = i == j ? alpha[i] - (2.0 * alpha[i] - mean) / dd : -(alpha[i] + alpha[j] - mean) / dd;
    }
  }
  return CovMatrix::clr(std::move(g));
}

double lu_determinant(const AlphaVector& alpha) {
  const Index d = alpha.parts();
  double total = 0.0;
  for (Index i = 0; i < d; ++i) {
    double prod = 1.0;
    for (Index k = 0; k < d; ++k) {
      if (k != i) prod *= alpha[k];
    }
    total += prod;
  }
  return total;
}

double lu_determinant_product_form(const AlphaVector& alpha) {
  return alpha.values().prod() * alpha.values().cwiseInverse().sum();
}

Matrix lu_sigma_inverse(const AlphaVector& alpha) {
  const Index d = alpha.parts();
  const Vector a = alpha.values().cwiseInverse();
  const double h = a.sum();
  Matrix inv(d - 1, d - 1);
  for (Index i = 0; i < d - 1; ++i) {
    for (Index j = 0; j < d - 1; ++j) inv(i, j) = i == j ? a(i) * (h - a(i)) / h : -a(i) * a(j) / h;
  }
  return inv;
}

double lu_pair_partial_correlation(const Vector& alpha, Index i, Index j) {
  check_pair({i, j}, alpha.size());
  const Vector a = alpha.cwiseInverse();
  return pair_value(a(i), a(j), a.sum());
}

PartialCorrMatrix lu_partial_correlation(const AlphaVector& alpha) {
  const Index d = alpha.parts();
  const Vector a = alpha.values().cwiseInverse();
  const double h = a.sum();
  PartialCorrMatrix out;
  out.values = Matrix::Identity(d - 1, d - 1);
  for (Index i = 0; i < d - 1; ++i) {
    out.parts.push_back(i);
    for (Index j = 0; j < i; ++j) {
      out.values(i, j) = out.values(j, i) = pair_value(a(i), a(j), h);
    }
  }
  return out;
}

PartialCorrMatrix lu_partial_correlation_all(const AlphaVector& alpha) {
  // The closed form holds for any reference outside the pair, so pairs that
  // involve part D-1 need no separate treatment.
  const Index d = alpha.parts();
  const Vector a = alpha.values().cwiseInverse();
  const double h = a.sum();
  PartialCorrMatrix out;
  out.values = Matrix::Identity(d, d);
  for (Index i = 0; i < d; ++i) {
    out.parts.push_back(i);
    for (Index j = 0; j < i; ++j) out.values(i, j) = out.values(j, i) = pair_value(a(i), a(j), h);
  }
  return out;
}

PartPair strongest_pair(const AlphaVector& alpha) {
  const Index d = alpha.parts();
  const Vector a = alpha.values().cwiseInverse();
  const double h = a.sum();
  PartPair best{0, 1};
  double best_r = -1.0;
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      const double r = pair_value(a(i), a(j), h);
      if (r > best_r) {
        best_r = r;
        best = {i, j};
      }
    }
  }
  return best;
}

std::vector<Index> removal_sequence(const AlphaVector& alpha, PartPair pair, RemovalOrder order,
                                    std::uint64_t seed) {
  check_pair(pair, alpha.parts());
  std::vector<Index> rest;
  for (Index k = 0; k < alpha.parts(); ++k) {
    if (k != pair.first && k != pair.second) rest.push_back(k);
  }
  if (order == RemovalOrder::SmallestInverseFirst) {
    std::stable_sort(rest.begin(), rest.end(), [&](Index x, Index y) { return alpha[x] > alpha[y]; });
  } else {
    std::mt19937_64 rng(seed);
    std::shuffle(rest.begin(), rest.end(), rng);
  }
  // Stop when a single part besides the pair remains.
  rest.pop_back();
  return rest;
}

std::vector<DilutionPoint> dilution_experiment(const AlphaVector& alpha, PartPair pair,
                                               std::span<const Index> order) {
  const Index d = alpha.parts();
  check_pair(pair, d);
  if (static_cast<Index>(order.size()) > d - 3) {
    throw Error(ErrorCode::InvalidArgument, "removal sequence would leave fewer than 3 parts");
  }
  std::vector<bool> alive(static_cast<std::size_t>(d), true);
  for (Index k : order) {
    if (k == pair.first || k == pair.second) throw Error(ErrorCode::PairRemoved, "removal order eliminates the pair");
    if (k < 0 || k >= d || !alive[static_cast<std::size_t>(k)]) {
      throw Error(ErrorCode::InvalidArgument, "removal order names an invalid or repeated part");
    }
    alive[static_cast<std::size_t>(k)] = false;
  }
  std::fill(alive.begin(), alive.end(), true);

  const double ai = 1.0 / alpha[pair.first];
  const double aj = 1.0 / alpha[pair.second];
  auto current = [&](Index parts) {
    double h = 0.0;
    for (Index k = 0; k < d; ++k) {
      if (alive[static_cast<std::size_t>(k)]) h += 1.0 / alpha[k];
    }
    return DilutionPoint{parts, pair_value(ai, aj, h)};
  };

  std::vector<DilutionPoint> series;
  series.reserve(order.size() + 1);
  series.push_back(current(d));
  Index parts = d;
  for (Index k : order) {
    alive[static_cast<std::size_t>(k)] = false;
    series.push_back(current(--parts));
  }
  std::reverse(series.begin(), series.end());
  return series;
}

}  // namespace lrshrink
