#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lrshrink/covariance.hpp"
#include "lrshrink/imputation.hpp"
#include "lrshrink/simulation.hpp"

// Monte-Carlo comparison of covariance and partial-correlation estimators on
// logistic-normal data (synthetic benchmark) and on row subsamples of a count
// matrix (subsample benchmark).

namespace lrshrink {

enum class Estimator { None, NaiveAlr, NaiveClr, Basis };
enum class Metric { CovClr, CovAlr, Pcor };

std::string_view to_string(Estimator e);
std::string_view to_string(Metric m);
Estimator parse_estimator(std::string_view name);
ImputationMethod parse_imputation(std::string_view name);

/// Mean squared difference over all entries, or over off-diagonal entries
/// only (partial-correlation matrices have a unit diagonal).
double elementwise_mse(const Matrix& a, const Matrix& b, bool off_diagonal_only = false);

/// Population model for a pool of parts: mean and covariance of a log basis.
/// Subsets of parts are turned into ALR parameters by select_truth.
struct PoolTruth {
  Vector log_mean;
  Matrix omega;
  Labels labels;

  Index parts() const noexcept { return log_mean.size(); }
};

struct PoolTruthOptions {
  Index factors = 3;
  double factor_scale = 0.35;
  double edge_probability = 0.05;
  double edge_strength = 0.35;
};

/// A random log-basis covariance with a few shared factors, sparse direct
/// interactions and heterogeneous variances.
PoolTruth generate_pool_truth(Index parts, std::uint64_t seed, const PoolTruthOptions& options = {});
/// Embeds ALR parameters as a basis model whose reference part is constant.
PoolTruth pool_truth_from_alr(const Vector& mu, const CovMatrix& sigma);

struct Truth {
  std::vector<Index> parts;  ///< pool indices, reference last
  Vector mu;                 ///< ALR mean
  CovMatrix sigma;           ///< ALR covariance, reference D-1
  CovMatrix gamma;           ///< CLR covariance
  Matrix pcor;               ///< D x D partial correlations
};

Truth select_truth(const PoolTruth& pool, std::span<const Index> parts);

/// Ground truth of a subsample benchmark repetition: unshrunk estimates on
/// the zero-free pool restricted to `parts`.
Truth empirical_truth(const CountMatrix& pool, std::span<const Index> parts);

struct CountDatasetOptions {
  Index rows = 1200;
  Index parts = 60;
  double log_depth_mean = std::log(5000.0);
  double log_depth_sd = 0.8;
  Index min_depth = 20;
};

/// Multinomial counts drawn from logistic-normal frequencies with log-normal
/// sequencing depths; low-depth rows carry zeros.
CountMatrix generate_count_dataset(const CountDatasetOptions& options, std::uint64_t seed);

struct BenchmarkScenario {
  enum class Kind { Synthetic, Subsample };
  enum class Source { Generated, Files };

  std::string name = "benchmark";
  Kind kind = Kind::Synthetic;
  Index parts = 40;
  std::vector<Index> sample_sizes{8, 40, 200};
  int repetitions = 200;
  std::vector<Estimator> estimators{Estimator::None, Estimator::NaiveAlr, Estimator::NaiveClr, Estimator::Basis};
  std::uint64_t master_seed = 1;
  bool variance_shrinkage = true;

  // Synthetic ground truth.
  Source truth_source = Source::Generated;
  Index pool_parts = 240;
  std::uint64_t truth_seed = 1;
  PoolTruthOptions truth_options;
  std::filesystem::path mu_path;
  std::filesystem::path sigma_path;

  // Subsample dataset.
  Source dataset_source = Source::Generated;
  std::filesystem::path dataset_path;
  bool dataset_header = false;
  std::uint64_t dataset_seed = 1;
  CountDatasetOptions dataset_options;
  std::vector<ImputationMethod> imputations{ImputationMethod::Czm, ImputationMethod::FreqShrink};
  bool zero_free_arm = true;
  double delta_fraction = kDefaultDeltaFraction;

  void validate() const;
};

struct BenchmarkRecord {
  int repetition = 0;
  Index n = 0;
  Estimator estimator = Estimator::None;
  std::string imputation = "none";
  Metric metric = Metric::Pcor;
  double mse = 0.0;
  double lambda = 0.0;      ///< NaN for the unshrunk arm
  double lambda_var = 0.0;  ///< NaN when variances are not shrunk
  bool singular = false;    ///< ALR covariance not invertible
};

struct BenchmarkReport {
  std::vector<BenchmarkRecord> records;

  /// Orders records by (repetition, N, estimator, imputation, metric).
  void sort();
  std::string to_csv() const;
};

struct SummaryRow {
  Index n;
  Estimator estimator;
  std::string imputation;
  Metric metric;
  double median_mse;
  std::size_t count;
};

/// Median MSE per (N, estimator, imputation, metric).
std::vector<SummaryRow> summarize(const BenchmarkReport& report);
double median_mse(const BenchmarkReport& report, Index n, Estimator estimator, Metric metric,
                  std::string_view imputation = "none");

/// Scores every estimator on one sample against `truth`; the reference part
/// is the last column. Externally imputed matrices can be scored this way.
std::vector<BenchmarkRecord> evaluate_estimators(const CompositionMatrix& p, const Truth& truth,
                                                 std::span<const Estimator> estimators, int repetition,
                                                 const std::string& imputation, bool variance_shrinkage = true);

/// Repetitions run in parallel on `threads` OpenMP threads (0 = runtime default).
BenchmarkReport run_synthetic_benchmark(const BenchmarkScenario& scenario, const PoolTruth& pool, int threads = 1);
BenchmarkReport run_subsample_benchmark(const CountMatrix& dataset, const BenchmarkScenario& scenario,
                                        int threads = 1);
/// Resolves the scenario's truth or dataset source and runs it.
BenchmarkReport run_benchmark(const BenchmarkScenario& scenario, int threads = 1);

BenchmarkScenario parse_scenario(std::string_view toml_text, const std::filesystem::path& base_dir = {});
BenchmarkScenario load_scenario(const std::filesystem::path& path);

}  // namespace lrshrink
