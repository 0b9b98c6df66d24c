#include "lrshrink/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include <toml.hpp>

#include "lrshrink/error.hpp"
#include "lrshrink/io.hpp"
#include "lrshrink/shrinkage.hpp"

namespace lrshrink {
namespace {

constexpr double kNa = std::numeric_limits<double>::quiet_NaN();
constexpr double kSingularCondition = 1e12;

// RNG stages within one repetition.
constexpr std::uint64_t kStagePartChoice = 0;
constexpr std::uint64_t kStageSamples = 1;  // + 2 * (index of N), + 1 for the zero-containing pool

std::vector<Index> choose_subset(Index pool, Index k, Rng& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(pool));
  std::iota(idx.begin(), idx.end(), Index{0});
  // Partial Fisher-Yates; the chosen subset is returned sorted.
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, pool - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<Index> choose_from(const std::vector<Index>& candidates, Index k, Rng& rng) {
  auto positions = choose_subset(static_cast<Index>(candidates.size()), k, rng);
  for (auto& p : positions) p = candidates[static_cast<std::size_t>(p)];
  return positions;
}

Labels subset_labels(const Labels& labels, std::span<const Index> parts) {
  if (labels.empty()) return {};
  Labels out;
  for (Index p : parts) out.push_back(labels[static_cast<std::size_t>(p)]);
  return out;
}

struct ArmContext {
  const Truth* truth;
  int repetition;
  Index n;
  std::string imputation;
  DiagonalShrinkageOptions options;
};

void push_metrics(const ArmContext& ctx, Estimator estimator, const CovMatrix& gamma, const CovMatrix& sigma,
                  const Matrix& pcor, double lambda, double lambda_var, bool singular,
                  std::vector<BenchmarkRecord>& out) {
  const auto& t = *ctx.truth;
  const std::tuple<Metric, double> scores[] = {
      {Metric::CovClr, elementwise_mse(gamma.values(), t.gamma.values())},
      {Metric::CovAlr, elementwise_mse(sigma.values(), t.sigma.values())},
      {Metric::Pcor, elementwise_mse(pcor, t.pcor, true)},
  };
  for (const auto& [metric, mse] : scores) {
    out.push_back({ctx.repetition, ctx.n, estimator, ctx.imputation, metric, mse, lambda, lambda_var, singular});
  }
}

double lambda_var_of(const ShrinkageEstimate& est) { return est.lambda_var ? est.lambda_var->value : kNa; }

void score_arms(const CompositionMatrix& p, const ArmContext& ctx, std::span<const Estimator> estimators,
                std::vector<BenchmarkRecord>& out) {
  const Index ref = p.parts() - 1;
  const auto x = alr(p, ref);
  for (Estimator e : estimators) {
    switch (e) {
      case Estimator::None: {
        auto sigma = sample_covariance(x);
        auto gamma = sample_covariance(clr(p));
        const bool singular = condition_number(sigma.values()) >= kSingularCondition;
        const auto pcor = partial_correlation(gamma).values;
        push_metrics(ctx, e, gamma, sigma, pcor, kNa, kNa, singular, out);
        break;
      }
      case Estimator::NaiveAlr: {
        const auto est = shrink_logratio_naive(x, ctx.options);
        const auto gamma = sigma_to_gamma(est.covariance);
        const auto pcor = partial_correlation(gamma).values;
        push_metrics(ctx, e, gamma, est.covariance, pcor, est.lambda.value, lambda_var_of(est), false, out);
        break;
      }
      case Estimator::NaiveClr: {
        const auto est = shrink_logratio_naive(clr(p), ctx.options);
        const auto sigma = gamma_to_sigma(est.covariance, ref);
        const auto pcor = partial_correlation(est.covariance).values;
        push_metrics(ctx, e, est.covariance, sigma, pcor, est.lambda.value, lambda_var_of(est), false, out);
        break;
      }
      case Estimator::Basis: {
        const auto est = shrink_basis_pipeline(p, OutputForm::clr(), ctx.options);
        const auto sigma = gamma_to_sigma(est.covariance, ref);
        const auto pcor = partial_correlation(est.covariance).values;
        push_metrics(ctx, e, est.covariance, sigma, pcor, est.lambda.value, lambda_var_of(est), false, out);
        break;
      }
    }
  }
}

// Runs body(rep, records) for every repetition on `threads` threads and
// merges the per-repetition records. The first failing repetition (by index)
// is rethrown.
template <class Body>
BenchmarkReport run_repetitions(int repetitions, int threads, Body body) {
  std::vector<std::vector<BenchmarkRecord>> per_rep(static_cast<std::size_t>(repetitions));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(repetitions));
  const int nthreads = threads > 0 ? threads : 1;
#pragma omp parallel for schedule(dynamic) num_threads(nthreads) if (threads != 1)
  for (int r = 0; r < repetitions; ++r) {
    try {
      body(r, per_rep[static_cast<std::size_t>(r)]);
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  BenchmarkReport report;
  for (auto& recs : per_rep) report.records.insert(report.records.end(), recs.begin(), recs.end());
  report.sort();
  return report;
}

std::string format_optional(double v) { return std::isnan(v) ? "NA" : format_double(v); }

double median_of(std::vector<double> v) {
  if (v.empty()) return kNa;
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::None: return "none";
    case Estimator::NaiveAlr: return "naive-alr";
    case Estimator::NaiveClr: return "naive-clr";
    case Estimator::Basis: return "basis";
  }
  return "?";
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::CovClr: return "cov_clr";
    case Metric::CovAlr: return "cov_alr";
    case Metric::Pcor: return "pcor";
  }
  return "?";
}

Estimator parse_estimator(std::string_view name) {
  for (auto e : {Estimator::None, Estimator::NaiveAlr, Estimator::NaiveClr, Estimator::Basis}) {
    if (to_string(e) == name) return e;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + std::string(name) + "'");
}

ImputationMethod parse_imputation(std::string_view name) {
  for (auto m : {ImputationMethod::Czm, ImputationMethod::FreqShrink}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown imputation method '" + std::string(name) + "'");
}

double elementwise_mse(const Matrix& a, const Matrix& b, bool off_diagonal_only) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorCode::ShapeMismatch, "mse operands differ in shape");
  const Matrix d = (a - b).array().square().matrix();
  if (!off_diagonal_only) return d.size() ? d.sum() / static_cast<double>(d.size()) : 0.0;
  if (a.rows() != a.cols()) throw Error(ErrorCode::ShapeMismatch, "off-diagonal mse needs square matrices");
  const Index n = a.rows();
  if (n < 2) return 0.0;
  return (d.sum() - d.trace()) / static_cast<double>(n * (n - 1));
}

PoolTruth generate_pool_truth(Index parts, std::uint64_t seed, const PoolTruthOptions& options) {
  if (parts < 3) throw Error(ErrorCode::DimensionTooSmall, "pool needs at least 3 parts");
  auto rng = make_rng(seed, 0, 0);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;

  PoolTruth pool;
  pool.log_mean.resize(parts);
  for (Index i = 0; i < parts; ++i) pool.log_mean(i) = normal(rng);

  // Sparse precision, diagonally dominant, turned into a correlation matrix.
  Matrix k = Matrix::Zero(parts, parts);
  for (Index i = 0; i < parts; ++i) {
    for (Index j = i + 1; j < parts; ++j) {
      if (unif(rng) < options.edge_probability) {
        const double w = options.edge_strength * (unif(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 0.5 * unif(rng));
        k(i, j) = k(j, i) = w;
      }
    }
  }
  for (Index i = 0; i < parts; ++i) k(i, i) = 1.0 + k.row(i).cwiseAbs().sum();
  const Matrix c = k.llt().solve(Matrix::Identity(parts, parts));
  const Vector sd_c = c.diagonal().cwiseSqrt();

  Vector sd(parts);
  for (Index i = 0; i < parts; ++i) sd(i) = std::exp(std::log(0.5) + 0.5 * normal(rng));

  Matrix loadings(parts, options.factors);
  for (Index i = 0; i < parts; ++i) {
    for (Index f = 0; f < options.factors; ++f) loadings(i, f) = options.factor_scale * normal(rng);
  }

  pool.omega = (sd.asDiagonal() * (c.array() / (sd_c * sd_c.transpose()).array()).matrix() * sd.asDiagonal());
  pool.omega += loadings * loadings.transpose();
  pool.omega = 0.5 * (pool.omega + pool.omega.transpose()).eval();
  for (Index i = 0; i < parts; ++i) pool.labels.push_back("part" + std::to_string(i + 1));
  return pool;
}

PoolTruth pool_truth_from_alr(const Vector& mu, const CovMatrix& sigma) {
  if (sigma.representation() != Representation::Alr) {
    throw Error(ErrorCode::RepresentationMismatch, "pool truth expects an ALR covariance");
  }
  const Index d = sigma.parts();
  if (mu.size() != d - 1) throw Error(ErrorCode::ShapeMismatch, "mu length must be D-1");
  const auto idx = sigma.part_indices();
  PoolTruth pool;
  pool.log_mean = Vector::Zero(d);
  pool.omega = Matrix::Zero(d, d);
  for (Index a = 0; a < d - 1; ++a) {
    pool.log_mean(idx[static_cast<std::size_t>(a)]) = mu(a);
    for (Index b = 0; b < d - 1; ++b) {
      pool.omega(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]) = sigma.values()(a, b);
    }
  }
  pool.labels = sigma.labels();
  if (pool.labels.empty()) {
    for (Index i = 0; i < d; ++i) pool.labels.push_back("part" + std::to_string(i + 1));
  }
  return pool;
}

Truth select_truth(const PoolTruth& pool, std::span<const Index> parts) {
  const Index d = static_cast<Index>(parts.size());
  if (d < 3) throw Error(ErrorCode::DimensionTooSmall, "truth needs at least 3 parts");
  for (Index p : parts) {
    if (p < 0 || p >= pool.parts()) throw Error(ErrorCode::InvalidArgument, "part index outside the pool");
  }
  const std::vector<Index> idx(parts.begin(), parts.end());
  const auto omega = CovMatrix::basis(pool.omega(idx, idx), subset_labels(pool.labels, parts));
  auto sigma = omega_to_sigma(omega, d - 1);
  auto gamma = omega_to_gamma(omega);
  Vector mu(d - 1);
  const double m_ref = pool.log_mean(idx.back());
  for (Index i = 0; i < d - 1; ++i) mu(i) = pool.log_mean(idx[static_cast<std::size_t>(i)]) - m_ref;
  auto pcor = partial_correlation(gamma).values;
  return Truth{idx, std::move(mu), std::move(sigma), std::move(gamma), std::move(pcor)};
}

Truth empirical_truth(const CountMatrix& pool, std::span<const Index> parts) {
  const auto sub = pool.select_parts(parts);
  const auto p = closure(sub);
  const auto x = alr(p, p.parts() - 1);
  auto sigma = sample_covariance(x);
  auto gamma = sample_covariance(clr(p));
  Vector mu = x.values().colwise().mean().transpose();
  auto pcor = partial_correlation(gamma).values;
  return Truth{std::vector<Index>(parts.begin(), parts.end()), std::move(mu), std::move(sigma), std::move(gamma),
               std::move(pcor)};
}

CountMatrix generate_count_dataset(const CountDatasetOptions& options, std::uint64_t seed) {
  if (options.rows < 1) throw Error(ErrorCode::InvalidArgument, "dataset needs rows");
  const auto pool = generate_pool_truth(options.parts, seed);
  const Index d = options.parts;
  Eigen::LLT<Matrix> llt(pool.omega);
  const Matrix l = llt.matrixL();

  auto rng = make_rng(seed, 0, 1);
  std::normal_distribution<double> normal;
  Matrix freq(options.rows, d);
  Eigen::VectorXi depth(options.rows);
  for (Index r = 0; r < options.rows; ++r) {
    Vector z(d);
    for (Index i = 0; i < d; ++i) z(i) = normal(rng);
    Vector m = pool.log_mean + l * z;
    m.array() -= m.maxCoeff();
    freq.row(r) = m.array().exp().transpose();
    freq.row(r) /= freq.row(r).sum();
    const double t = std::exp(options.log_depth_mean + options.log_depth_sd * normal(rng));
    depth(r) = static_cast<int>(std::max<double>(static_cast<double>(options.min_depth), std::round(t)));
  }
  auto counts = sample_multinomial(CompositionMatrix(freq), depth, rng);
  return CountMatrix(counts.values(), pool.labels);
}

void BenchmarkScenario::validate() const {
  if (repetitions < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be >= 1");
  if (estimators.empty()) throw Error(ErrorCode::InvalidArgument, "estimator list is empty");
  if (sample_sizes.empty()) throw Error(ErrorCode::InvalidArgument, "sample size list is empty");
  if (parts < 3) throw Error(ErrorCode::DimensionTooSmall, "benchmark needs D >= 3");
  for (Index n : sample_sizes) {
    if (n < 3) throw Error(ErrorCode::TooFewSamples, "sample sizes must be >= 3");
  }
  if (kind == Kind::Subsample && !zero_free_arm && imputations.empty()) {
    throw Error(ErrorCode::InvalidArgument, "subsample benchmark has no arms");
  }
}

void BenchmarkReport::sort() {
  std::stable_sort(records.begin(), records.end(), [](const BenchmarkRecord& a, const BenchmarkRecord& b) {
    return std::tie(a.repetition, a.n, a.estimator, a.imputation, a.metric) <
           std::tie(b.repetition, b.n, b.estimator, b.imputation, b.metric);
  });
}

std::string BenchmarkReport::to_csv() const {
  std::ostringstream out;
  out << "repetition,N,estimator,imputation,metric,mse,lambda,lambda_var,singular\n";
  for (const auto& r : records) {
    out << r.repetition << ',' << r.n << ',' << to_string(r.estimator) << ',' << r.imputation << ','
        << to_string(r.metric) << ',' << format_double(r.mse) << ',' << format_optional(r.lambda) << ','
        << format_optional(r.lambda_var) << ',' << (r.singular ? 1 : 0) << '\n';
  }
  return out.str();
}

std::vector<SummaryRow> summarize(const BenchmarkReport& report) {
  std::map<std::tuple<Index, Estimator, std::string, Metric>, std::vector<double>> groups;
  for (const auto& r : report.records) groups[{r.n, r.estimator, r.imputation, r.metric}].push_back(r.mse);
  std::vector<SummaryRow> rows;
  for (auto& [key, values] : groups) {
    const auto& [n, e, imp, m] = key;
    rows.push_back({n, e, imp, m, median_of(values), values.size()});
  }
  return rows;
}

double median_mse(const BenchmarkReport& report, Index n, Estimator estimator, Metric metric,
                  std::string_view imputation) {
  std::vector<double> values;
  for (const auto& r : report.records) {
    if (r.n == n && r.estimator == estimator && r.metric == metric && r.imputation == imputation) {
      values.push_back(r.mse);
    }
  }
  return median_of(std::move(values));
}

std::vector<BenchmarkRecord> evaluate_estimators(const CompositionMatrix& p, const Truth& truth,
                                                 std::span<const Estimator> estimators, int repetition,
                                                 const std::string& imputation, bool variance_shrinkage) {
  if (p.parts() != truth.pcor.rows()) throw Error(ErrorCode::ShapeMismatch, "sample and truth differ in parts");
  std::vector<BenchmarkRecord> out;
  const ArmContext ctx{&truth, repetition, p.samples(), imputation,
                       {.shrink_variances = variance_shrinkage, .lambda_var_override = std::nullopt}};
  score_arms(p, ctx, estimators, out);
  return out;
}

BenchmarkReport run_synthetic_benchmark(const BenchmarkScenario& scenario, const PoolTruth& pool, int threads) {
  scenario.validate();
  if (scenario.parts > pool.parts()) {
    throw Error(ErrorCode::InvalidArgument, "scenario asks for more parts than the truth pool holds");
  }
  return run_repetitions(scenario.repetitions, threads, [&](int rep, std::vector<BenchmarkRecord>& out) {
    const auto urep = static_cast<std::uint64_t>(rep);
    auto part_rng = make_rng(scenario.master_seed, urep, kStagePartChoice);
    const auto parts = choose_subset(pool.parts(), scenario.parts, part_rng);
    const auto truth = select_truth(pool, parts);
    for (std::size_t k = 0; k < scenario.sample_sizes.size(); ++k) {
      const Index n = scenario.sample_sizes[k];
      auto rng = make_rng(scenario.master_seed, urep, kStageSamples + 2 * k);
      const auto p = sample_logistic_normal(truth.mu, truth.sigma, n, rng);
      const ArmContext ctx{&truth, rep, n, "none", {.shrink_variances = scenario.variance_shrinkage, .lambda_var_override = std::nullopt}};
      score_arms(p, ctx, scenario.estimators, out);
    }
  });
}

BenchmarkReport run_subsample_benchmark(const CountMatrix& dataset, const BenchmarkScenario& scenario, int threads) {
  scenario.validate();
  if (scenario.parts > dataset.parts()) throw Error(ErrorCode::InvalidArgument, "scenario asks for more parts than the dataset has");

  std::vector<Index> zero_free;
  for (Index r = 0; r < dataset.samples(); ++r) {
    if (!dataset.row_has_zeros(r)) zero_free.push_back(r);
  }
  const Index max_n = *std::max_element(scenario.sample_sizes.begin(), scenario.sample_sizes.end());
  const auto pool_size = static_cast<Index>(zero_free.size());
  if (pool_size < 3 || (scenario.zero_free_arm && pool_size < max_n)) {
    throw Error(ErrorCode::InsufficientZeroFreeRows,
                std::to_string(pool_size) + " zero-free rows, need " + std::to_string(std::max<Index>(3, max_n)));
  }
  const auto pool = dataset.select_rows(zero_free);

  return run_repetitions(scenario.repetitions, threads, [&](int rep, std::vector<BenchmarkRecord>& out) {
    const auto urep = static_cast<std::uint64_t>(rep);
    auto part_rng = make_rng(scenario.master_seed, urep, kStagePartChoice);
    const auto genes = choose_subset(dataset.parts(), scenario.parts, part_rng);
    const auto truth = empirical_truth(pool, genes);
    const DiagonalShrinkageOptions opts{.shrink_variances = scenario.variance_shrinkage, .lambda_var_override = std::nullopt};

    std::vector<Index> candidates;
    if (!scenario.imputations.empty()) {
      const Matrix sub = dataset.values()(Eigen::all, genes);
      for (Index r = 0; r < dataset.samples(); ++r) {
        const double total = sub.row(r).sum();
        const Index zeros = (sub.row(r).array() == 0.0).count();
        if (total >= 2.0 && czm_feasible(total, zeros, scenario.delta_fraction)) candidates.push_back(r);
      }
    }

    for (std::size_t k = 0; k < scenario.sample_sizes.size(); ++k) {
      const Index n = scenario.sample_sizes[k];
      if (scenario.zero_free_arm) {
        auto rng = make_rng(scenario.master_seed, urep, kStageSamples + 2 * k);
        const auto rows = choose_subset(pool_size, n, rng);
        const auto p = closure(pool.select_rows(rows).select_parts(genes));
        score_arms(p, {&truth, rep, n, "none", opts}, scenario.estimators, out);
      }
      if (!scenario.imputations.empty()) {
        if (static_cast<Index>(candidates.size()) < n) {
          throw Error(ErrorCode::TooFewSamples, "not enough admissible rows for N=" + std::to_string(n));
        }
        auto rng = make_rng(scenario.master_seed, urep, kStageSamples + 2 * k + 1);
        const auto rows = choose_from(candidates, n, rng);
        const auto counts = dataset.select_rows(rows).select_parts(genes);
        for (auto method : scenario.imputations) {
          const auto imputed = impute(counts, method, scenario.delta_fraction);
          score_arms(imputed.values, {&truth, rep, n, std::string(to_string(method)), opts}, scenario.estimators, out);
        }
      }
    }
  });
}

BenchmarkReport run_benchmark(const BenchmarkScenario& scenario, int threads) {
  if (scenario.kind == BenchmarkScenario::Kind::Synthetic) {
    if (scenario.truth_source == BenchmarkScenario::Source::Files) {
      const auto pool = pool_truth_from_alr(read_vector(scenario.mu_path), read_covariance(scenario.sigma_path));
      return run_synthetic_benchmark(scenario, pool, threads);
    }
    return run_synthetic_benchmark(
        scenario, generate_pool_truth(scenario.pool_parts, scenario.truth_seed, scenario.truth_options), threads);
  }
  if (scenario.dataset_source == BenchmarkScenario::Source::Files) {
    auto table = read_table(scenario.dataset_path, {.header = scenario.dataset_header});
    return run_subsample_benchmark(CountMatrix(std::move(table.values), std::move(table.header)), scenario, threads);
  }
  return run_subsample_benchmark(generate_count_dataset(scenario.dataset_options, scenario.dataset_seed), scenario,
                                 threads);
}

namespace {

template <class T>
T get_or(const toml::table& t, std::string_view key, T fallback) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  if constexpr (std::is_same_v<T, bool>) {
    if (auto v = node->value<bool>()) return *v;
  } else if constexpr (std::is_integral_v<T>) {
    if (auto v = node->value<std::int64_t>()) return static_cast<T>(*v);
  } else if constexpr (std::is_floating_point_v<T>) {
    if (auto v = node->value<double>()) return *v;
  } else {
    if (auto v = node->value<std::string>()) return *v;
  }
  throw Error(ErrorCode::ParseError, "scenario key '" + std::string(key) + "' has the wrong type");
}

std::uint64_t get_seed(const toml::table& t, std::string_view key, std::uint64_t fallback) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  if (auto v = node->value<std::int64_t>()) {
    if (*v < 0) throw Error(ErrorCode::ParseError, "seed '" + std::string(key) + "' is negative");
    return static_cast<std::uint64_t>(*v);
  }
  if (auto s = node->value<std::string>()) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(*s, &used, 0);
      if (used == s->size()) return v;
    } catch (const std::exception&) {
    }
  }
  throw Error(ErrorCode::ParseError, "seed '" + std::string(key) + "' must be a nonnegative integer");
}

template <class Fn>
void for_each_in(const toml::table& t, std::string_view key, Fn fn) {
  const auto* node = t.get(key);
  if (!node) return;
  const auto* arr = node->as_array();
  if (!arr) throw Error(ErrorCode::ParseError, "scenario key '" + std::string(key) + "' must be an array");
  for (const auto& el : *arr) fn(el);
}

std::string element_string(const toml::node& el, std::string_view key) {
  if (auto s = el.value<std::string>()) return *s;
  throw Error(ErrorCode::ParseError, "'" + std::string(key) + "' entries must be strings");
}

BenchmarkScenario::Source parse_source(const std::string& s) {
  if (s == "generated") return BenchmarkScenario::Source::Generated;
  if (s == "files" || s == "file") return BenchmarkScenario::Source::Files;
  throw Error(ErrorCode::ParseError, "unknown source '" + s + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

BenchmarkScenario parse_scenario(std::string_view toml_text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " at line " << e.source().begin.line;
    throw Error(ErrorCode::ParseError, msg.str());
  }

  BenchmarkScenario s;
  s.name = get_or<std::string>(root, "name", s.name);
  const auto kind = get_or<std::string>(root, "kind", "synthetic");
  if (kind == "synthetic") {
    s.kind = BenchmarkScenario::Kind::Synthetic;
  } else if (kind == "subsample") {
    s.kind = BenchmarkScenario::Kind::Subsample;
  } else {
    throw Error(ErrorCode::ParseError, "unknown scenario kind '" + kind + "'");
  }
  s.parts = get_or<Index>(root, "parts", s.parts);
  s.repetitions = get_or<int>(root, "repetitions", s.repetitions);
  s.master_seed = get_seed(root, "master_seed", s.master_seed);
  s.variance_shrinkage = get_or<bool>(root, "variance_shrinkage", s.variance_shrinkage);
  if (root.contains("sample_sizes")) {
    s.sample_sizes.clear();
    for_each_in(root, "sample_sizes", [&](const toml::node& el) {
      auto v = el.value<std::int64_t>();
      if (!v) throw Error(ErrorCode::ParseError, "'sample_sizes' entries must be integers");
      s.sample_sizes.push_back(static_cast<Index>(*v));
    });
  }
  if (root.contains("estimators")) {
    s.estimators.clear();
    for_each_in(root, "estimators",
                [&](const toml::node& el) { s.estimators.push_back(parse_estimator(element_string(el, "estimators"))); });
  }

  if (const auto* truth = root["truth"].as_table()) {
    s.truth_source = parse_source(get_or<std::string>(*truth, "source", "generated"));
    s.pool_parts = get_or<Index>(*truth, "pool_parts", s.pool_parts);
    s.truth_seed = get_seed(*truth, "seed", s.truth_seed);
    s.truth_options.factors = get_or<Index>(*truth, "factors", s.truth_options.factors);
    s.truth_options.factor_scale = get_or<double>(*truth, "factor_scale", s.truth_options.factor_scale);
    s.truth_options.edge_probability = get_or<double>(*truth, "edge_probability", s.truth_options.edge_probability);
    s.truth_options.edge_strength = get_or<double>(*truth, "edge_strength", s.truth_options.edge_strength);
    if (truth->contains("mu")) s.mu_path = resolve(base_dir, get_or<std::string>(*truth, "mu", ""));
    if (truth->contains("sigma")) s.sigma_path = resolve(base_dir, get_or<std::string>(*truth, "sigma", ""));
    if (s.truth_source == BenchmarkScenario::Source::Files && (s.mu_path.empty() || s.sigma_path.empty())) {
      throw Error(ErrorCode::ParseError, "truth source 'files' needs 'mu' and 'sigma'");
    }
  }

  if (const auto* data = root["dataset"].as_table()) {
    s.dataset_source = parse_source(get_or<std::string>(*data, "source", "generated"));
    if (data->contains("path")) s.dataset_path = resolve(base_dir, get_or<std::string>(*data, "path", ""));
    if (s.dataset_source == BenchmarkScenario::Source::Files && s.dataset_path.empty()) {
      throw Error(ErrorCode::ParseError, "dataset source 'file' needs 'path'");
    }
    s.dataset_header = get_or<bool>(*data, "header", s.dataset_header);
    s.dataset_seed = get_seed(*data, "seed", s.dataset_seed);
    auto& o = s.dataset_options;
    o.rows = get_or<Index>(*data, "rows", o.rows);
    o.parts = get_or<Index>(*data, "parts", o.parts);
    o.log_depth_mean = std::log(get_or<double>(*data, "depth", std::exp(o.log_depth_mean)));
    o.log_depth_sd = get_or<double>(*data, "depth_log_sd", o.log_depth_sd);
    o.min_depth = get_or<Index>(*data, "min_depth", o.min_depth);
  }

  if (root.contains("imputations")) {
    s.imputations.clear();
    for_each_in(root, "imputations", [&](const toml::node& el) {
      s.imputations.push_back(parse_imputation(element_string(el, "imputations")));
    });
  }
  s.zero_free_arm = get_or<bool>(root, "zero_free_arm", s.zero_free_arm);
  s.delta_fraction = get_or<double>(root, "delta_fraction", s.delta_fraction);

  s.validate();
  return s;
}

BenchmarkScenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.parent_path());
}

}  // namespace lrshrink
