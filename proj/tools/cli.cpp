#include "cli.hpp"

#include <algorithm>

#include <CLI11.hpp>
#include <json.hpp>
#include <ostream>

#include "lrshrink/benchmark.hpp"
#include "lrshrink/error.hpp"
#include "lrshrink/imputation.hpp"
#include "lrshrink/io.hpp"
#include "lrshrink/lu.hpp"
#include "lrshrink/shrinkage.hpp"
#include "lrshrink/simulation.hpp"

namespace lrshrink::cli {
namespace {

struct ShrinkArgs {
  std::string input;
  std::string kind = "compositions";
  std::string method = "basis";
  std::string repr = "alr";
  std::string lu_form = "consistent";
  int ref = 0;  // 1-based; 0 = last part
  bool header = false;
  bool no_variance_shrinkage = false;
  std::string out;
  std::string lambda_report;
  std::string pcor;
};

struct ImputeArgs {
  std::string input;
  std::string method = "czm";
  double delta_fraction = kDefaultDeltaFraction;
  bool header = false;
  std::string out;
};

struct DilutionArgs {
  std::string alpha;
  std::string pair;
  std::string order = "smallest";
  std::uint64_t seed = 0;
  std::string out;
};

struct BenchmarkArgs {
  std::string scenario;
  std::string out;
  int threads = 1;
  bool summary = false;
};

struct SimulateArgs {
  std::string mu;
  std::string sigma;
  Index n = 0;
  std::uint64_t seed = 0;
  std::string out;
};

CompositionMatrix load_compositions(const ShrinkArgs& a) {
  auto table = read_table(a.input, {.header = a.header});
  if (a.kind == "counts") {
    CountMatrix counts(std::move(table.values), std::move(table.header));
    if (counts.has_zeros()) {
      throw Error(ErrorCode::ZeroEntry, "count matrix contains zeros; run 'impute' first");
    }
    return closure(counts);
  }
  return CompositionMatrix(std::move(table.values), std::move(table.header));
}

nlohmann::json lambda_json(const std::optional<LambdaEstimate>& l) {
  return l ? nlohmann::json(l->value) : nlohmann::json(nullptr);
}

int cmd_shrink(const ShrinkArgs& a, std::ostream& out) {
  const auto p = load_compositions(a);
  const Index d = p.parts();
  const Index ref = a.ref == 0 ? d - 1 : a.ref - 1;
  if (ref < 0 || ref >= d) throw Error(ErrorCode::BadReferenceIndex, "--ref must lie in [1, " + std::to_string(d) + "]");
  const bool want_alr = a.repr == "alr";
  const DiagonalShrinkageOptions opts{.shrink_variances = !a.no_variance_shrinkage, .lambda_var_override = std::nullopt};
  const auto form = a.lu_form == "published" ? LuTargetForm::Published : LuTargetForm::Consistent;

  const auto x = alr(p, ref);
  const auto y = clr(p);
  std::optional<ShrinkageEstimate> est;
  if (a.method == "basis") {
    est = shrink_basis_pipeline(p, want_alr ? OutputForm::alr(ref) : OutputForm::clr(), opts);
  } else if (a.method == "naive-alr") {
    est = shrink_logratio_naive(x, opts);
  } else if (a.method == "naive-clr") {
    est = shrink_logratio_naive(y, opts);
  } else if (a.method == "lu-alr") {
    est = shrink_logratio_direct(sample_covariance(x), x.values(), TargetKind::LuAlr, form);
  } else if (a.method == "lu-clr") {
    est = shrink_logratio_direct(sample_covariance(y), y.values(), TargetKind::LuClr, form);
  }

  CovMatrix cov = est ? est->covariance : (want_alr ? sample_covariance(x) : sample_covariance(y));
  if (want_alr && cov.representation() == Representation::Clr) cov = gamma_to_sigma(cov, ref);
  if (!want_alr && cov.representation() == Representation::Alr) cov = sigma_to_gamma(cov);
  write_covariance(a.out, cov);

  if (!a.pcor.empty()) {
    const auto gamma = cov.representation() == Representation::Clr ? cov : sigma_to_gamma(cov);
    const auto pc = partial_correlation(gamma);
    write_table(std::filesystem::path(a.pcor), pc.values, pc.labels);
  }

  if (!a.lambda_report.empty()) {
    nlohmann::json j;
    j["method"] = a.method;
    j["D"] = d;
    j["N"] = p.samples();
    if (est) {
      j["lambda"] = est->lambda.value;
      j["lambda_preclamp"] = est->lambda.preclamp;
      j["lambda_degenerate"] = est->lambda.degenerate;
      j["lambda_var"] = lambda_json(est->lambda_var);
      j["target_kind"] = std::string(to_string(est->target_kind));
      j["warnings"] = est->warnings;
    } else {
      j["lambda"] = 0.0;
      j["lambda_preclamp"] = 0.0;
      j["lambda_degenerate"] = false;
      j["lambda_var"] = nullptr;
      j["target_kind"] = nullptr;
      j["warnings"] = nlohmann::json::array();
    }
    write_file(a.lambda_report, j.dump(2) + "\n");
  }
  if (est) {
    for (const auto& w : est->warnings) out << "warning: " << w << '\n';
  }
  return 0;
}

int cmd_impute(const ImputeArgs& a, std::ostream& out) {
  auto table = read_table(a.input, {.header = a.header});
  const CountMatrix counts(std::move(table.values), std::move(table.header));
  const auto result = impute(counts, parse_imputation(a.method), a.delta_fraction);
  write_table(std::filesystem::path(a.out), result.values.values(), result.values.labels());
  for (const auto& w : result.warnings) out << "warning: " << w << '\n';
  return 0;
}

PartPair parse_pair(const std::string& text, Index d) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--pair expects i,j");
  try {
    const Index i = std::stol(text.substr(0, comma)) - 1;
    const Index j = std::stol(text.substr(comma + 1)) - 1;
    if (i < 0 || j < 0 || i >= d || j >= d || i == j) {
      throw Error(ErrorCode::InvalidArgument, "--pair needs two distinct parts in [1, " + std::to_string(d) + "]");
    }
    return {std::min(i, j), std::max(i, j)};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidArgument, "--pair expects i,j");
  }
}

int cmd_dilution(const DilutionArgs& a, std::ostream&) {
  const AlphaVector alpha(read_vector(a.alpha));
  const auto pair = a.pair.empty() ? strongest_pair(alpha) : parse_pair(a.pair, alpha.parts());
  const auto order = a.order == "random" ? RemovalOrder::Random : RemovalOrder::SmallestInverseFirst;
  const auto seq = removal_sequence(alpha, pair, order, a.seed);
  const auto series = dilution_experiment(alpha, pair, seq);
  Matrix table(static_cast<Index>(series.size()), 2);
  for (std::size_t k = 0; k < series.size(); ++k) {
    table(static_cast<Index>(k), 0) = static_cast<double>(series[k].parts);
    table(static_cast<Index>(k), 1) = series[k].partial_correlation;
  }
  write_table(std::filesystem::path(a.out), table, {"D", "r"});
  return 0;
}

int cmd_benchmark(const BenchmarkArgs& a, std::ostream& out) {
  const auto scenario = load_scenario(a.scenario);
  const auto report = run_benchmark(scenario, a.threads);
  write_file(a.out, report.to_csv());
  if (a.summary) {
    out << "N,estimator,imputation,metric,median_mse,count\n";
    for (const auto& row : summarize(report)) {
      out << row.n << ',' << to_string(row.estimator) << ',' << row.imputation << ',' << to_string(row.metric) << ','
          << format_double(row.median_mse) << ',' << row.count << '\n';
    }
  }
  return 0;
}

int cmd_simulate(const SimulateArgs& a, std::ostream&) {
  const auto sigma = read_covariance(a.sigma);
  const Vector mu = read_vector(a.mu);
  const auto p = sample_logistic_normal(mu, sigma, a.n, a.seed);
  write_table(std::filesystem::path(a.out), p.values(), sigma.labels());
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shrinkage estimation of logratio covariances and partial correlations"};
  app.name(args.empty() ? "lrshrink" : args.front());
  app.require_subcommand(1);

  ShrinkArgs shrink;
  auto* s = app.add_subcommand("shrink", "Shrunk covariance of compositional data");
  s->add_option("--input", shrink.input, "Samples x parts CSV/TSV")->required();
  s->add_option("--kind", shrink.kind, "Input kind")->check(CLI::IsMember({"counts", "compositions"}))->capture_default_str();
  s->add_option("--method", shrink.method, "Estimator")
      ->check(CLI::IsMember({"basis", "naive-alr", "naive-clr", "lu-alr", "lu-clr", "none"}))
      ->capture_default_str();
  s->add_option("--ref", shrink.ref, "ALR reference part, 1-based (default: last)");
  s->add_option("--repr", shrink.repr, "Output representation")->check(CLI::IsMember({"alr", "clr"}))->capture_default_str();
  s->add_option("--lu-form", shrink.lu_form, "LU target form")
      ->check(CLI::IsMember({"consistent", "published"}))
      ->capture_default_str();
  s->add_flag("--header", shrink.header, "Input has a header row of part labels");
  s->add_flag("--no-variance-shrinkage", shrink.no_variance_shrinkage, "Keep the sample variances");
  s->add_option("--out", shrink.out, "Covariance CSV")->required();
  s->add_option("--lambda-report", shrink.lambda_report, "JSON report of the shrinkage intensities");
  s->add_option("--pcor", shrink.pcor, "Partial correlation CSV (all parts)");

  ImputeArgs imp;
  auto* i = app.add_subcommand("impute", "Replace zero counts and return frequencies");
  i->add_option("--input", imp.input, "Count CSV/TSV")->required();
  i->add_option("--method", imp.method, "Imputation method")->check(CLI::IsMember({"czm", "freq-shrink"}))->capture_default_str();
  i->add_option("--delta-fraction", imp.delta_fraction, "CZM delta fraction")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  i->add_flag("--header", imp.header, "Input has a header row of part labels");
  i->add_option("--out", imp.out, "Frequency CSV")->required();

  DilutionArgs dil;
  auto* l = app.add_subcommand("lu-dilution", "Closure-induced partial correlation as parts are removed");
  l->add_option("--alpha", dil.alpha, "Basis variances alpha (one row or column)")->required();
  l->add_option("--pair", dil.pair, "Part pair i,j, 1-based (default: strongest pair)");
  l->add_option("--order", dil.order, "Removal order")->check(CLI::IsMember({"smallest", "random"}))->capture_default_str();
  l->add_option("--seed", dil.seed, "Seed for the random order");
  l->add_option("--out", dil.out, "CSV with columns D,r")->required();

  BenchmarkArgs bench;
  auto* b = app.add_subcommand("benchmark", "Run a Monte-Carlo benchmark scenario");
  b->add_option("--scenario", bench.scenario, "Scenario TOML")->required()->check(CLI::ExistingFile);
  b->add_option("--out", bench.out, "Report CSV")->required();
  b->add_option("--threads", bench.threads, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber)->capture_default_str();
  b->add_flag("--summary", bench.summary, "Print median MSE per arm");

  SimulateArgs sim;
  auto* m = app.add_subcommand("simulate", "Draw logistic-normal compositions");
  m->add_option("--mu", sim.mu, "ALR mean (D-1 values)")->required();
  m->add_option("--sigma", sim.sigma, "ALR covariance CSV")->required();
  m->add_option("--n", sim.n, "Number of samples")->required()->check(CLI::PositiveNumber);
  m->add_option("--seed", sim.seed, "Random seed");
  m->add_option("--out", sim.out, "Composition CSV")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*s) return cmd_shrink(shrink, out);
    if (*i) return cmd_impute(imp, out);
    if (*l) return cmd_dilution(dil, out);
    if (*b) return cmd_benchmark(bench, out);
    if (*m) return cmd_simulate(sim, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace lrshrink::cli
