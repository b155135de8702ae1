#include "dpp/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <ostream>

#include "dpp/bench.hpp"
#include "dpp/errors.hpp"
#include "dpp/kernels.hpp"
#include "dpp/matrix_io.hpp"
#include "dpp/mixture.hpp"
#include "dpp/oracle.hpp"
#include "dpp/projection.hpp"
#include "dpp/thinning.hpp"

namespace dpp {

namespace {

using OrderedJson = nlohmann::ordered_json;

constexpr double kSignificance = 0.001;

struct SampleArgs {
  std::string projection_path;
  std::string lensemble_path;
  std::string algorithm = "rejection";
  std::string cache = "off";
  std::uint64_t seed = 0;
  long long fixed_size = -1;
};

struct BenchArgs {
  std::vector<long long> n_values;
  std::vector<long long> m_values;
  int reps = 100;
  std::uint64_t seed = 0;
  std::string algorithm = "both";
  std::string cache = "off";
  bool include_preprocessing = false;
};

struct PipelineArgs {
  std::string points_path;
  long long n = 500;
  long long d = 2;
  long long blobs = 4;
  long long m = 20;
  long long column_factor = 5;
  double sigma = 1.0;
  double gamma = 1.0;
  std::uint64_t seed = 0;
  std::string algorithm = "rejection";
  std::string cache = "off";
};

struct ValidateArgs {
  std::string suite = "all";
  std::uint64_t samples = 200000;
  std::uint64_t seed = 7;
};

struct ThinningArgs {
  long long m = 20;
  double delta = 0.1;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
};

OrderedJson trace_to_json(const std::vector<Index>& indices, std::uint64_t proposals,
                          std::uint64_t seed) {
  OrderedJson j;
  j["indices"] = indices;
  j["proposals"] = proposals;
  j["seed"] = seed;
  return j;
}

int cmd_sample(const SampleArgs& args, std::ostream& out, std::ostream& err) {
  if (args.projection_path.empty() == args.lensemble_path.empty()) {
    err << "sample: exactly one of --projection / --lensemble is required\n";
    return 2;
  }
  SamplerOptions options;
  options.cache = args.cache == "on";
  Rng rng(args.seed);

  if (!args.projection_path.empty()) {
    const OrthonormalBasis basis(read_matrix_file(args.projection_path));
    SampleTrace trace;
    if (args.algorithm == "standard") {
      trace = sample_standard(basis, rng, options);
    } else {
      trace = sample_rejection(PreparedSampler(basis, options), rng);
    }
    std::vector<Index> indices = trace.indices;
    std::sort(indices.begin(), indices.end());
    out << trace_to_json(indices, trace.total_proposals, args.seed).dump() << '\n';
    return 0;
  }

  const Matrix l = read_matrix_file(args.lensemble_path);
  MixtureDpp dpp = kernel_from_lensemble(eigendecompose_sym(l));
  if (args.fixed_size >= 0) {
    dpp = with_fixed_size(std::move(dpp), static_cast<Index>(args.fixed_size));
  }
  SampleTrace trace;
  const std::vector<Index> sample = sample_dpp(dpp, rng, &trace);
  out << trace_to_json(sample, trace.total_proposals, args.seed).dump() << '\n';
  return 0;
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  if (args.n_values.empty() || args.m_values.empty()) {
    err << "bench: --n and --m are required\n";
    return 2;
  }
  BenchConfig config;
  for (const long long n : args.n_values) config.n_values.push_back(n);
  for (const long long m : args.m_values) config.m_values.push_back(m);
  config.repetitions = args.reps;
  config.seed = args.seed;
  config.run_standard = args.algorithm == "standard" || args.algorithm == "both";
  config.run_rejection = args.algorithm == "rejection" || args.algorithm == "both";
  config.include_preprocessing = args.include_preprocessing;
  config.cache = args.cache == "on";
  write_bench_csv(out, run_benchmark(config));
  return 0;
}

int cmd_pipeline(const PipelineArgs& args, std::ostream& out, std::ostream&) {
  Rng rng(args.seed);
  PipelineConfig config;
  if (!args.points_path.empty()) {
    config.points = read_matrix_file(args.points_path);
  } else {
    config.points = gaussian_blobs(args.n, args.d, args.blobs, rng);
  }
  config.sigma = args.sigma;
  config.gamma = args.gamma;
  config.target_rank = static_cast<Index>(args.m);
  config.column_factor = static_cast<Index>(args.column_factor);
  config.use_rejection = args.algorithm != "standard";
  config.cache = args.cache == "on";

  const PipelineResult result = run_pipeline(config, rng);
  out << trace_to_json(result.sample, result.total_proposals, args.seed).dump() << '\n';
  out << "phase,seconds\n";
  out << "kernel," << format_double(result.kernel_seconds) << '\n';
  out << "rrqr," << format_double(result.rangefinder_seconds) << '\n';
  out << "sample," << format_double(result.sample_seconds) << '\n';
  return 0;
}

struct ValidationCase {
  std::string name;
  double p_value = 0.0;
  bool pass = false;
};

void gof_case(std::vector<ValidationCase>& cases, const std::string& name,
              const GofResult& gof) {
  cases.push_back({name, gof.p_value, gof.p_value > kSignificance});
}

std::vector<std::uint64_t> count_samples(const SubsetLaw& law,
                                         const std::vector<std::vector<Index>>& samples) {
  std::vector<std::uint64_t> counts(law.subsets.size(), 0);
  for (const auto& s : samples) {
    const auto pos = law.find(s);
    if (!pos) throw DppError("validate: sample outside the oracle support");
    ++counts[*pos];
  }
  return counts;
}

void run_exactness_suite(std::uint64_t samples, std::uint64_t seed,
                         std::vector<ValidationCase>& cases) {
  // Projection instances, both samplers against the exact law.
  const struct {
    Index n, m;
  } instances[] = {{6, 2}, {8, 3}};
  std::uint64_t stream = 1;
  for (const auto& inst : instances) {
    Rng setup = Rng::stream(seed, stream++);
    const OrthonormalBasis basis = random_orthonormal(inst.n, inst.m, setup);
    const SubsetLaw law = projection_pmf(basis);
    const PreparedSampler prep(basis);

    for (const bool rejection : {false, true}) {
      Rng rng = Rng::stream(seed, stream++);
      std::vector<std::vector<Index>> draws;
      draws.reserve(samples);
      for (std::uint64_t i = 0; i < samples; ++i) {
        SampleTrace trace =
            rejection ? sample_rejection(prep, rng) : sample_standard(basis, rng);
        std::sort(trace.indices.begin(), trace.indices.end());
        draws.push_back(std::move(trace.indices));
      }
      const auto counts = count_samples(law, draws);
      const std::string name = std::string("projection_n") + std::to_string(inst.n) +
                               "_m" + std::to_string(inst.m) + "_" +
                               (rejection ? "rejection" : "standard");
      gof_case(cases, name, chi_square_gof(counts, law.probs));
    }
  }

  // L-ensemble via the mixture representation against the exact law.
  {
    Rng setup = Rng::stream(seed, stream++);
    Matrix v(3, 3);
    for (Index i = 0; i < 3; ++i) {
      for (Index j = 0; j < 3; ++j) v(i, j) = setup.normal();
    }
    const Matrix l = v * v.transpose();
    const SubsetLaw law = lensemble_pmf(l);
    const MixtureDpp dpp = kernel_from_lensemble(eigendecompose_sym(l));
    Rng rng = Rng::stream(seed, stream++);
    std::vector<std::vector<Index>> draws;
    draws.reserve(samples);
    for (std::uint64_t i = 0; i < samples; ++i) draws.push_back(sample_dpp(dpp, rng));
    const auto counts = count_samples(law, draws);
    gof_case(cases, "lensemble_n3_mixture", chi_square_gof(counts, law.probs));
  }

  // Fixed-size eigenvector selection against the normalized product law.
  {
    Vector lambdas(3);
    lambdas << 1.0, 2.0, 3.0;
    Rng rng = Rng::stream(seed, stream++);
    std::vector<std::uint64_t> counts(3, 0);  // pairs {0,1},{0,2},{1,2}
    for (std::uint64_t i = 0; i < samples; ++i) {
      const auto y = sample_fixed_size_subset(lambdas, 2, rng);
      counts[static_cast<std::size_t>(y[0] + y[1] - 1)]++;
    }
    const std::vector<double> probs = {2.0 / 11.0, 3.0 / 11.0, 6.0 / 11.0};
    gof_case(cases, "fixed_size_products", chi_square_gof(counts, probs));
  }
}

void run_proposals_suite(std::uint64_t seed, std::vector<ValidationCase>& cases) {
  const Index n = 400;
  const Index m = 20;
  const std::uint64_t runs = 10000;
  Rng setup = Rng::stream(seed, 900001);
  const PreparedSampler prep(random_orthonormal(n, m, setup));
  Rng rng = Rng::stream(seed, 900002);

  double harmonic = 0.0;
  for (Index t = 1; t <= m; ++t) harmonic += 1.0 / static_cast<double>(t);
  const double expected_total = static_cast<double>(m) * harmonic;

  double total = 0.0;
  std::vector<std::vector<std::uint64_t>> per_step(static_cast<std::size_t>(m));
  for (std::uint64_t i = 0; i < runs; ++i) {
    const SampleTrace trace = sample_rejection(prep, rng);
    total += static_cast<double>(trace.total_proposals);
    for (Index t = 0; t < m; ++t) {
      per_step[static_cast<std::size_t>(t)].push_back(trace.proposals_per_step[t]);
    }
  }
  const double mean_total = total / static_cast<double>(runs);
  const double rel_err = std::abs(mean_total - expected_total) / expected_total;
  cases.push_back({"mean_total_proposals_within_5pct", 1.0 - rel_err, rel_err < 0.05});

  // Geometric law of R_t at the last step, where rejections are common
  // (success probability 1/m). The final bucket is the tail R >= cap.
  const Index t_checked = m - 1;
  const double success = static_cast<double>(m - t_checked) / static_cast<double>(m);
  constexpr std::size_t cap = 256;
  std::vector<std::uint64_t> counts(cap, 0);
  for (const std::uint64_t r : per_step[static_cast<std::size_t>(t_checked)]) {
    ++counts[static_cast<std::size_t>(std::min<std::uint64_t>(r, cap)) - 1];
  }
  std::vector<double> probs(cap);
  for (std::size_t k = 0; k + 1 < cap; ++k) {
    probs[k] = success * std::pow(1.0 - success, static_cast<double>(k));
  }
  probs[cap - 1] = std::pow(1.0 - success, static_cast<double>(cap - 1));
  gof_case(cases, "per_step_proposals_geometric", chi_square_gof(counts, probs));
}

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
  if (args.suite != "all" && args.suite != "exactness" && args.suite != "proposals") {
    err << "validate: unknown suite '" << args.suite << "'\n";
    return 2;
  }
  std::vector<ValidationCase> cases;
  if (args.suite == "all" || args.suite == "exactness") {
    run_exactness_suite(args.samples, args.seed, cases);
  }
  if (args.suite == "all" || args.suite == "proposals") {
    run_proposals_suite(args.seed, cases);
  }

  bool all_pass = true;
  OrderedJson tests = OrderedJson::array();
  for (const ValidationCase& c : cases) {
    all_pass = all_pass && c.pass;
    OrderedJson t;
    t["name"] = c.name;
    t["p_value"] = c.p_value;
    t["pass"] = c.pass;
    tests.push_back(t);
  }
  OrderedJson report;
  report["suite"] = args.suite;
  report["tests"] = tests;
  report["passed"] = all_pass;
  out << report.dump(2) << '\n';
  return all_pass ? 0 : 1;
}

int cmd_thinning(const ThinningArgs& args, std::ostream& out, std::ostream& err) {
  if (args.m < 1 || args.delta <= 0.0 || args.delta >= 0.5) {
    err << "thinning-exp: need m >= 1 and delta in (0, 0.5)\n";
    return 2;
  }
  const Index m = static_cast<Index>(args.m);
  const Index n = 50 * m;
  Rng setup = Rng::stream(args.seed, 1);
  const OrthonormalBasis basis = random_orthonormal(n, m, setup);
  const LeverageScores scores = leverage_scores(basis);

  const double md = static_cast<double>(args.m);
  const double bound = 2.0 * md * std::log(md) + 3.0 * md * std::log(1.0 / args.delta);

  out << "m,delta,pool_size,trials,success_rate\n";
  for (const double factor : {0.25, 0.5, 0.75, 1.0, 1.25, 1.5}) {
    const auto pool_size = static_cast<std::size_t>(std::ceil(factor * bound));
    Rng rng = Rng::stream(args.seed, 100 + static_cast<std::uint64_t>(factor * 1000));
    std::uint64_t successes = 0;
    for (std::uint64_t trial = 0; trial < args.trials; ++trial) {
      const auto pool = iid_leverage_sample(scores, pool_size, rng);
      if (thin(basis, pool, rng).success) ++successes;
    }
    const double rate = static_cast<double>(successes) / static_cast<double>(args.trials);
    out << args.m << ',' << format_double(args.delta) << ',' << pool_size << ','
        << args.trials << ',' << format_double(rate) << '\n';
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Determinantal point process sampling toolkit"};
  app.require_subcommand(1);

  SampleArgs sample_args;
  auto* sample_cmd = app.add_subcommand("sample", "Draw one DPP realization");
  sample_cmd->add_option("--projection", sample_args.projection_path,
                         "Orthonormal basis Q in matrix text format");
  sample_cmd->add_option("--lensemble", sample_args.lensemble_path,
                         "PSD matrix L in matrix text format");
  sample_cmd->add_option("--seed", sample_args.seed, "RNG seed");
  sample_cmd->add_option("--algorithm", sample_args.algorithm, "standard|rejection")
      ->check(CLI::IsMember({"standard", "rejection"}));
  sample_cmd->add_option("--cache", sample_args.cache, "on|off")
      ->check(CLI::IsMember({"on", "off"}));
  sample_cmd->add_option("--fixed-size", sample_args.fixed_size,
                         "Condition the L-ensemble on this sample size");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark the samplers");
  bench_cmd->add_option("--n", bench_args.n_values, "Ground set sizes")
      ->delimiter(',')
      ->required();
  bench_cmd->add_option("--m", bench_args.m_values, "Sample sizes")
      ->delimiter(',')
      ->required();
  bench_cmd->add_option("--reps", bench_args.reps, "Repetitions per cell");
  bench_cmd->add_option("--seed", bench_args.seed, "RNG seed");
  bench_cmd->add_option("--algorithm", bench_args.algorithm, "standard|rejection|both")
      ->check(CLI::IsMember({"standard", "rejection", "both"}));
  bench_cmd->add_option("--cache", bench_args.cache, "on|off")
      ->check(CLI::IsMember({"on", "off"}));
  bench_cmd->add_flag("--include-preprocessing", bench_args.include_preprocessing,
                      "Fold per-sample setup into the timed phase");

  PipelineArgs pipeline_args;
  auto* pipeline_cmd =
      app.add_subcommand("pipeline", "Gaussian kernel -> range finder -> sample");
  pipeline_cmd->add_option("--points", pipeline_args.points_path,
                           "Data matrix (rows are points); generated when omitted");
  pipeline_cmd->add_option("--n", pipeline_args.n, "Generated point count");
  pipeline_cmd->add_option("--d", pipeline_args.d, "Generated dimension");
  pipeline_cmd->add_option("--blobs", pipeline_args.blobs, "Generated cluster count");
  pipeline_cmd->add_option("--m", pipeline_args.m, "Target rank / sample size");
  pipeline_cmd->add_option("--column-factor", pipeline_args.column_factor,
                           "Kernel columns per unit of m");
  pipeline_cmd->add_option("--sigma", pipeline_args.sigma, "Kernel bandwidth");
  pipeline_cmd->add_option("--gamma", pipeline_args.gamma, "Kernel scale");
  pipeline_cmd->add_option("--seed", pipeline_args.seed, "RNG seed");
  pipeline_cmd->add_option("--algorithm", pipeline_args.algorithm, "standard|rejection")
      ->check(CLI::IsMember({"standard", "rejection"}));
  pipeline_cmd->add_option("--cache", pipeline_args.cache, "on|off")
      ->check(CLI::IsMember({"on", "off"}));

  ValidateArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "Statistical exactness suites");
  validate_cmd->add_option("--suite", validate_args.suite, "exactness|proposals|all");
  validate_cmd->add_option("--samples", validate_args.samples, "Samples per test");
  validate_cmd->add_option("--seed", validate_args.seed, "RNG seed");

  ThinningArgs thinning_args;
  auto* thinning_cmd =
      app.add_subcommand("thinning-exp", "Thinning success rate vs pool size");
  thinning_cmd->add_option("--m", thinning_args.m, "DPP sample size");
  thinning_cmd->add_option("--delta", thinning_args.delta, "Failure budget");
  thinning_cmd->add_option("--trials", thinning_args.trials, "Trials per pool size");
  thinning_cmd->add_option("--seed", thinning_args.seed, "RNG seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  }

  try {
    if (sample_cmd->parsed()) return cmd_sample(sample_args, out, err);
    if (bench_cmd->parsed()) return cmd_bench(bench_args, out, err);
    if (pipeline_cmd->parsed()) return cmd_pipeline(pipeline_args, out, err);
    if (validate_cmd->parsed()) return cmd_validate(validate_args, out, err);
    if (thinning_cmd->parsed()) return cmd_thinning(thinning_args, out, err);
  } catch (const DppError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << "no subcommand given\n";
  return 2;
}

}  // namespace dpp
