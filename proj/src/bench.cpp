#include "dpp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "dpp/kernels.hpp"
#include "dpp/matrix_io.hpp"
#include "dpp/projection.hpp"

namespace dpp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(const Clock::time_point& start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct PhaseSamples {
  std::vector<double> times;
  double proposal_sum = 0.0;
  int proposal_runs = 0;
};

BenchRow make_row(Index n, Index m, const std::string& algorithm,
                  const std::string& phase, const PhaseSamples& samples) {
  BenchRow row;
  row.n = n;
  row.m = m;
  row.algorithm = algorithm;
  row.phase = phase;
  row.median_s = quantile(samples.times, 0.5);
  row.q1_s = quantile(samples.times, 0.25);
  row.q3_s = quantile(samples.times, 0.75);
  row.mean_proposals =
      samples.proposal_runs > 0 ? samples.proposal_sum / samples.proposal_runs : 0.0;
  return row;
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

void write_bench_csv(std::ostream& os, const BenchReport& report) {
  os << "n,m,algorithm,phase,median_s,q1_s,q3_s,mean_R\n";
  for (const BenchRow& row : report.rows) {
    os << row.n << ',' << row.m << ',' << row.algorithm << ',' << row.phase << ','
       << format_double(row.median_s) << ',' << format_double(row.q1_s) << ','
       << format_double(row.q3_s) << ',' << format_double(row.mean_proposals) << '\n';
  }
}

BenchReport run_benchmark(const BenchConfig& config) {
  if (config.repetitions < 1) {
    throw std::invalid_argument("run_benchmark: repetitions must be >= 1");
  }
  for (const Index n : config.n_values) {
    for (const Index m : config.m_values) {
      if (m > n) throw std::invalid_argument("run_benchmark: every n must be >= every m");
    }
  }

  BenchReport report;
  std::uint64_t cell = 0;
  for (const Index n : config.n_values) {
    for (const Index m : config.m_values) {
      ++cell;
      Rng setup_rng = Rng::stream(config.seed, cell * 1000003ULL);

      const auto ortho_start = Clock::now();
      const OrthonormalBasis basis = random_orthonormal(n, m, setup_rng);
      const double ortho_seconds = seconds_since(ortho_start);

      SamplerOptions options;
      options.cache = config.cache;
      const PreparedSampler prep(basis, options);

      struct AlgSpec {
        const char* name;
        bool enabled;
      };
      const AlgSpec algs[] = {{"standard", config.run_standard},
                              {"rejection", config.run_rejection}};
      for (const AlgSpec& alg : algs) {
        if (!alg.enabled) continue;
        PhaseSamples prep_phase, sample_phase;
        const bool rejection = std::string(alg.name) == "rejection";
        for (int rep = 0; rep < config.repetitions; ++rep) {
          Rng rng = Rng::stream(config.seed,
                                cell * 1000003ULL + 1 + static_cast<std::uint64_t>(rep));
          // Preprocessing phase: what a fresh sampler would set up once.
          const auto prep_start = Clock::now();
          if (rejection) {
            const PreparedSampler fresh(basis, options);
            prep_phase.times.push_back(seconds_since(prep_start));
          } else {
            const LeverageScores fresh = leverage_scores(basis);
            (void)fresh;
            prep_phase.times.push_back(seconds_since(prep_start));
          }

          const auto sample_start = Clock::now();
          std::uint64_t proposals = 0;
          if (config.include_preprocessing) {
            if (rejection) {
              const PreparedSampler timed_prep(basis, options);
              proposals = sample_rejection(timed_prep, rng).total_proposals;
            } else {
              proposals = sample_standard(basis, rng, options).total_proposals;
            }
          } else {
            if (rejection) {
              proposals = sample_rejection(prep, rng).total_proposals;
            } else {
              proposals = sample_standard(basis, rng, options).total_proposals;
            }
          }
          sample_phase.times.push_back(seconds_since(sample_start));
          sample_phase.proposal_sum += static_cast<double>(proposals);
          sample_phase.proposal_runs += 1;
        }
        PhaseSamples ortho_phase;
        ortho_phase.times.assign(1, ortho_seconds);
        report.rows.push_back(make_row(n, m, alg.name, "orthonormalize", ortho_phase));
        report.rows.push_back(make_row(n, m, alg.name, "preprocess", prep_phase));
        report.rows.push_back(make_row(n, m, alg.name, "sample", sample_phase));
      }
    }
  }
  return report;
}

PipelineResult run_pipeline(const PipelineConfig& config, Rng& rng) {
  const Index n = config.points.rows();
  const Index m = config.target_rank;
  if (m <= 0 || m > n) {
    throw std::invalid_argument("run_pipeline: need 1 <= target rank <= n");
  }
  PipelineResult result;

  const auto kernel_start = Clock::now();
  const Index columns = std::min(n, config.column_factor * m);
  const std::vector<Index> picked = sample_distinct_indices(n, columns, rng);
  const Matrix a =
      gaussian_kernel_columns(config.points, picked, config.sigma, config.gamma);
  result.kernel_seconds = seconds_since(kernel_start);

  const auto rf_start = Clock::now();
  const OrthonormalBasis basis = randomized_range_finder(a, m, rng);
  result.rangefinder_seconds = seconds_since(rf_start);

  const auto sample_start = Clock::now();
  SamplerOptions options;
  options.cache = config.cache;
  if (config.use_rejection) {
    const PreparedSampler prep(basis, options);
    SampleTrace trace = sample_rejection(prep, rng);
    result.total_proposals = trace.total_proposals;
    result.sample = std::move(trace.indices);
  } else {
    SampleTrace trace = sample_standard(basis, rng, options);
    result.total_proposals = trace.total_proposals;
    result.sample = std::move(trace.indices);
  }
  result.sample_seconds = seconds_since(sample_start);
  std::sort(result.sample.begin(), result.sample.end());
  return result;
}

}  // namespace dpp
