#ifndef DPP_BENCH_HPP
#define DPP_BENCH_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dpp/rng.hpp"
#include "dpp/types.hpp"

namespace dpp {

struct BenchConfig {
  std::vector<Index> n_values;
  std::vector<Index> m_values;
  int repetitions = 100;
  std::uint64_t seed = 0;
  bool run_standard = true;
  bool run_rejection = true;
  bool include_preprocessing = false;  // fold per-sample setup into the timing
  bool cache = false;
};

struct BenchRow {
  Index n = 0;
  Index m = 0;
  std::string algorithm;  // "standard" | "rejection"
  std::string phase;      // "orthonormalize" | "preprocess" | "sample"
  double median_s = 0.0;
  double q1_s = 0.0;
  double q3_s = 0.0;
  double mean_proposals = 0.0;  // 0 for non-sample phases
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

// Header is exactly: n,m,algorithm,phase,median_s,q1_s,q3_s,mean_R
void write_bench_csv(std::ostream& os, const BenchReport& report);

// For each (n, m): build a random projection basis via QR of Gaussian
// entries, precompute leverage scores, then time `repetitions` runs of
// each selected algorithm and report median/quartile wall times.
BenchReport run_benchmark(const BenchConfig& config);

struct PipelineConfig {
  Matrix points;             // n×d data
  double sigma = 1.0;
  double gamma = 1.0;
  Index target_rank = 0;     // m
  Index column_factor = 5;   // kernel columns = factor * m, capped at n
  bool use_rejection = true;
  bool cache = false;
};

struct PipelineResult {
  std::vector<Index> sample;
  std::uint64_t total_proposals = 0;
  double kernel_seconds = 0.0;
  double rangefinder_seconds = 0.0;
  double sample_seconds = 0.0;
};

// Gaussian kernel columns -> randomized range finder -> projection DPP
// sample, with per-phase wall times.
PipelineResult run_pipeline(const PipelineConfig& config, Rng& rng);

// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

}  // namespace dpp

#endif  // DPP_BENCH_HPP
