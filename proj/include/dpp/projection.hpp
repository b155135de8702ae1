#ifndef DPP_PROJECTION_HPP
#define DPP_PROJECTION_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "dpp/alias.hpp"
#include "dpp/linalg.hpp"
#include "dpp/rng.hpp"
#include "dpp/types.hpp"

namespace dpp {

// Squared row norms of Q; entry i equals K_ii of the projection kernel
// and the total equals m (the trace).
struct LeverageScores {
  Vector values;
  double total = 0.0;
};

LeverageScores leverage_scores(const OrthonormalBasis& q);

// One DPP realization: the ordered selection x_1..x_m plus the number of
// proposals spent at each step. Consumers of the DPP itself must ignore
// the order. For the standard algorithm every R_t is 1 by convention.
struct SampleTrace {
  std::vector<Index> indices;
  std::vector<std::uint64_t> proposals_per_step;
  std::uint64_t total_proposals = 0;
  std::uint64_t seed = 0;
};

struct SamplerOptions {
  bool cache = false;             // keep last density evaluation per item
  double underflow_tol = 1e-6;    // allowed |sum(pi) - (m-t+1)|, times m
  double guard_delta = 1e-12;     // delta in the proposal-cap formula
  double cap_multiplier = 10.0;   // cap = multiplier * (2m ln m + 3m ln(1/delta))
};

// Reusable state for repeated sampling: leverage scores and the alias
// table are computed once, every subsequent sample costs O(m^3 log m)
// in expectation. Immutable and shareable across threads; each sampling
// call needs its own Rng.
class PreparedSampler {
 public:
  explicit PreparedSampler(OrthonormalBasis basis, SamplerOptions options = {});
  PreparedSampler(OrthonormalBasis basis, LeverageScores scores,
                  SamplerOptions options = {});

  const OrthonormalBasis& basis() const { return basis_; }
  const LeverageScores& scores() const { return scores_; }
  const AliasTable& alias() const { return alias_; }
  const SamplerOptions& options() const { return options_; }
  // Row-major copy of Q for contiguous row access in the proposal loop.
  const RowMajorMatrix& rows() const { return rows_; }

  std::uint64_t proposal_cap() const;

 private:
  OrthonormalBasis basis_;
  RowMajorMatrix rows_;
  LeverageScores scores_;
  AliasTable alias_;
  SamplerOptions options_;
};

// Per-item memo of the last density evaluation: the mass already
// subtracted from pi(1)(x) and the number of Gram-Schmidt columns it
// covers. Revisiting a rejected proposal resumes the subtraction from
// the cached column instead of starting over.
class ProposalCache {
 public:
  explicit ProposalCache(Index n)
      : subtracted_(static_cast<std::size_t>(n), 0.0),
        columns_(static_cast<std::size_t>(n), 0) {}

  // Folds in the columns appended since the last visit and returns the
  // up-to-date subtracted mass sum_{j<t-1} (Q_{x,:} s_j)^2.
  double refresh(const RowMajorMatrix& rows, const GramSchmidtBasis& basis, Index x) {
    const auto xi = static_cast<std::size_t>(x);
    subtracted_[xi] +=
        basis.projected_sq_norm_tail(rows.row(x).transpose(), columns_[xi]);
    columns_[xi] = basis.size();
    return subtracted_[xi];
  }

  // Step t such that the cached value equals pi(t)(x).
  Index last_step(Index x) const { return columns_[static_cast<std::size_t>(x)] + 1; }
  double subtracted(Index x) const { return subtracted_[static_cast<std::size_t>(x)]; }
  double last_value(Index x, const Vector& pi1) const {
    return pi1(x) - subtracted_[static_cast<std::size_t>(x)];
  }

 private:
  std::vector<double> subtracted_;
  std::vector<Index> columns_;
};

// Observer invoked with the unnormalized conditional density right
// before each draw of sample_standard; step is 0-based.
using StandardStepObserver = std::function<void(Index step, const Vector& pi)>;

// Sequential sampler: at step t draws from pi(t)/(m-t+1) by cumulative
// scan and downdates pi via pi(i) -= (Q_{i,:} s_t)^2. Cost O(nm) per step.
SampleTrace sample_standard(const OrthonormalBasis& q, Rng& rng,
                            const SamplerOptions& options = {},
                            const StandardStepObserver& observer = {});

// Rejection sampler: proposals drawn from pi(1) through the alias table,
// accepted with probability pi(t)(x)/pi(1)(x). Identical in law to
// sample_standard; expected cost O(m^3 log m) after preprocessing.
SampleTrace sample_rejection(const PreparedSampler& prep, Rng& rng);

// k independent realizations without recomputing the preprocessing.
std::vector<SampleTrace> sample_repeated(const PreparedSampler& prep, std::size_t count,
                                         Rng& rng);

// Probability of keeping a proposal x given the Gram-Schmidt columns
// accepted so far: clamp(1 - ||Sᵀ Q_{x,:}||^2 / pi1(x), 0, 1).
double acceptance_ratio(const OrthonormalBasis& q, const LeverageScores& scores,
                        const GramSchmidtBasis& basis, Index x);

}  // namespace dpp

#endif  // DPP_PROJECTION_HPP
