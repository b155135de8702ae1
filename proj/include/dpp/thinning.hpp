#ifndef DPP_THINNING_HPP
#define DPP_THINNING_HPP

#include <cstdint>
#include <vector>

#include "dpp/linalg.hpp"
#include "dpp/projection.hpp"
#include "dpp/rng.hpp"
#include "dpp/types.hpp"

namespace dpp {

struct ThinningResult {
  bool success = false;
  std::vector<Index> indices;      // size m iff success
  std::uint64_t consumed = 0;      // proposals taken from the pool
};

// `count` i.i.d. draws with replacement, proportional to the leverage
// scores.
std::vector<Index> iid_leverage_sample(const LeverageScores& scores, std::size_t count,
                                       Rng& rng);

// Thinning algorithm: run the rejection sampler with the proposal stream
// replaced by a uniform random permutation of `pool`. Succeeds iff m
// acceptances happen before the pool is exhausted; failure is a result,
// not an error.
ThinningResult thin(const OrthonormalBasis& q, std::vector<Index> pool, Rng& rng);

// Stratified sampling as a projection DPP: m segments of n/m contiguous
// indices, one column per segment.
struct StratifiedSpec {
  Index n = 0;
  Index m = 0;
};

// Column j is the indicator of segment j scaled to unit norm, so
// EᵀE = I exactly and every K_ii equals m/n.
OrthonormalBasis stratified_basis(const StratifiedSpec& spec);

// Fraction of trials in which l uniform throws into m urns cover every
// urn; estimates P(T <= l) for the coupon-collector time T. Equivalent
// in law to thinning the stratified DPP with a uniform pool.
double coupon_collector_experiment(Index m, std::uint64_t l, std::uint64_t trials,
                                   Rng& rng);

}  // namespace dpp

#endif  // DPP_THINNING_HPP
