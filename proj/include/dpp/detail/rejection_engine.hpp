#ifndef DPP_DETAIL_REJECTION_ENGINE_HPP
#define DPP_DETAIL_REJECTION_ENGINE_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dpp/errors.hpp"
#include "dpp/linalg.hpp"
#include "dpp/projection.hpp"
#include "dpp/rng.hpp"
#include "dpp/types.hpp"

namespace dpp::detail {

struct EngineOptions {
  bool cache = false;
  std::uint64_t proposal_cap = std::numeric_limits<std::uint64_t>::max();
  LinalgOptions linalg{};
};

struct EngineRun {
  std::vector<Index> indices;
  std::vector<std::uint64_t> proposals_per_step;
  std::uint64_t total_proposals = 0;
  bool completed = false;  // false when the proposal source ran dry
};

// Accept/reject core shared by the alias-fed rejection sampler and the
// thinning algorithm. `propose` returns the next candidate index or
// nullopt when the source is exhausted; all acceptance randomness comes
// from `rng`, one uniform per proposal. Feeding two runs the same
// proposal stream and the same rng state therefore yields identical
// output.
template <class ProposeFn>
EngineRun rejection_engine(const RowMajorMatrix& rows, const Vector& pi1,
                           ProposeFn&& propose, Rng& rng, const EngineOptions& opts) {
  const Index m = rows.cols();
  EngineRun run;
  run.indices.reserve(static_cast<std::size_t>(m));
  run.proposals_per_step.reserve(static_cast<std::size_t>(m));

  GramSchmidtBasis basis(m, opts.linalg);
  std::optional<ProposalCache> cache;
  if (opts.cache) cache.emplace(rows.rows());

  for (Index t = 0; t < m; ++t) {
    std::uint64_t step_proposals = 0;
    for (;;) {
      if (run.total_proposals + step_proposals >= opts.proposal_cap) {
        throw ProposalCapError("rejection sampler exceeded the proposal cap; "
                               "the instance is numerically degenerate");
      }
      const std::optional<Index> candidate = propose();
      if (!candidate) {
        run.total_proposals += step_proposals;
        if (step_proposals > 0) run.proposals_per_step.push_back(step_proposals);
        return run;  // completed stays false
      }
      ++step_proposals;
      const Index x = *candidate;
      const double pi1_x = pi1(x);
      if (!(pi1_x > 0.0)) {
        throw std::logic_error("rejection engine: proposal with zero leverage score");
      }
      const double subtracted =
          cache ? cache->refresh(rows, basis, x)
                : basis.projected_sq_norm(rows.row(x).transpose());
      double ratio = 1.0 - subtracted / pi1_x;
      ratio = std::min(1.0, std::max(0.0, ratio));
      if (rng.uniform() < ratio) {
        basis.append(rows.row(x).transpose());
        run.indices.push_back(x);
        break;
      }
    }
    run.proposals_per_step.push_back(step_proposals);
    run.total_proposals += step_proposals;
  }
  run.completed = true;
  return run;
}

}  // namespace dpp::detail

#endif  // DPP_DETAIL_REJECTION_ENGINE_HPP
