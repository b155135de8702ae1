#include "dpp/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpp/detail/rejection_engine.hpp"
#include "dpp/errors.hpp"

namespace dpp {

LeverageScores leverage_scores(const OrthonormalBasis& q) {
  LeverageScores out;
  out.values = q.matrix().rowwise().squaredNorm();
  out.total = out.values.sum();
  return out;
}

PreparedSampler::PreparedSampler(OrthonormalBasis basis, SamplerOptions options)
    : basis_(std::move(basis)),
      rows_(basis_.matrix()),
      scores_(leverage_scores(basis_)),
      alias_(scores_.values),
      options_(options) {}

PreparedSampler::PreparedSampler(OrthonormalBasis basis, LeverageScores scores,
                                 SamplerOptions options)
    : basis_(std::move(basis)),
      rows_(basis_.matrix()),
      scores_(std::move(scores)),
      alias_(scores_.values),
      options_(options) {}

std::uint64_t PreparedSampler::proposal_cap() const {
  const double m = static_cast<double>(basis_.m());
  if (m < 2.0) return std::max<std::uint64_t>(64, static_cast<std::uint64_t>(
                                                      16.0 * options_.cap_multiplier));
  const double bound =
      2.0 * m * std::log(m) + 3.0 * m * std::log(1.0 / options_.guard_delta);
  return static_cast<std::uint64_t>(options_.cap_multiplier * bound) + 1;
}

SampleTrace sample_standard(const OrthonormalBasis& q, Rng& rng,
                            const SamplerOptions& options,
                            const StandardStepObserver& observer) {
  const Index n = q.n();
  const Index m = q.m();
  const Matrix& mat = q.matrix();

  Vector pi = mat.rowwise().squaredNorm();
  GramSchmidtBasis basis(m);

  SampleTrace trace;
  trace.seed = rng.seed();
  trace.indices.reserve(static_cast<std::size_t>(m));
  trace.proposals_per_step.assign(static_cast<std::size_t>(m), 1);
  trace.total_proposals = static_cast<std::uint64_t>(m);

  for (Index t = 0; t < m; ++t) {
    if (observer) observer(t, pi);
    const double running_total = pi.sum();
    const double expected = static_cast<double>(m - t);
    if (std::abs(running_total - expected) >
        options.underflow_tol * static_cast<double>(m)) {
      throw NumericalUnderflowError(
          "sample_standard: sum(pi) = " + std::to_string(running_total) +
          " drifted from " + std::to_string(expected));
    }
    // Cumulative scan renormalized by the running total, which guards
    // against drift relative to the theoretical m - t.
    const double u = rng.uniform() * running_total;
    double cum = 0.0;
    Index x = -1;
    Index last_positive = -1;
    for (Index i = 0; i < n; ++i) {
      if (pi(i) <= 0.0) continue;
      last_positive = i;
      cum += pi(i);
      if (u < cum) {
        x = i;
        break;
      }
    }
    if (x < 0) x = last_positive;  // fp edge: u landed at the very top
    if (x < 0) {
      throw NumericalUnderflowError("sample_standard: no positive mass left");
    }

    basis.append(mat.row(x).transpose());
    trace.indices.push_back(x);

    const Vector direction = basis.columns().col(basis.size() - 1);
    const Vector v = mat * direction;
    pi = (pi - v.cwiseProduct(v)).cwiseMax(0.0);
  }
  return trace;
}

SampleTrace sample_rejection(const PreparedSampler& prep, Rng& rng) {
  detail::EngineOptions opts;
  opts.cache = prep.options().cache;
  opts.proposal_cap = prep.proposal_cap();
  const AliasTable& alias = prep.alias();
  auto propose = [&alias, &rng]() -> std::optional<Index> { return alias.draw(rng); };
  detail::EngineRun run = rejection_engine(prep.rows(), prep.scores().values, propose,
                                           rng, opts);
  SampleTrace trace;
  trace.indices = std::move(run.indices);
  trace.proposals_per_step = std::move(run.proposals_per_step);
  trace.total_proposals = run.total_proposals;
  trace.seed = rng.seed();
  return trace;
}

std::vector<SampleTrace> sample_repeated(const PreparedSampler& prep, std::size_t count,
                                         Rng& rng) {
  std::vector<SampleTrace> traces;
  traces.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    traces.push_back(sample_rejection(prep, rng));
  }
  return traces;
}

double acceptance_ratio(const OrthonormalBasis& q, const LeverageScores& scores,
                        const GramSchmidtBasis& basis, Index x) {
  if (x < 0 || x >= q.n()) {
    throw std::invalid_argument("acceptance_ratio: index out of range");
  }
  const double pi1_x = scores.values(x);
  if (!(pi1_x > 0.0)) {
    throw std::invalid_argument("acceptance_ratio: item has zero leverage score");
  }
  const double subtracted = basis.projected_sq_norm(q.matrix().row(x).transpose());
  const double ratio = 1.0 - subtracted / pi1_x;
  return std::min(1.0, std::max(0.0, ratio));
}

}  // namespace dpp
