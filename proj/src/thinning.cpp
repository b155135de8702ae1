#include "dpp/thinning.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "dpp/alias.hpp"
#include "dpp/detail/rejection_engine.hpp"
#include "dpp/errors.hpp"

namespace dpp {

std::vector<Index> iid_leverage_sample(const LeverageScores& scores, std::size_t count,
                                       Rng& rng) {
  std::vector<Index> draws;
  draws.reserve(count);
  if (count == 0) return draws;
  const AliasTable table(scores.values);
  for (std::size_t i = 0; i < count; ++i) draws.push_back(table.draw(rng));
  return draws;
}

ThinningResult thin(const OrthonormalBasis& q, std::vector<Index> pool, Rng& rng) {
  for (const Index x : pool) {
    if (x < 0 || x >= q.n()) {
      throw std::invalid_argument("thin: pool index out of range");
    }
  }
  // Uniform-without-replacement consumption == consume a one-time
  // shuffle in order.
  rng.shuffle(pool);

  const RowMajorMatrix rows = q.matrix();
  const LeverageScores scores = leverage_scores(q);

  std::size_t next = 0;
  auto propose = [&pool, &next]() -> std::optional<Index> {
    if (next >= pool.size()) return std::nullopt;
    return pool[next++];
  };
  const detail::EngineRun run =
      detail::rejection_engine(rows, scores.values, propose, rng, {});

  ThinningResult result;
  result.success = run.completed;
  result.consumed = run.total_proposals;
  if (run.completed) result.indices = run.indices;
  return result;
}

OrthonormalBasis stratified_basis(const StratifiedSpec& spec) {
  if (spec.n <= 0 || spec.m <= 0) {
    throw std::invalid_argument("stratified_basis: n and m must be positive");
  }
  if (spec.n % spec.m != 0) {
    throw NotDivisibleError("stratified_basis: m does not divide n");
  }
  const Index block = spec.n / spec.m;
  const double value = std::sqrt(static_cast<double>(spec.m) /
                                 static_cast<double>(spec.n));
  Matrix e = Matrix::Zero(spec.n, spec.m);
  for (Index j = 0; j < spec.m; ++j) {
    e.block(j * block, j, block, 1).setConstant(value);
  }
  return OrthonormalBasis(OrthonormalBasis::Unchecked{}, std::move(e));
}

double coupon_collector_experiment(Index m, std::uint64_t l, std::uint64_t trials,
                                   Rng& rng) {
  if (m <= 0 || trials == 0) {
    throw std::invalid_argument("coupon_collector_experiment: need m >= 1, trials >= 1");
  }
  std::uint64_t successes = 0;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(m));
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    std::fill(seen.begin(), seen.end(), 0);
    Index covered = 0;
    for (std::uint64_t t = 0; t < l && covered < m; ++t) {
      const auto urn = static_cast<std::size_t>(
          rng.uniform_index(static_cast<std::uint64_t>(m)));
      if (!seen[urn]) {
        seen[urn] = 1;
        ++covered;
      }
    }
    if (covered == m) ++successes;
  }
  return static_cast<double>(successes) / static_cast<double>(trials);
}

}  // namespace dpp
