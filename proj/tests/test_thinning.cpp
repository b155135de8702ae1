#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "dpp/detail/rejection_engine.hpp"
#include "dpp/errors.hpp"
#include "dpp/kernels.hpp"
#include "dpp/oracle.hpp"
#include "dpp/thinning.hpp"

using namespace dpp;

TEST_CASE("iid leverage sampling from a point mass") {
  LeverageScores scores;
  scores.values = Vector::Zero(4);
  scores.values(2) = 1.0;
  scores.total = 1.0;
  Rng rng(1);
  for (const Index x : iid_leverage_sample(scores, 1000, rng)) CHECK(x == 2);
  CHECK(iid_leverage_sample(scores, 0, rng).empty());
}

TEST_CASE("iid leverage sampling is uniform for uniform scores") {
  const Index n = 10;
  LeverageScores scores;
  scores.values = Vector::Constant(n, 0.3);
  scores.total = 3.0;
  Rng rng(3);
  const std::size_t draws = 100000;
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  for (const Index x : iid_leverage_sample(scores, draws, rng)) {
    ++counts[static_cast<std::size_t>(x)];
  }
  const double p = 1.0 / static_cast<double>(n);
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(draws));
  for (const int c : counts) {
    CHECK(std::abs(static_cast<double>(c) / static_cast<double>(draws) - p) <=
          4.0 * sigma);
  }
}

TEST_CASE("thinning a full projection accepts every pool entry") {
  const OrthonormalBasis q(Matrix::Identity(4, 4));
  Rng rng(5);
  const ThinningResult result = thin(q, {0, 1, 2, 3, 0, 1}, rng);
  CHECK(result.success);
  auto sorted = result.indices;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<Index>{0, 1, 2, 3});
  CHECK(result.consumed <= 6);
}

TEST_CASE("thinning fails when the pool repeats a single item") {
  Rng setup(7);
  const OrthonormalBasis q = random_orthonormal(6, 2, setup);
  Rng rng(9);
  const ThinningResult result = thin(q, {3, 3, 3, 3, 3}, rng);
  CHECK_FALSE(result.success);
  CHECK(result.indices.empty());
  CHECK(result.consumed == 5);
}

TEST_CASE("thinning validates pool indices") {
  const OrthonormalBasis q(Matrix::Identity(3, 3));
  Rng rng(11);
  CHECK_THROWS_AS(thin(q, {0, 7}, rng), std::invalid_argument);
}

TEST_CASE("thinning succeeds at the corollary pool size") {
  const Index m = 20;
  const double delta = 0.1;
  Rng setup(13);
  const OrthonormalBasis basis = random_orthonormal(400, m, setup);
  const LeverageScores scores = leverage_scores(basis);
  const double md = static_cast<double>(m);
  const auto pool_size = static_cast<std::size_t>(
      std::ceil(2.0 * md * std::log(md) + 3.0 * md * std::log(1.0 / delta)));

  Rng rng(17);
  const int trials = 2000;
  int successes = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const auto pool = iid_leverage_sample(scores, pool_size, rng);
    const ThinningResult result = thin(basis, pool, rng);
    if (result.success) {
      ++successes;
      CHECK(result.indices.size() == static_cast<std::size_t>(m));
    }
  }
  CHECK(static_cast<double>(successes) / trials >= 1.0 - delta);
}

TEST_CASE("thinning success rate clears 1 - delta across the parameter grid") {
  Rng setup(61);
  for (const Index m : {Index{10}, Index{20}}) {
    const OrthonormalBasis basis = random_orthonormal(20 * m, m, setup);
    const LeverageScores scores = leverage_scores(basis);
    for (const double delta : {0.1, 0.25}) {
      const double md = static_cast<double>(m);
      const auto pool_size = static_cast<std::size_t>(
          std::ceil(2.0 * md * std::log(md) + 3.0 * md * std::log(1.0 / delta)));
      Rng rng = Rng::stream(67, static_cast<std::uint64_t>(m) * 100 +
                                    static_cast<std::uint64_t>(delta * 100));
      const int trials = 1000;
      int successes = 0;
      for (int trial = 0; trial < trials; ++trial) {
        const auto pool = iid_leverage_sample(scores, pool_size, rng);
        if (thin(basis, pool, rng).success) ++successes;
      }
      const double sigma = std::sqrt(delta * (1.0 - delta) / trials);
      CHECK(static_cast<double>(successes) / trials >= 1.0 - delta - 4.0 * sigma);
    }
  }
}

TEST_CASE("thinned output follows the projection law") {
  Rng setup(19);
  const OrthonormalBasis basis = random_orthonormal(6, 2, setup);
  const LeverageScores scores = leverage_scores(basis);
  const SubsetLaw law = projection_pmf(basis);

  Rng rng(23);
  std::vector<std::uint64_t> counts(law.subsets.size(), 0);
  int completed = 0;
  const int trials = 30000;
  for (int trial = 0; trial < trials; ++trial) {
    const auto pool = iid_leverage_sample(scores, 200, rng);
    ThinningResult result = thin(basis, pool, rng);
    if (!result.success) continue;
    ++completed;
    std::sort(result.indices.begin(), result.indices.end());
    const auto pos = law.find(result.indices);
    REQUIRE(pos.has_value());
    ++counts[*pos];
  }
  CHECK(completed > trials * 99 / 100);  // pool of 200 >> E[R] ~ 4.2
  CHECK(chi_square_gof(counts, law.probs).p_value > 0.001);
}

TEST_CASE("stratified basis columns are exact normalized indicators") {
  const OrthonormalBasis basis = stratified_basis({4, 2});
  const double v = std::sqrt(0.5);
  Matrix expected(4, 2);
  expected << v, 0, v, 0, 0, v, 0, v;
  CHECK((basis.matrix() - expected).cwiseAbs().maxCoeff() == 0.0);
  // Disjoint segment supports make the off-diagonal products exactly 0;
  // the diagonal is within an ulp of 1.
  const Matrix gram = basis.matrix().transpose() * basis.matrix();
  CHECK(gram(0, 1) == 0.0);
  CHECK(gram(1, 0) == 0.0);
  CHECK((gram - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
  const Matrix kernel = basis.matrix() * basis.matrix().transpose();
  for (Index i = 0; i < 4; ++i) CHECK(kernel(i, i) == doctest::Approx(0.5));
}

TEST_CASE("stratified gram matrix is bit-exact when the scale is representable") {
  // block = 4 gives column entries 0.5, whose squares sum to 1 exactly.
  const OrthonormalBasis basis = stratified_basis({16, 4});
  const Matrix gram = basis.matrix().transpose() * basis.matrix();
  CHECK((gram - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stratified sampling picks one index per segment") {
  const StratifiedSpec spec{12, 3};
  const OrthonormalBasis basis = stratified_basis(spec);
  const PreparedSampler prep(basis);
  Rng rng(29);
  const Index block = spec.n / spec.m;
  for (int rep = 0; rep < 300; ++rep) {
    auto indices = sample_rejection(prep, rng).indices;
    std::sort(indices.begin(), indices.end());
    REQUIRE(indices.size() == 3);
    for (Index j = 0; j < 3; ++j) {
      CHECK(indices[static_cast<std::size_t>(j)] / block == j);
    }
  }
}

TEST_CASE("stratified basis with n = m is the identity") {
  const OrthonormalBasis basis = stratified_basis({3, 3});
  CHECK((basis.matrix() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
  Rng rng(31);
  auto indices = sample_standard(basis, rng).indices;
  std::sort(indices.begin(), indices.end());
  CHECK(indices == std::vector<Index>{0, 1, 2});
}

TEST_CASE("stratified basis requires divisibility") {
  CHECK_THROWS_AS(stratified_basis({5, 2}), NotDivisibleError);
}

TEST_CASE("coupon collector edge cases") {
  Rng rng(37);
  CHECK(coupon_collector_experiment(1, 1, 1000, rng) == doctest::Approx(1.0));
  const double rate = coupon_collector_experiment(2, 2, 100000, rng);
  const double sigma = std::sqrt(0.25 / 100000.0);
  CHECK(std::abs(rate - 0.5) <= 4.0 * sigma);
}

TEST_CASE("coupon collector respects the analytic upper bound") {
  Rng rng(41);
  const Index m = 50;
  const std::uint64_t trials = 10000;
  const double bound = std::exp(1.0) / 51.0;  // exp(l/m)/(m+1) at l = m
  const double rate = coupon_collector_experiment(m, 50, trials, rng);
  const double sigma = std::sqrt(bound * (1.0 - bound) / static_cast<double>(trials));
  CHECK(rate <= bound + 4.0 * sigma);
}

TEST_CASE("urn experiment agrees with thinning the stratified DPP") {
  const Index m = 5;
  const std::uint64_t l = 12;
  const std::uint64_t trials = 20000;
  Rng rng_a(43);
  const double urn_rate = coupon_collector_experiment(m, l, trials, rng_a);

  // Same law via the sampler route: uniform pool of size l over n = m
  // items thinned through the stratified projection with singleton
  // segments.
  const OrthonormalBasis basis = stratified_basis({m, m});
  Rng rng_b(47);
  std::uint64_t successes = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    std::vector<Index> pool(l);
    for (auto& x : pool) {
      x = static_cast<Index>(rng_b.uniform_index(static_cast<std::uint64_t>(m)));
    }
    if (thin(basis, pool, rng_b).success) ++successes;
  }
  const double thin_rate = static_cast<double>(successes) / static_cast<double>(trials);

  const double p = 0.5 * (urn_rate + thin_rate);
  const double sigma =
      std::sqrt(2.0 * std::max(p * (1.0 - p), 1e-9) / static_cast<double>(trials));
  CHECK(std::abs(urn_rate - thin_rate) <= 4.0 * sigma);
}

TEST_CASE("thinning engine is the rejection engine under a coupled stream") {
  // Identical proposal streams and identical rng states must produce
  // identical runs; this pins thin() and sample_rejection() to the same
  // core.
  Rng setup(53);
  const OrthonormalBasis basis = random_orthonormal(30, 4, setup);
  const PreparedSampler prep(basis);

  std::vector<Index> proposal_log;
  detail::EngineRun direct;
  {
    Rng rng(59);
    const AliasTable& alias = prep.alias();
    auto propose = [&]() -> std::optional<Index> {
      const Index x = alias.draw(rng);
      proposal_log.push_back(x);
      return x;
    };
    direct = detail::rejection_engine(prep.rows(), prep.scores().values, propose, rng,
                                      {});
  }

  detail::EngineRun replayed;
  {
    Rng rng(59);
    std::size_t next = 0;
    const std::size_t n = static_cast<std::size_t>(basis.n());
    auto propose = [&]() -> std::optional<Index> {
      if (next >= proposal_log.size()) return std::nullopt;
      // Mirror the alias draw's rng consumption so acceptance draws stay
      // aligned with the direct run.
      rng.uniform_index(n);
      rng.uniform();
      return proposal_log[next++];
    };
    replayed = detail::rejection_engine(prep.rows(), prep.scores().values, propose, rng,
                                        {});
  }

  CHECK(direct.completed);
  CHECK(replayed.completed);
  CHECK(direct.indices == replayed.indices);
  CHECK(direct.proposals_per_step == replayed.proposals_per_step);
  CHECK(direct.total_proposals == replayed.total_proposals);
}
