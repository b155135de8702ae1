#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "dpp/errors.hpp"
#include "dpp/kernels.hpp"
#include "dpp/oracle.hpp"
#include "dpp/projection.hpp"

using namespace dpp;

namespace {

std::vector<Index> sorted_indices(SampleTrace trace) {
  std::sort(trace.indices.begin(), trace.indices.end());
  return trace.indices;
}

// Draws `count` realizations and tallies them against the oracle's
// category layout.
template <class Sampler>
std::vector<std::uint64_t> tally(const SubsetLaw& law, std::uint64_t count,
                                 Sampler&& draw) {
  std::vector<std::uint64_t> counts(law.subsets.size(), 0);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto pos = law.find(draw());
    REQUIRE(pos.has_value());
    ++counts[*pos];
  }
  return counts;
}

}  // namespace

TEST_CASE("leverage scores of identity columns are indicator-like") {
  Matrix q = Matrix::Zero(5, 2);
  q(0, 0) = 1.0;
  q(1, 1) = 1.0;
  const LeverageScores scores = leverage_scores(OrthonormalBasis(std::move(q)));
  CHECK(scores.values(0) == doctest::Approx(1.0));
  CHECK(scores.values(1) == doctest::Approx(1.0));
  for (Index i = 2; i < 5; ++i) CHECK(scores.values(i) == doctest::Approx(0.0));
  CHECK(scores.total == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("leverage scores are squared row norms and sum to m") {
  Rng rng(101);
  const OrthonormalBasis q = random_orthonormal(40, 7, rng);
  const LeverageScores scores = leverage_scores(q);
  for (Index i = 0; i < q.n(); ++i) {
    CHECK(std::abs(scores.values(i) - q.matrix().row(i).squaredNorm()) <= 1e-12);
  }
  CHECK(std::abs(scores.total - 7.0) <= 1e-8);
}

TEST_CASE("standard sampler on the full identity returns everything") {
  const OrthonormalBasis q(Matrix::Identity(4, 4));
  Rng rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const auto indices = sorted_indices(sample_standard(q, rng));
    CHECK(indices == std::vector<Index>{0, 1, 2, 3});
  }
}

TEST_CASE("standard sampler on a deterministic singleton") {
  Matrix q(2, 1);
  q << 1, 0;
  const OrthonormalBasis basis(std::move(q));
  Rng rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const SampleTrace trace = sample_standard(basis, rng);
    CHECK(trace.indices == std::vector<Index>{0});
    CHECK(trace.total_proposals == 1);
  }
}

TEST_CASE("standard sampler matches the exact projection law") {
  Rng setup(103);
  const OrthonormalBasis basis = random_orthonormal(6, 2, setup);
  const SubsetLaw law = projection_pmf(basis);
  Rng rng(104);
  const auto counts = tally(law, 200000, [&] {
    return sorted_indices(sample_standard(basis, rng));
  });
  CHECK(chi_square_gof(counts, law.probs).p_value > 0.001);
}

TEST_CASE("rejection sampler matches the exact projection law") {
  Rng setup(105);
  const OrthonormalBasis basis = random_orthonormal(6, 2, setup);
  const SubsetLaw law = projection_pmf(basis);
  const PreparedSampler prep(basis);
  Rng rng(106);
  const auto counts = tally(law, 200000, [&] {
    return sorted_indices(sample_rejection(prep, rng));
  });
  CHECK(chi_square_gof(counts, law.probs).p_value > 0.001);
}

TEST_CASE("rejection sampler with cache enabled matches the law too") {
  Rng setup(107);
  const OrthonormalBasis basis = random_orthonormal(6, 3, setup);
  const SubsetLaw law = projection_pmf(basis);
  SamplerOptions options;
  options.cache = true;
  const PreparedSampler prep(basis, options);
  Rng rng(108);
  const auto counts = tally(law, 200000, [&] {
    return sorted_indices(sample_rejection(prep, rng));
  });
  CHECK(chi_square_gof(counts, law.probs).p_value > 0.001);
}

TEST_CASE("both samplers agree with each other in law") {
  Rng setup(109);
  const OrthonormalBasis basis = random_orthonormal(6, 2, setup);
  const SubsetLaw law = projection_pmf(basis);
  const PreparedSampler prep(basis);
  Rng rng_a(110), rng_b(111);
  const auto counts_std = tally(law, 100000, [&] {
    return sorted_indices(sample_standard(basis, rng_a));
  });
  const auto counts_rej = tally(law, 100000, [&] {
    return sorted_indices(sample_rejection(prep, rng_b));
  });
  CHECK(chi_square_two_sample(counts_std, counts_rej).p_value > 0.001);
}

TEST_CASE("first rejection step always accepts") {
  Rng setup(112);
  const PreparedSampler prep(random_orthonormal(50, 5, setup));
  Rng rng(113);
  for (int rep = 0; rep < 200; ++rep) {
    const SampleTrace trace = sample_rejection(prep, rng);
    CHECK(trace.proposals_per_step[0] == 1);
  }
}

TEST_CASE("expected total proposals follow m times the harmonic number") {
  // m = 3: per-step expectations (1, 1.5, 3), so E[R] = 5.5.
  Rng setup(114);
  const PreparedSampler prep(random_orthonormal(60, 3, setup));
  Rng rng(115);
  double total = 0.0;
  const int runs = 10000;
  for (int rep = 0; rep < runs; ++rep) {
    total += static_cast<double>(sample_rejection(prep, rng).total_proposals);
  }
  const double mean = total / runs;
  CHECK(std::abs(mean - 5.5) / 5.5 < 0.05);
}

TEST_CASE("per-step proposal counts are geometric") {
  const Index m = 5;
  Rng setup(116);
  const PreparedSampler prep(random_orthonormal(100, m, setup));
  Rng rng(117);
  const int runs = 10000;
  std::vector<std::vector<std::uint64_t>> per_step(m);
  for (int rep = 0; rep < runs; ++rep) {
    const SampleTrace trace = sample_rejection(prep, rng);
    for (Index t = 0; t < m; ++t) {
      per_step[static_cast<std::size_t>(t)].push_back(trace.proposals_per_step[t]);
    }
  }
  for (Index t = 1; t < m; ++t) {
    const double success = static_cast<double>(m - t) / static_cast<double>(m);
    constexpr std::size_t cap = 128;
    std::vector<std::uint64_t> counts(cap, 0);
    for (const std::uint64_t r : per_step[static_cast<std::size_t>(t)]) {
      ++counts[static_cast<std::size_t>(std::min<std::uint64_t>(r, cap)) - 1];
    }
    std::vector<double> probs(cap);
    for (std::size_t k = 0; k + 1 < cap; ++k) {
      probs[k] = success * std::pow(1.0 - success, static_cast<double>(k));
    }
    probs[cap - 1] = std::pow(1.0 - success, static_cast<double>(cap - 1));
    CHECK(chi_square_gof(counts, probs).p_value > 0.001);
  }
}

TEST_CASE("total proposals respect the high-probability tail bound") {
  const Index m = 20;
  Rng setup(118);
  const PreparedSampler prep(random_orthonormal(400, m, setup));
  const int runs = 10000;
  const double md = static_cast<double>(m);
  for (const double delta : {0.1, 0.25}) {
    const double bound = 2.0 * md * std::log(md) + 3.0 * md * std::log(1.0 / delta);
    int exceeded = 0;
    Rng rng = Rng::stream(119, static_cast<std::uint64_t>(delta * 1000));
    for (int rep = 0; rep < runs; ++rep) {
      if (static_cast<double>(sample_rejection(prep, rng).total_proposals) > bound) {
        ++exceeded;
      }
    }
    CHECK(static_cast<double>(exceeded) / runs <= delta);
  }
}

TEST_CASE("inclusion marginals match the kernel diagonal") {
  Rng setup(120);
  const OrthonormalBasis basis = random_orthonormal(30, 5, setup);
  const LeverageScores scores = leverage_scores(basis);
  const PreparedSampler prep(basis);
  Rng rng(121);
  const int runs = 20000;
  std::vector<int> hits(30, 0);
  for (int rep = 0; rep < runs; ++rep) {
    for (const Index i : sample_rejection(prep, rng).indices) {
      ++hits[static_cast<std::size_t>(i)];
    }
  }
  for (Index i = 0; i < 30; ++i) {
    const double p = scores.values(i);
    const double freq = static_cast<double>(hits[static_cast<std::size_t>(i)]) / runs;
    const double sigma = std::sqrt(p * (1.0 - p) / runs);
    CHECK(std::abs(freq - p) <= 4.0 * sigma + 1e-9);
  }
}

TEST_CASE("pi stays monotone and correctly normalized along the run") {
  Rng setup(122);
  Rng rng(123);
  for (int rep = 0; rep < 100; ++rep) {
    const Index n = 12 + static_cast<Index>(setup.uniform_index(20));
    const Index m = 2 + static_cast<Index>(setup.uniform_index(5));
    const OrthonormalBasis basis = random_orthonormal(n, m, setup);
    Vector previous;
    sample_standard(basis, rng, {}, [&](Index step, const Vector& pi) {
      const double md = static_cast<double>(m);
      CHECK(std::abs(pi.sum() - (md - static_cast<double>(step))) <= 1e-6 * md);
      if (step > 0) {
        for (Index i = 0; i < n; ++i) CHECK(pi(i) <= previous(i) + 1e-9);
      }
      previous = pi;
    });
  }
}

TEST_CASE("acceptance ratio is 1 on an empty basis and 0 on selected rows") {
  Rng setup(124);
  const OrthonormalBasis basis = random_orthonormal(8, 3, setup);
  const LeverageScores scores = leverage_scores(basis);
  GramSchmidtBasis gs(3);
  CHECK(acceptance_ratio(basis, scores, gs, 2) == doctest::Approx(1.0));

  gs.append(basis.matrix().row(2).transpose());
  CHECK(acceptance_ratio(basis, scores, gs, 2) <= 1e-9);
}

TEST_CASE("acceptance ratio reproduces the kernel conditional") {
  Rng setup(125);
  const OrthonormalBasis basis = random_orthonormal(4, 2, setup);
  const Matrix k = basis.matrix() * basis.matrix().transpose();
  const LeverageScores scores = leverage_scores(basis);

  const Index first = 1;
  GramSchmidtBasis gs(2);
  gs.append(basis.matrix().row(first).transpose());
  for (Index x = 0; x < 4; ++x) {
    if (x == first) continue;
    const double expected =
        (k(x, x) - k(x, first) * k(x, first) / k(first, first)) / k(x, x);
    CHECK(std::abs(acceptance_ratio(basis, scores, gs, x) - expected) <= 1e-9);
  }
}

TEST_CASE("proposal cache values agree with the direct evaluation") {
  Rng setup(126);
  const OrthonormalBasis basis = random_orthonormal(10, 4, setup);
  const RowMajorMatrix rows = basis.matrix();
  const LeverageScores scores = leverage_scores(basis);

  GramSchmidtBasis gs(4);
  ProposalCache cache(10);
  const Index probe = 7;
  for (const Index picked : {0, 3, 5, 9}) {
    // Interleave refreshes so the cache resumes from partial sums.
    const double direct = gs.projected_sq_norm(rows.row(probe).transpose());
    const double cached = cache.refresh(rows, gs, probe);
    CHECK(std::abs(direct - cached) <= 1e-9);
    CHECK(cache.last_step(probe) == gs.size() + 1);
    CHECK(std::abs(cache.last_value(probe, scores.values) -
                   (scores.values(probe) - direct)) <= 1e-9);
    gs.append(rows.row(picked).transpose());
  }
}

TEST_CASE("same seed reproduces identical traces") {
  Rng setup(128);
  const OrthonormalBasis basis = random_orthonormal(20, 4, setup);
  const PreparedSampler prep(basis);
  {
    Rng a(9), b(9);
    const SampleTrace ta = sample_rejection(prep, a);
    const SampleTrace tb = sample_rejection(prep, b);
    CHECK(ta.indices == tb.indices);
    CHECK(ta.proposals_per_step == tb.proposals_per_step);
    CHECK(ta.seed == tb.seed);
  }
  {
    Rng a(9), b(9);
    CHECK(sample_standard(basis, a).indices == sample_standard(basis, b).indices);
  }
}

TEST_CASE("sample_repeated reuses preprocessing and stays independent") {
  Rng setup(129);
  const PreparedSampler prep(random_orthonormal(25, 3, setup));
  {
    Rng a(31), b(31);
    const auto traces = sample_repeated(prep, 1, a);
    REQUIRE(traces.size() == 1);
    CHECK(traces[0].indices == sample_rejection(prep, b).indices);
  }
  Rng rng(32);
  const auto traces = sample_repeated(prep, 50, rng);
  CHECK(traces.size() == 50);
  std::map<std::vector<Index>, int> distinct;
  for (const auto& t : traces) {
    CHECK(t.indices.size() == 3);
    ++distinct[t.indices];
  }
  CHECK(distinct.size() > 1);
}

TEST_CASE("underflow guard trips on a broken basis") {
  // A deliberately non-orthonormal matrix smuggled in unchecked: the
  // running pi total starts far from m.
  const OrthonormalBasis broken(OrthonormalBasis::Unchecked{},
                                0.5 * Matrix::Identity(4, 4));
  Rng rng(33);
  CHECK_THROWS_AS(sample_standard(broken, rng), NumericalUnderflowError);
}

TEST_CASE("proposal cap converts a livelock into an error") {
  // Leverage scores concentrated on one already-exhausted item.
  const OrthonormalBasis basis(Matrix::Identity(2, 2));
  LeverageScores scores;
  scores.values = Vector(2);
  scores.values << 1.0, 1e-300;
  scores.total = 1.0;
  const PreparedSampler prep(basis, scores);
  Rng rng(34);
  CHECK_THROWS_AS(sample_rejection(prep, rng), ProposalCapError);
}

TEST_CASE("acceptance ratio rejects zero-leverage items") {
  Matrix q = Matrix::Zero(3, 1);
  q(0, 0) = 1.0;
  const OrthonormalBasis basis(std::move(q));
  const LeverageScores scores = leverage_scores(basis);
  GramSchmidtBasis gs(1);
  CHECK_THROWS_AS(acceptance_ratio(basis, scores, gs, 2), std::invalid_argument);
}
