#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "dpp/errors.hpp"
#include "dpp/matrix_io.hpp"
#include "dpp/rng.hpp"

using namespace dpp;

TEST_CASE("rng is deterministic per seed") {
  Rng a(42), b(42), c(43);
  bool all_equal = true;
  bool any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u64();
    all_equal = all_equal && (va == b.next_u64());
    any_diff = any_diff || (va != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("rng uniform stays in [0,1) and index in range") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto idx = rng.uniform_index(7);
    CHECK(idx < 7);
  }
}

TEST_CASE("rng streams are decorrelated") {
  Rng a = Rng::stream(5, 0);
  Rng b = Rng::stream(5, 1);
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++same;
  }
  CHECK(same == 0);
}

TEST_CASE("rng normal has sane moments") {
  Rng rng(99);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("shuffle yields a permutation") {
  Rng rng(3);
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
  auto w = v;
  rng.shuffle(w);
  auto sorted = w;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == v);
}

TEST_CASE("matrix text format round-trips doubles bit-exactly") {
  Rng rng(7);
  Matrix m(6, 4);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      // Stress the shortest-representation path with wild exponents.
      const int exponent = static_cast<int>(rng.uniform_index(600)) - 300;
      m(i, j) = (rng.uniform() * 2.0 - 1.0) * std::pow(10.0, exponent);
    }
  }
  m(0, 0) = 0.1;
  m(0, 1) = -0.0;
  m(0, 2) = 1.0 / 3.0;

  std::stringstream ss;
  write_matrix(ss, m);
  const Matrix back = read_matrix(ss);
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      CHECK(std::memcmp(&back(i, j), &m(i, j), sizeof(double)) == 0);
    }
  }
}

TEST_CASE("matrix reader rejects malformed input") {
  {
    std::stringstream ss("2 2\n1 2\n3\n");
    CHECK_THROWS_AS(read_matrix(ss), DppError);
  }
  {
    std::stringstream ss("2\n1 2\n");
    CHECK_THROWS_AS(read_matrix(ss), DppError);
  }
  {
    std::stringstream ss("1 2\n1 2 3\n");
    CHECK_THROWS_AS(read_matrix(ss), DppError);
  }
  {
    std::stringstream ss("1 1\nnan\n");
    CHECK_THROWS_AS(read_matrix(ss), DppError);
  }
  {
    std::stringstream ss("1 1\nbogus\n");
    CHECK_THROWS_AS(read_matrix(ss), DppError);
  }
}

TEST_CASE("format_double emits shortest representation") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(parse_double(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
