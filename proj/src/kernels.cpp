#include "dpp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace dpp {

Matrix gaussian_kernel_columns(const Matrix& points, std::span<const Index> column_indices,
                               double sigma, double gamma) {
  if (!(sigma > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("gaussian_kernel_columns: need sigma > 0 and gamma > 0");
  }
  const Index n = points.rows();
  const double inv_sigma_sq = 1.0 / (sigma * sigma);
  Matrix out(n, static_cast<Index>(column_indices.size()));
  for (std::size_t j = 0; j < column_indices.size(); ++j) {
    const Index c = column_indices[j];
    if (c < 0 || c >= n) {
      throw std::invalid_argument("gaussian_kernel_columns: column index out of range");
    }
    for (Index i = 0; i < n; ++i) {
      const double dist_sq = (points.row(i) - points.row(c)).squaredNorm();
      out(i, static_cast<Index>(j)) = gamma * std::exp(-dist_sq * inv_sigma_sq);
    }
  }
  return out;
}

Matrix gaussian_blobs(Index n, Index d, Index blobs, Rng& rng) {
  if (n <= 0 || d <= 0 || blobs <= 0) {
    throw std::invalid_argument("gaussian_blobs: sizes must be positive");
  }
  Matrix centers(blobs, d);
  for (Index b = 0; b < blobs; ++b) {
    for (Index k = 0; k < d; ++k) centers(b, k) = 4.0 * rng.normal();
  }
  Matrix points(n, d);
  for (Index i = 0; i < n; ++i) {
    const auto b = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(blobs)));
    for (Index k = 0; k < d; ++k) points(i, k) = centers(b, k) + rng.normal();
  }
  return points;
}

OrthonormalBasis random_orthonormal(Index n, Index m, Rng& rng) {
  Matrix g(n, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) g(i, j) = rng.normal();
  }
  return orthonormalize(g);
}

std::vector<Index> sample_distinct_indices(Index n, Index k, Rng& rng) {
  if (k < 0 || k > n) {
    throw std::invalid_argument("sample_distinct_indices: need 0 <= k <= n");
  }
  // Floyd's algorithm: k draws, no replacement, O(k) memory.
  std::unordered_set<Index> chosen;
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(k));
  for (Index i = n - k; i < n; ++i) {
    const auto draw = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(i + 1)));
    if (chosen.insert(draw).second) {
      out.push_back(draw);
    } else {
      chosen.insert(i);
      out.push_back(i);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dpp
