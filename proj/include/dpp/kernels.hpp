#ifndef DPP_KERNELS_HPP
#define DPP_KERNELS_HPP

#include <span>
#include <vector>

#include "dpp/linalg.hpp"
#include "dpp/rng.hpp"
#include "dpp/types.hpp"

namespace dpp {

// Columns of the Gaussian L-ensemble kernel:
// entry (i, j) = gamma * exp(-||x_i - x_{c_j}||^2 / sigma^2).
Matrix gaussian_kernel_columns(const Matrix& points, std::span<const Index> column_indices,
                               double sigma, double gamma);

// n points in R^d drawn from `blobs` unit-variance Gaussian clusters
// with seeded random centers.
Matrix gaussian_blobs(Index n, Index d, Index blobs, Rng& rng);

// Random projection basis: QR of a matrix with i.i.d. Gaussian entries.
OrthonormalBasis random_orthonormal(Index n, Index m, Rng& rng);

// k distinct indices drawn uniformly from {0..n-1}, ascending.
std::vector<Index> sample_distinct_indices(Index n, Index k, Rng& rng);

}  // namespace dpp

#endif  // DPP_KERNELS_HPP
