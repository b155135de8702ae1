#ifndef DPP_LINALG_HPP
#define DPP_LINALG_HPP

#include "dpp/rng.hpp"
#include "dpp/types.hpp"

namespace dpp {

// Module tolerances; every operation takes these with the defaults below.
struct LinalgOptions {
  double orthonormality_tol = 1e-10;      // ||QᵀQ - I||max bound
  double rank_ratio_tol = 1e-10;          // smallest/largest R diagonal
  double symmetry_tol = 1e-8;             // ||M - Mᵀ||max bound
  double degenerate_residual_tol = 1e-12; // ||z||²/||q||² floor
  double reorthogonalize_threshold = 0.5; // second pass when ||z|| < 0.5||q||
  Index oversampling = 8;                 // range-finder sketch surplus
};

// n×m matrix Q with QᵀQ = I; defines the projection kernel K = QQᵀ.
class OrthonormalBasis {
 public:
  struct Unchecked {};

  // Validates the orthonormality invariant; throws DppError on failure.
  explicit OrthonormalBasis(Matrix q, double tol = LinalgOptions{}.orthonormality_tol);
  // Trusted construction for columns taken from an already-orthonormal matrix.
  OrthonormalBasis(Unchecked, Matrix q) : q_(std::move(q)) {}

  Index n() const { return q_.rows(); }
  Index m() const { return q_.cols(); }
  const Matrix& matrix() const { return q_; }

  double orthonormality_error() const;

 private:
  Matrix q_;
};

// Eigenvalues (descending) and matching orthonormal eigenvector columns.
struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;
};

// Incrementally grown orthonormal basis s_1..s_t in R^m, t <= m. Implicitly
// represents the projector SSᵀ, which is never materialized.
class GramSchmidtBasis {
 public:
  explicit GramSchmidtBasis(Index dim, LinalgOptions opts = {});

  Index dim() const { return dim_; }
  Index size() const { return count_; }

  // Orthogonalizes q against the current columns, normalizes, and appends.
  // Throws DegenerateResidualError when the residual is numerically zero
  // and std::invalid_argument when the basis is already full.
  void append(Eigen::Ref<const Vector> q);

  // ||Sᵀq||², the squared norm of q's projection onto span(S).
  double projected_sq_norm(Eigen::Ref<const Vector> q) const;
  // Same, restricted to columns [from_col, size()); supports cached updates.
  double projected_sq_norm_tail(Eigen::Ref<const Vector> q, Index from_col) const;

  // m×t view of the columns appended so far.
  auto columns() const { return storage_.leftCols(count_); }

 private:
  Index dim_;
  Index count_ = 0;
  Matrix storage_;  // m×m, first count_ columns in use
  LinalgOptions opts_;
};

// QR-based orthonormalization of a full-column-rank matrix.
// Throws RankDeficientError when the R diagonal ratio test fails.
OrthonormalBasis orthonormalize(const Matrix& v, const LinalgOptions& opts = {});

// Symmetric eigendecomposition with descending eigenvalues.
// Throws NotSymmetricError when ||M - Mᵀ||max exceeds the tolerance.
SpectralDecomposition eigendecompose_sym(const Matrix& m, const LinalgOptions& opts = {});

// Gaussian-sketch range finder: orthonormal Q whose span approximates the
// dominant rank-m column space of A. Sketch width m + oversampling, then
// truncation to m via pivoted QR of QᵀA.
OrthonormalBasis randomized_range_finder(const Matrix& a, Index m, Rng& rng,
                                         const LinalgOptions& opts = {});

}  // namespace dpp

#endif  // DPP_LINALG_HPP
