#include "dpp/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/Eigenvalues>
#include <stdexcept>
#include <string>

#include "dpp/errors.hpp"

namespace dpp {

namespace {

double orthonormality_error_of(const Matrix& q) {
  Matrix gram = q.transpose() * q;
  gram.diagonal().array() -= 1.0;
  return gram.cwiseAbs().maxCoeff();
}

}  // namespace

OrthonormalBasis::OrthonormalBasis(Matrix q, double tol) : q_(std::move(q)) {
  if (q_.size() == 0) {
    throw std::invalid_argument("OrthonormalBasis: empty matrix");
  }
  if (q_.cols() > q_.rows()) {
    throw std::invalid_argument("OrthonormalBasis: more columns than rows");
  }
  const double err = orthonormality_error_of(q_);
  if (!(err <= tol)) {
    throw DppError("OrthonormalBasis: ||QtQ - I||max = " + std::to_string(err) +
                   " exceeds tolerance");
  }
}

double OrthonormalBasis::orthonormality_error() const {
  return orthonormality_error_of(q_);
}

GramSchmidtBasis::GramSchmidtBasis(Index dim, LinalgOptions opts)
    : dim_(dim), storage_(dim, dim), opts_(opts) {
  if (dim <= 0) throw std::invalid_argument("GramSchmidtBasis: dim must be positive");
}

void GramSchmidtBasis::append(Eigen::Ref<const Vector> q) {
  if (q.size() != dim_) {
    throw std::invalid_argument("GramSchmidtBasis::append: dimension mismatch");
  }
  if (count_ >= dim_) {
    throw std::invalid_argument("GramSchmidtBasis::append: basis already full");
  }
  const double q_norm = q.norm();
  Vector z = q;
  if (count_ > 0) {
    const auto s = storage_.leftCols(count_);
    z.noalias() -= s * (s.transpose() * q);
    // One re-orthogonalization pass when cancellation was heavy
    // ("twice is enough").
    if (z.norm() < opts_.reorthogonalize_threshold * q_norm) {
      z.noalias() -= s * (s.transpose() * z);
    }
  }
  const double z_sq = z.squaredNorm();
  if (z_sq <= opts_.degenerate_residual_tol * q_norm * q_norm) {
    throw DegenerateResidualError(
        "gram_schmidt_append: residual norm " + std::to_string(std::sqrt(z_sq)) +
        " is numerically zero relative to the input row");
  }
  storage_.col(count_) = z / std::sqrt(z_sq);
  ++count_;
}

double GramSchmidtBasis::projected_sq_norm(Eigen::Ref<const Vector> q) const {
  return projected_sq_norm_tail(q, 0);
}

double GramSchmidtBasis::projected_sq_norm_tail(Eigen::Ref<const Vector> q,
                                                Index from_col) const {
  if (from_col >= count_) return 0.0;
  const auto s = storage_.middleCols(from_col, count_ - from_col);
  return (s.transpose() * q).squaredNorm();
}

OrthonormalBasis orthonormalize(const Matrix& v, const LinalgOptions& opts) {
  const Index n = v.rows();
  const Index p = v.cols();
  if (p == 0 || n < p) {
    throw std::invalid_argument("orthonormalize: need n >= p >= 1");
  }
  Eigen::HouseholderQR<Matrix> qr(v);
  const Vector r_diag = qr.matrixQR().diagonal().head(p).cwiseAbs();
  const double r_max = r_diag.maxCoeff();
  const double r_min = r_diag.minCoeff();
  if (!(r_min >= opts.rank_ratio_tol * r_max) || r_max == 0.0) {
    throw RankDeficientError("orthonormalize: R diagonal ratio " +
                             std::to_string(r_max == 0.0 ? 0.0 : r_min / r_max) +
                             " below rank tolerance");
  }
  Matrix q = qr.householderQ() * Matrix::Identity(n, p);
  return OrthonormalBasis(std::move(q), opts.orthonormality_tol);
}

SpectralDecomposition eigendecompose_sym(const Matrix& m, const LinalgOptions& opts) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("eigendecompose_sym: matrix must be square");
  }
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= opts.symmetry_tol)) {
    throw NotSymmetricError("eigendecompose_sym: ||M - Mt||max = " +
                            std::to_string(asym) + " exceeds tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.transpose()));
  if (solver.info() != Eigen::Success) {
    throw DppError("eigendecompose_sym: eigensolver failed to converge");
  }
  // Eigen returns ascending order; flip to descending.
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

OrthonormalBasis randomized_range_finder(const Matrix& a, Index m, Rng& rng,
                                         const LinalgOptions& opts) {
  const Index n = a.rows();
  const Index c = a.cols();
  if (m <= 0) throw std::invalid_argument("randomized_range_finder: m must be positive");
  if (c < m) throw std::invalid_argument("randomized_range_finder: need c >= m");
  if (n < m) throw std::invalid_argument("randomized_range_finder: need n >= m");

  const Index width = std::min({m + opts.oversampling, c, n});
  Matrix sketch(c, width);
  for (Index j = 0; j < width; ++j) {
    for (Index i = 0; i < c; ++i) sketch(i, j) = rng.normal();
  }
  const Matrix image = a * sketch;

  // Orthonormal basis of the sketched image; pivoting tolerates rank
  // between m and the sketch width.
  Eigen::ColPivHouseholderQR<Matrix> qr(image);
  const Vector diag = qr.matrixQR().diagonal().head(std::min(n, width)).cwiseAbs();
  const double d_max = diag.maxCoeff();
  Index rank = 0;
  for (Index i = 0; i < diag.size(); ++i) {
    if (diag(i) >= opts.rank_ratio_tol * d_max && d_max > 0.0) ++rank;
  }
  if (rank < m) {
    throw RankDeficientError("randomized_range_finder: sketched image has rank " +
                             std::to_string(rank) + " < m");
  }
  const Matrix q0 = qr.householderQ() * Matrix::Identity(n, rank);

  // Truncate to the m dominant directions via pivoted QR of Q0ᵀA.
  const Matrix b = q0.transpose() * a;  // rank×c
  Eigen::ColPivHouseholderQR<Matrix> qr_b(b);
  const Matrix w = qr_b.householderQ() * Matrix::Identity(rank, m);
  Matrix q = q0 * w;
  return OrthonormalBasis(std::move(q), opts.orthonormality_tol);
}

}  // namespace dpp
