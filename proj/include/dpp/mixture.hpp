#ifndef DPP_MIXTURE_HPP
#define DPP_MIXTURE_HPP

#include <span>
#include <vector>

#include "dpp/linalg.hpp"
#include "dpp/projection.hpp"
#include "dpp/rng.hpp"
#include "dpp/types.hpp"

namespace dpp {

enum class MixtureMode { bernoulli, fixed_size };
enum class KernelSource { marginal_kernel, l_ensemble };

// A general DPP in mixture form: eigenvectors of the kernel plus the
// per-eigenvector mixing weights. Sampling first picks a random subset
// of eigenvectors, then draws from the induced projection DPP.
struct MixtureDpp {
  SpectralDecomposition spectrum;  // of K or of L, per `source`
  Vector weights;                  // mixing weights, in [0, 1]
  KernelSource source = KernelSource::marginal_kernel;
  MixtureMode mode = MixtureMode::bernoulli;
  Index sample_size = 0;           // target size in fixed_size mode

  // Precomputed partial leverage sums over the likely subset
  // {j : weight_j >= 0.5}; per-sample scores are patched from here at a
  // cost proportional to the symmetric difference.
  std::vector<Index> likely_subset;
  Vector pihat;
};

// L-ensemble to marginal-kernel conversion: weights lambda/(1+lambda).
// Throws NotPsdError when an eigenvalue is below -1e-8.
MixtureDpp kernel_from_lensemble(SpectralDecomposition l_spectrum);

// Mixture over an explicit marginal kernel spectrum; eigenvalues must
// lie in [-1e-8, 1+1e-8] and are used directly as weights.
MixtureDpp mixture_from_marginal_kernel(SpectralDecomposition k_spectrum);

// Same process conditioned on drawing exactly m eigenvectors.
MixtureDpp with_fixed_size(MixtureDpp dpp, Index m);

// Spectrum of L = V Vᵀ from the p×p Gram matrix of the feature matrix V;
// avoids forming the n×n kernel. Eigenvector matrix is thin (n×rank).
SpectralDecomposition lensemble_spectrum_from_features(const Matrix& v);

// Independent Bernoulli inclusion of each eigenvector (Hough et al. step 1).
std::vector<Index> sample_eigenvector_subset(const MixtureDpp& dpp, Rng& rng);

// Table of elementary symmetric polynomials e_k(lambda_1..lambda_j) for
// k <= max_order, j <= n. Computed on eigenvalues rescaled by 1/max so
// the recursion stays in range; the scale is folded back on access.
class ElementaryPolynomialTable {
 public:
  ElementaryPolynomialTable(const Vector& lambdas, Index max_order);

  Index max_order() const { return max_order_; }
  Index count() const { return n_; }
  double scale() const { return scale_; }
  const Vector& scaled_lambdas() const { return scaled_; }

  // e_k over the first j inputs, with the rescaling undone.
  double value(Index k, Index j) const;
  // Internal rescaled entry; ratios of these drive the sampler.
  double scaled_value(Index k, Index j) const {
    return table_[static_cast<std::size_t>(k * (n_ + 1) + j)];
  }

 private:
  Index max_order_;
  Index n_;
  double scale_;
  Vector scaled_;
  std::vector<double> table_;
};

ElementaryPolynomialTable elementary_symmetric(const Vector& lambdas, Index max_order);

// Draws an m-subset Y with probability proportional to the product of
// the selected lambdas (backward scan over the polynomial table).
// Throws InfeasibleError with fewer than m positive eigenvalues and
// NumericalInstabilityError when a table denominator underflows.
std::vector<Index> sample_fixed_size_subset(const Vector& lambdas, Index m, Rng& rng);

// Full mixture sampling: pick eigenvectors, form the projection basis,
// delegate to the rejection sampler. Returns the sampled index set in
// ascending order; fills `trace` with the inner run when provided.
std::vector<Index> sample_dpp(const MixtureDpp& dpp, Rng& rng,
                              SampleTrace* trace = nullptr);

// Patches leverage scores computed over the eigenvector subset `yhat`
// into the scores for `y`, touching only columns in the symmetric
// difference. Both subsets must be sorted ascending.
LeverageScores partial_leverage_update(const Matrix& eigenvectors, const Vector& pihat,
                                       std::span<const Index> yhat,
                                       std::span<const Index> y);

}  // namespace dpp

#endif  // DPP_MIXTURE_HPP
