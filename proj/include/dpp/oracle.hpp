#ifndef DPP_ORACLE_HPP
#define DPP_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dpp/linalg.hpp"
#include "dpp/types.hpp"

namespace dpp {

// Symmetric marginal kernel with spectrum inside [0, 1].
class ExplicitKernel {
 public:
  explicit ExplicitKernel(Matrix k);
  const Matrix& matrix() const { return k_; }
  Index n() const { return k_.rows(); }

 private:
  Matrix k_;
};

// Exact law over subsets of {0..n-1}, listed in lexicographic order.
struct SubsetLaw {
  Index ground_size = 0;
  std::vector<std::vector<Index>> subsets;
  std::vector<double> probs;

  // Position of a sorted subset, or nullopt when outside the support.
  std::optional<std::size_t> find(std::span<const Index> sorted_subset) const;
};

// det K_S for the principal submatrix indexed by S (pivoted LU, negative
// fp dust clamped to 0).
double principal_minor(const Matrix& k, std::span<const Index> subset);

// Exact law of a projection DPP over all m-subsets: P(X = S) = det K_S.
// Guarded to n <= 20 and C(n, m) <= 1e6; throws TooLargeError beyond.
SubsetLaw projection_pmf(const OrthonormalBasis& q);

// Exact law of an L-ensemble over all 2^n subsets:
// P(X = S) = det(L_S) / det(I + L). Guarded to n <= 15.
SubsetLaw lensemble_pmf(const Matrix& l);

// The law conditioned on |S| = m, renormalized.
SubsetLaw conditioned_on_size(const SubsetLaw& law, Index m);

// Per-index marginals p(i in X) = sum over subsets containing i.
Vector inclusion_probabilities(const SubsetLaw& law);

struct GofResult {
  double statistic = 0.0;
  double p_value = 1.0;
  Index degrees_of_freedom = 0;
};

// Pearson goodness-of-fit against an expected law. Categories whose
// expected count falls below `min_expected` are pooled, smallest
// probability first. Throws InsufficientSamplesError when pooling
// cannot reach the threshold.
GofResult chi_square_gof(std::span<const std::uint64_t> counts,
                         std::span<const double> probs, double min_expected = 5.0);

// Two-sample chi-square homogeneity test over shared categories.
GofResult chi_square_two_sample(std::span<const std::uint64_t> counts_a,
                                std::span<const std::uint64_t> counts_b,
                                double min_expected = 5.0);

// Survival function of the chi-square distribution with `df` degrees of
// freedom (regularized upper incomplete gamma).
double chi_square_survival(double statistic, double df);

}  // namespace dpp

#endif  // DPP_ORACLE_HPP
