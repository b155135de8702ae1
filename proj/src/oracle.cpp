#include "dpp/oracle.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dpp/errors.hpp"

namespace dpp {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kSpectrumSlack = 1e-8;
constexpr double kLawSumTol = 1e-8;

// Emits every subset of {0..n-1} in lexicographic order (as sorted
// sequences): {}, {0}, {0,1}, {0,1,2}, ..., {0,2}, ..., {1}, ...
template <class Visit>
void visit_all_subsets(Index n, std::vector<Index>& prefix, Index next, Visit&& visit) {
  visit(prefix);
  for (Index i = next; i < n; ++i) {
    prefix.push_back(i);
    visit_all_subsets(n, prefix, i + 1, visit);
    prefix.pop_back();
  }
}

template <class Visit>
void visit_m_subsets(Index n, Index m, std::vector<Index>& prefix, Index next,
                     Visit&& visit) {
  if (static_cast<Index>(prefix.size()) == m) {
    visit(prefix);
    return;
  }
  const Index needed = m - static_cast<Index>(prefix.size());
  for (Index i = next; i + needed <= n; ++i) {
    prefix.push_back(i);
    visit_m_subsets(n, m, prefix, i + 1, visit);
    prefix.pop_back();
  }
}

double binomial(Index n, Index k) {
  double v = 1.0;
  for (Index i = 0; i < k; ++i) {
    v *= static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return v;
}

void check_law_sum(const SubsetLaw& law, const char* who) {
  const double total = std::accumulate(law.probs.begin(), law.probs.end(), 0.0);
  if (std::abs(total - 1.0) > kLawSumTol) {
    throw DppError(std::string(who) + ": probabilities sum to " +
                   std::to_string(total) + ", not 1");
  }
}

// Regularized incomplete gamma, series branch (x < a + 1).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma, continued-fraction branch
// (x >= a + 1), modified Lentz.
double gamma_q_cf(double a, double x) {
  constexpr double kFpMin = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kFpMin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double regularized_gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) {
    throw std::invalid_argument("regularized_gamma_q: need x >= 0, a > 0");
  }
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

// Deterministic pooling: categories ordered by ascending probability are
// grouped until each pool's expected count reaches the threshold; a
// trailing short pool is folded into the last complete one.
struct MergedBins {
  std::vector<double> observed;
  std::vector<double> expected;
};

MergedBins merge_categories(std::span<const double> observed,
                            std::span<const double> expected_probs, double total,
                            double min_expected) {
  const std::size_t k = observed.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return expected_probs[a] < expected_probs[b];
  });

  MergedBins bins;
  double obs_acc = 0.0, exp_acc = 0.0;
  for (const std::size_t idx : order) {
    obs_acc += observed[idx];
    exp_acc += expected_probs[idx] * total;
    if (exp_acc >= min_expected) {
      bins.observed.push_back(obs_acc);
      bins.expected.push_back(exp_acc);
      obs_acc = 0.0;
      exp_acc = 0.0;
    }
  }
  if (exp_acc > 0.0 || obs_acc > 0.0) {
    if (bins.observed.empty()) {
      throw InsufficientSamplesError(
          "chi_square: pooled expected count cannot reach the threshold");
    }
    bins.observed.back() += obs_acc;
    bins.expected.back() += exp_acc;
  }
  return bins;
}

GofResult pearson_from_bins(const MergedBins& bins) {
  GofResult out;
  out.degrees_of_freedom = static_cast<Index>(bins.observed.size()) - 1;
  for (std::size_t i = 0; i < bins.observed.size(); ++i) {
    const double diff = bins.observed[i] - bins.expected[i];
    out.statistic += diff * diff / bins.expected[i];
  }
  out.p_value = chi_square_survival(out.statistic,
                                    static_cast<double>(out.degrees_of_freedom));
  return out;
}

}  // namespace

ExplicitKernel::ExplicitKernel(Matrix k) : k_(std::move(k)) {
  if (k_.rows() != k_.cols() || k_.rows() == 0) {
    throw std::invalid_argument("ExplicitKernel: matrix must be square");
  }
  const double asym = (k_ - k_.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= kSymmetryTol)) {
    throw NotSymmetricError("ExplicitKernel: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (k_ + k_.transpose()),
                                               Eigen::EigenvaluesOnly);
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (lo < -kSpectrumSlack || hi > 1.0 + kSpectrumSlack) {
    throw DppError("ExplicitKernel: spectrum outside [0, 1]");
  }
}

std::optional<std::size_t> SubsetLaw::find(std::span<const Index> sorted_subset) const {
  const std::vector<Index> key(sorted_subset.begin(), sorted_subset.end());
  const auto it = std::lower_bound(subsets.begin(), subsets.end(), key);
  if (it == subsets.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - subsets.begin());
}

double principal_minor(const Matrix& k, std::span<const Index> subset) {
  const Index s = static_cast<Index>(subset.size());
  if (s == 0) return 1.0;
  Matrix sub(s, s);
  for (Index a = 0; a < s; ++a) {
    for (Index b = 0; b < s; ++b) sub(a, b) = k(subset[a], subset[b]);
  }
  const double det = Eigen::PartialPivLU<Matrix>(sub).determinant();
  return std::max(det, 0.0);
}

SubsetLaw projection_pmf(const OrthonormalBasis& q) {
  const Index n = q.n();
  const Index m = q.m();
  if (n > 20 || binomial(n, m) > 1e6) {
    throw TooLargeError("projection_pmf: enumeration guard exceeded");
  }
  const Matrix kernel = q.matrix() * q.matrix().transpose();

  SubsetLaw law;
  law.ground_size = n;
  std::vector<Index> prefix;
  visit_m_subsets(n, m, prefix, 0, [&](const std::vector<Index>& s) {
    law.subsets.push_back(s);
    law.probs.push_back(principal_minor(kernel, s));
  });
  check_law_sum(law, "projection_pmf");
  return law;
}

SubsetLaw lensemble_pmf(const Matrix& l) {
  const Index n = l.rows();
  if (n != l.cols()) throw std::invalid_argument("lensemble_pmf: matrix must be square");
  if (n > 15) throw TooLargeError("lensemble_pmf: enumeration guard exceeded");

  const Matrix identity = Matrix::Identity(n, n);
  const double normalizer = Eigen::PartialPivLU<Matrix>(identity + l).determinant();

  SubsetLaw law;
  law.ground_size = n;
  std::vector<Index> prefix;
  visit_all_subsets(n, prefix, 0, [&](const std::vector<Index>& s) {
    law.subsets.push_back(s);
    law.probs.push_back(principal_minor(l, s) / normalizer);
  });
  check_law_sum(law, "lensemble_pmf");
  return law;
}

SubsetLaw conditioned_on_size(const SubsetLaw& law, Index m) {
  SubsetLaw out;
  out.ground_size = law.ground_size;
  double total = 0.0;
  for (std::size_t i = 0; i < law.subsets.size(); ++i) {
    if (static_cast<Index>(law.subsets[i].size()) == m) {
      out.subsets.push_back(law.subsets[i]);
      out.probs.push_back(law.probs[i]);
      total += law.probs[i];
    }
  }
  if (total <= 0.0) {
    throw InfeasibleError("conditioned_on_size: no mass on subsets of the given size");
  }
  for (double& p : out.probs) p /= total;
  return out;
}

Vector inclusion_probabilities(const SubsetLaw& law) {
  Vector marginals = Vector::Zero(law.ground_size);
  for (std::size_t i = 0; i < law.subsets.size(); ++i) {
    for (const Index idx : law.subsets[i]) marginals(idx) += law.probs[i];
  }
  return marginals;
}

GofResult chi_square_gof(std::span<const std::uint64_t> counts,
                         std::span<const double> probs, double min_expected) {
  if (counts.size() != probs.size() || counts.empty()) {
    throw std::invalid_argument("chi_square_gof: counts/probs size mismatch");
  }
  double prob_total = 0.0;
  for (const double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("chi_square_gof: invalid probability");
    }
    prob_total += p;
  }
  if (prob_total <= 0.0) {
    throw std::invalid_argument("chi_square_gof: all probabilities are zero");
  }
  const double total =
      static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  if (total <= 0.0) throw InsufficientSamplesError("chi_square_gof: no observations");

  std::vector<double> observed(counts.begin(), counts.end());
  std::vector<double> normalized(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) normalized[i] = probs[i] / prob_total;

  const MergedBins bins = merge_categories(observed, normalized, total, min_expected);
  return pearson_from_bins(bins);
}

GofResult chi_square_two_sample(std::span<const std::uint64_t> counts_a,
                                std::span<const std::uint64_t> counts_b,
                                double min_expected) {
  if (counts_a.size() != counts_b.size() || counts_a.empty()) {
    throw std::invalid_argument("chi_square_two_sample: size mismatch");
  }
  const double na =
      static_cast<double>(std::accumulate(counts_a.begin(), counts_a.end(), std::uint64_t{0}));
  const double nb =
      static_cast<double>(std::accumulate(counts_b.begin(), counts_b.end(), std::uint64_t{0}));
  if (na <= 0.0 || nb <= 0.0) {
    throw InsufficientSamplesError("chi_square_two_sample: empty sample");
  }

  // Pool on combined counts, then compare scaled counts per bin.
  const std::size_t k = counts_a.size();
  std::vector<double> combined_probs(k);
  for (std::size_t i = 0; i < k; ++i) {
    combined_probs[i] = static_cast<double>(counts_a[i] + counts_b[i]) / (na + nb);
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return combined_probs[a] < combined_probs[b];
  });

  // Close a pool once its expected count in the smaller sample clears
  // the threshold.
  std::vector<double> bin_a, bin_b;
  double acc_a = 0.0, acc_b = 0.0, acc_p = 0.0;
  for (const std::size_t idx : order) {
    acc_a += static_cast<double>(counts_a[idx]);
    acc_b += static_cast<double>(counts_b[idx]);
    acc_p += combined_probs[idx];
    if (acc_p * std::min(na, nb) >= min_expected) {
      bin_a.push_back(acc_a);
      bin_b.push_back(acc_b);
      acc_a = acc_b = acc_p = 0.0;
    }
  }
  if (acc_a + acc_b > 0.0 || acc_p > 0.0) {
    if (bin_a.empty()) {
      throw InsufficientSamplesError("chi_square_two_sample: cannot reach threshold");
    }
    bin_a.back() += acc_a;
    bin_b.back() += acc_b;
  }

  const double ratio_ab = std::sqrt(nb / na);
  const double ratio_ba = std::sqrt(na / nb);
  GofResult out;
  out.degrees_of_freedom = static_cast<Index>(bin_a.size()) - 1;
  for (std::size_t i = 0; i < bin_a.size(); ++i) {
    const double denom = bin_a[i] + bin_b[i];
    if (denom <= 0.0) continue;
    const double diff = ratio_ab * bin_a[i] - ratio_ba * bin_b[i];
    out.statistic += diff * diff / denom;
  }
  out.p_value = chi_square_survival(out.statistic,
                                    static_cast<double>(out.degrees_of_freedom));
  return out;
}

double chi_square_survival(double statistic, double df) {
  if (df <= 0.0) return statistic <= 0.0 ? 1.0 : 0.0;
  if (statistic <= 0.0) return 1.0;
  return regularized_gamma_q(df / 2.0, statistic / 2.0);
}

}  // namespace dpp
