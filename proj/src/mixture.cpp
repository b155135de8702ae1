#include "dpp/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpp/errors.hpp"

namespace dpp {

namespace {

constexpr double kPsdSlack = 1e-8;
constexpr double kZeroEigenvalue = 1e-12;  // below this a direction is dead
constexpr double kLikelyThreshold = 0.5;

void finish_mixture(MixtureDpp& dpp) {
  const Matrix& u = dpp.spectrum.eigenvectors;
  dpp.likely_subset.clear();
  for (Index j = 0; j < dpp.weights.size(); ++j) {
    if (dpp.weights(j) >= kLikelyThreshold) dpp.likely_subset.push_back(j);
  }
  dpp.pihat = Vector::Zero(u.rows());
  for (const Index j : dpp.likely_subset) {
    dpp.pihat += u.col(j).cwiseAbs2();
  }
}

}  // namespace

MixtureDpp kernel_from_lensemble(SpectralDecomposition l_spectrum) {
  MixtureDpp dpp;
  dpp.source = KernelSource::l_ensemble;
  dpp.weights = Vector::Zero(l_spectrum.eigenvalues.size());
  for (Index j = 0; j < l_spectrum.eigenvalues.size(); ++j) {
    double lambda = l_spectrum.eigenvalues(j);
    if (lambda < -kPsdSlack) {
      throw NotPsdError("kernel_from_lensemble: eigenvalue " + std::to_string(lambda) +
                        " is negative");
    }
    if (lambda < kZeroEigenvalue) lambda = 0.0;
    l_spectrum.eigenvalues(j) = lambda;  // keep the sanitized spectrum
    dpp.weights(j) = lambda / (1.0 + lambda);
  }
  dpp.spectrum = std::move(l_spectrum);
  finish_mixture(dpp);
  return dpp;
}

MixtureDpp mixture_from_marginal_kernel(SpectralDecomposition k_spectrum) {
  MixtureDpp dpp;
  dpp.source = KernelSource::marginal_kernel;
  dpp.weights = Vector::Zero(k_spectrum.eigenvalues.size());
  for (Index j = 0; j < k_spectrum.eigenvalues.size(); ++j) {
    double lambda = k_spectrum.eigenvalues(j);
    if (lambda < -kPsdSlack || lambda > 1.0 + kPsdSlack) {
      throw DppError("mixture_from_marginal_kernel: eigenvalue " +
                     std::to_string(lambda) + " outside [0, 1]");
    }
    lambda = std::min(1.0, std::max(0.0, lambda));
    if (lambda < kZeroEigenvalue) lambda = 0.0;
    k_spectrum.eigenvalues(j) = lambda;
    dpp.weights(j) = lambda;
  }
  dpp.spectrum = std::move(k_spectrum);
  finish_mixture(dpp);
  return dpp;
}

MixtureDpp with_fixed_size(MixtureDpp dpp, Index m) {
  if (m < 0 || m > dpp.weights.size()) {
    throw std::invalid_argument("with_fixed_size: size out of range");
  }
  dpp.mode = MixtureMode::fixed_size;
  dpp.sample_size = m;
  return dpp;
}

SpectralDecomposition lensemble_spectrum_from_features(const Matrix& v) {
  const Index p = v.cols();
  if (p == 0 || v.rows() == 0) {
    throw std::invalid_argument("lensemble_spectrum_from_features: empty matrix");
  }
  // Nonzero spectrum of VVᵀ equals that of the p×p Gram matrix VᵀV;
  // eigenvectors lift back through V.
  const Matrix gram = v.transpose() * v;
  const SpectralDecomposition small = eigendecompose_sym(gram);

  SpectralDecomposition out;
  out.eigenvalues = small.eigenvalues;
  out.eigenvectors = Matrix(v.rows(), p);
  for (Index j = 0; j < p; ++j) {
    const double lambda = small.eigenvalues(j);
    if (lambda > kZeroEigenvalue) {
      out.eigenvectors.col(j) = v * small.eigenvectors.col(j) / std::sqrt(lambda);
    } else {
      out.eigenvalues(j) = std::max(lambda, 0.0);
      out.eigenvectors.col(j).setZero();
    }
  }
  return out;
}

std::vector<Index> sample_eigenvector_subset(const MixtureDpp& dpp, Rng& rng) {
  std::vector<Index> selected;
  for (Index j = 0; j < dpp.weights.size(); ++j) {
    const double w = dpp.weights(j);
    if (w >= 1.0) {
      selected.push_back(j);
    } else if (w > 0.0 && rng.uniform() < w) {
      selected.push_back(j);
    }
  }
  return selected;
}

ElementaryPolynomialTable::ElementaryPolynomialTable(const Vector& lambdas,
                                                     Index max_order)
    : max_order_(max_order), n_(lambdas.size()) {
  if (max_order < 0 || max_order > n_) {
    throw std::invalid_argument("elementary_symmetric: need 0 <= m <= n");
  }
  const double max_lambda = n_ > 0 ? lambdas.maxCoeff() : 0.0;
  scale_ = max_lambda > 0.0 ? max_lambda : 1.0;
  scaled_ = lambdas / scale_;

  table_.assign(static_cast<std::size_t>((max_order_ + 1) * (n_ + 1)), 0.0);
  auto at = [this](Index k, Index j) -> double& {
    return table_[static_cast<std::size_t>(k * (n_ + 1) + j)];
  };
  for (Index j = 0; j <= n_; ++j) at(0, j) = 1.0;
  for (Index k = 1; k <= max_order_; ++k) {
    for (Index j = 1; j <= n_; ++j) {
      at(k, j) = at(k, j - 1) + scaled_(j - 1) * at(k - 1, j - 1);
    }
  }
}

double ElementaryPolynomialTable::value(Index k, Index j) const {
  return std::pow(scale_, static_cast<double>(k)) * scaled_value(k, j);
}

ElementaryPolynomialTable elementary_symmetric(const Vector& lambdas, Index max_order) {
  return ElementaryPolynomialTable(lambdas, max_order);
}

std::vector<Index> sample_fixed_size_subset(const Vector& lambdas, Index m, Rng& rng) {
  const Index n = lambdas.size();
  if (m < 0 || m > n) {
    throw std::invalid_argument("sample_fixed_size_subset: need 0 <= m <= n");
  }
  Vector cleaned = lambdas;
  Index positives = 0;
  for (Index j = 0; j < n; ++j) {
    if (!(cleaned(j) >= 0.0)) {
      throw std::invalid_argument("sample_fixed_size_subset: negative eigenvalue");
    }
    if (cleaned(j) < kZeroEigenvalue) cleaned(j) = 0.0;
    if (cleaned(j) > 0.0) ++positives;
  }
  if (positives < m) {
    throw InfeasibleError("sample_fixed_size_subset: fewer than m positive eigenvalues");
  }
  if (m == 0) return {};

  const ElementaryPolynomialTable table(cleaned, m);
  std::vector<Index> selected;
  selected.reserve(static_cast<std::size_t>(m));
  Index remaining = m;
  for (Index j = n; j >= 1 && remaining > 0; --j) {
    if (j == remaining) {
      // Exactly as many positions as open slots: all forced in.
      selected.push_back(j - 1);
      --remaining;
      continue;
    }
    const double denom = table.scaled_value(remaining, j);
    if (denom == 0.0) {
      throw NumericalInstabilityError(
          "sample_fixed_size_subset: elementary polynomial underflowed to zero");
    }
    const double p =
        table.scaled_lambdas()(j - 1) * table.scaled_value(remaining - 1, j - 1) / denom;
    if (rng.uniform() < p) {
      selected.push_back(j - 1);
      --remaining;
    }
  }
  std::reverse(selected.begin(), selected.end());
  return selected;
}

std::vector<Index> sample_dpp(const MixtureDpp& dpp, Rng& rng, SampleTrace* trace) {
  std::vector<Index> chosen;
  if (dpp.mode == MixtureMode::bernoulli) {
    chosen = sample_eigenvector_subset(dpp, rng);
  } else if (dpp.source == KernelSource::l_ensemble) {
    chosen = sample_fixed_size_subset(dpp.spectrum.eigenvalues, dpp.sample_size, rng);
  } else {
    // Marginal-kernel spectrum conditioned on |Y| = m: eigenvalue-1
    // directions are always in; the rest enter with odds lambda/(1-lambda).
    std::vector<Index> forced, free_idx;
    for (Index j = 0; j < dpp.weights.size(); ++j) {
      if (dpp.weights(j) >= 1.0 - kZeroEigenvalue) {
        forced.push_back(j);
      } else if (dpp.weights(j) > 0.0) {
        free_idx.push_back(j);
      }
    }
    if (static_cast<Index>(forced.size()) > dpp.sample_size) {
      throw InfeasibleError("sample_dpp: more unit eigenvalues than the target size");
    }
    chosen = forced;
    const Index still_needed = dpp.sample_size - static_cast<Index>(forced.size());
    if (still_needed > 0) {
      Vector odds(static_cast<Index>(free_idx.size()));
      for (std::size_t i = 0; i < free_idx.size(); ++i) {
        const double w = dpp.weights(free_idx[i]);
        odds(static_cast<Index>(i)) = w / (1.0 - w);
      }
      for (const Index pos : sample_fixed_size_subset(odds, still_needed, rng)) {
        chosen.push_back(free_idx[static_cast<std::size_t>(pos)]);
      }
      std::sort(chosen.begin(), chosen.end());
    }
  }

  if (trace != nullptr) {
    *trace = SampleTrace{};
    trace->seed = rng.seed();
  }
  if (chosen.empty()) return {};

  const Matrix& u = dpp.spectrum.eigenvectors;
  Matrix q(u.rows(), static_cast<Index>(chosen.size()));
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    q.col(static_cast<Index>(i)) = u.col(chosen[i]);
  }
  LeverageScores scores = partial_leverage_update(u, dpp.pihat, dpp.likely_subset, chosen);
  PreparedSampler prep(OrthonormalBasis(OrthonormalBasis::Unchecked{}, std::move(q)),
                       std::move(scores));
  SampleTrace inner = sample_rejection(prep, rng);

  std::vector<Index> sample = inner.indices;
  std::sort(sample.begin(), sample.end());
  if (trace != nullptr) *trace = std::move(inner);
  return sample;
}

LeverageScores partial_leverage_update(const Matrix& eigenvectors, const Vector& pihat,
                                       std::span<const Index> yhat,
                                       std::span<const Index> y) {
  if (!std::is_sorted(yhat.begin(), yhat.end()) || !std::is_sorted(y.begin(), y.end())) {
    throw std::invalid_argument("partial_leverage_update: subsets must be sorted");
  }
  LeverageScores out;
  out.values = pihat;

  std::size_t a = 0, b = 0;
  while (a < yhat.size() || b < y.size()) {
    if (b >= y.size() || (a < yhat.size() && yhat[a] < y[b])) {
      out.values -= eigenvectors.col(yhat[a]).cwiseAbs2();
      ++a;
    } else if (a >= yhat.size() || y[b] < yhat[a]) {
      out.values += eigenvectors.col(y[b]).cwiseAbs2();
      ++b;
    } else {
      ++a;
      ++b;
    }
  }
  out.values = out.values.cwiseMax(0.0);  // subtraction dust
  out.total = out.values.sum();
  return out;
}

}  // namespace dpp
