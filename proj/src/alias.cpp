#include "dpp/alias.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "dpp/errors.hpp"

namespace dpp {

AliasTable::AliasTable(const std::vector<double>& weights) { build(weights); }

AliasTable::AliasTable(const Vector& weights) {
  build(std::vector<double>(weights.data(), weights.data() + weights.size()));
}

void AliasTable::build(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw InvalidWeightsError("build_alias: empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidWeightsError("build_alias: weights must be finite and >= 0");
    }
    total += w;
  }
  if (total <= 0.0) throw InvalidWeightsError("build_alias: all weights are zero");

  prob_.assign(n, 1.0);
  alias_.resize(n);
  for (std::size_t i = 0; i < n; ++i) alias_[i] = static_cast<Index>(i);

  // Vose: scale to mean 1, then pair sub-unit entries with super-unit
  // donors until both worklists drain.
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
  }
  std::vector<std::size_t> small, large;
  small.reserve(n);
  large.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    const std::size_t g = large.back();
    small.pop_back();
    large.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = static_cast<Index>(g);
    scaled[g] = (scaled[g] + scaled[s]) - 1.0;
    (scaled[g] < 1.0 ? small : large).push_back(g);
  }
  // Leftovers carry mass 1 up to rounding; assign exactly 1.
  for (const std::size_t g : large) prob_[g] = 1.0;
  for (const std::size_t s : small) prob_[s] = 1.0;
}

double AliasTable::reconstructed_probability(std::size_t i) const {
  double mass = prob_[i];
  for (std::size_t j = 0; j < prob_.size(); ++j) {
    if (alias_[j] == static_cast<Index>(i)) mass += 1.0 - prob_[j];
  }
  return mass / static_cast<double>(prob_.size());
}

}  // namespace dpp
