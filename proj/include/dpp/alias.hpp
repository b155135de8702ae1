#ifndef DPP_ALIAS_HPP
#define DPP_ALIAS_HPP

#include <cstdint>
#include <vector>

#include "dpp/rng.hpp"
#include "dpp/types.hpp"

namespace dpp {

// Walker's alias method: O(n) setup, O(1) per draw. Built with Vose's
// two-worklist construction. Immutable after construction; concurrent
// draws are safe as long as each caller holds its own Rng.
class AliasTable {
 public:
  // Throws InvalidWeightsError on negative/non-finite weights or when
  // every weight is zero. Zero weights are allowed and are never drawn.
  explicit AliasTable(const std::vector<double>& weights);
  explicit AliasTable(const Vector& weights);

  std::size_t size() const { return prob_.size(); }

  // One uniform index draw plus one uniform real draw.
  Index draw(Rng& rng) const {
    const auto i = static_cast<std::size_t>(rng.uniform_index(prob_.size()));
    return rng.uniform() < prob_[i] ? static_cast<Index>(i) : alias_[i];
  }

  // Probability the table assigns to item i:
  // (prob[i] + sum over j with alias[j] = i of (1 - prob[j])) / n.
  double reconstructed_probability(std::size_t i) const;

  const std::vector<double>& prob() const { return prob_; }
  const std::vector<Index>& alias() const { return alias_; }

 private:
  void build(const std::vector<double>& weights);

  std::vector<double> prob_;
  std::vector<Index> alias_;
};

}  // namespace dpp

#endif  // DPP_ALIAS_HPP
