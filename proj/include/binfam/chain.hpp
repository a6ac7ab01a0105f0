#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>

#include "binfam/rng.hpp"
#include "binfam/types.hpp"

namespace binfam {

// A queryable chain rule: given the already-generated prefix gamma_{0:k-1},
// returns P(gamma_k = 1 | prefix). Values must lie in [0,1].
class ConditionalProvider {
 public:
  using Rule = std::function<double(std::span<const std::uint8_t>)>;

  ConditionalProvider(std::size_t dim, Rule rule) : dim_(dim), rule_(std::move(rule)) {}

  std::size_t dim() const { return dim_; }
  double operator()(std::span<const std::uint8_t> prefix) const { return rule_(prefix); }

 private:
  std::size_t dim_;
  Rule rule_;
};

struct ChainDraw {
  BinaryVector value;
  double prob;  // exact probability of value under the chain
};

// Component-wise sampling through the chain rule; the probability of the
// generated vector is accumulated as a by-product.
ChainDraw chain_rule_sample(const ConditionalProvider& cond, Rng& rng);

}  // namespace binfam
