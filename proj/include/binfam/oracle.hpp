#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "binfam/chain.hpp"
#include "binfam/rng.hpp"
#include "binfam/types.hpp"

namespace binfam {

// Dense probability table over all 2^d states, the ground truth for small
// dimensions. State s holds the vector with component k equal to bit k of s
// (little-endian in the component index).
class ExplicitDistribution {
 public:
  static constexpr std::size_t kMaxDim = 20;

  // Strict constructor: entries nonnegative, total mass 1 within 1e-10.
  ExplicitDistribution(std::size_t d, std::vector<double> probs);

  // Accepts possibly signed, possibly unnormalized values; rescales by the
  // total and keeps a validity flag recording whether any mass is negative.
  static ExplicitDistribution from_signed(std::size_t d, std::vector<double> values);

  std::size_t dim() const { return d_; }
  std::size_t states() const { return probs_.size(); }
  double prob(std::uint64_t state) const { return probs_[state]; }
  double prob(const BinaryVector& g) const { return probs_[g.to_index()]; }
  const std::vector<double>& table() const { return probs_; }
  bool valid() const { return valid_; }

 private:
  ExplicitDistribution() = default;
  std::size_t d_ = 0;
  std::vector<double> probs_;
  bool valid_ = true;
};

// m_I = E[prod_{i in I} gamma_i]; m_{} = 1. Indices are 0-based.
double cross_moment(const ExplicitDistribution& dist, std::span<const int> index_set);

// c_I = E[prod_{i in I} (gamma_i - m_i)/sqrt(m_i(1-m_i))]. Requires all
// marginals of I strictly inside (0,1).
double correlation_order(const ExplicitDistribution& dist, std::span<const int> index_set);

// Marginal table over the components of index_set, in the given order.
ExplicitDistribution marginalize(const ExplicitDistribution& dist, std::span<const int> index_set);

struct OracleConditional {
  double p;
  bool zero_prefix;  // conditioning event had zero probability; p is 0 by convention
};
OracleConditional oracle_conditional(const ExplicitDistribution& dist,
                                     std::span<const std::uint8_t> prefix);

// Chain-rule provider backed by prefix marginals of the table.
ConditionalProvider conditionals(const ExplicitDistribution& dist);

// Means plus all correlations of order >= 2, keyed by the index-set bitmask.
struct BahadurCoefficients {
  Eigen::VectorXd means;
  std::map<std::uint32_t, double> corr;
};
BahadurCoefficients bahadur_extract(const ExplicitDistribution& dist);

// Rebuilds the table as product(means) times the correlation expansion.
// Missing coefficients are treated as zero; a truncated expansion may give
// signed values, reported through the validity flag.
ExplicitDistribution bahadur_reconstruct(const Eigen::VectorXd& means,
                                         const std::map<std::uint32_t, double>& correlations);

// Walker alias structure for O(1) exact draws from a table.
class AliasTable {
 public:
  explicit AliasTable(const ExplicitDistribution& dist);

  BinaryVector sample(Rng& rng) const;
  std::uint64_t sample_state(Rng& rng) const;
  std::vector<double> reconstruct() const;  // probabilities implied by the structure
  std::size_t dim() const { return d_; }

 private:
  std::size_t d_;
  std::vector<double> threshold_;
  std::vector<std::uint32_t> alias_;
};

// Tabulates a pointwise-evaluable family over all 2^d states and normalizes.
// Negative values are permitted and reported through the validity flag.
ExplicitDistribution enumerate_family(std::size_t d,
                                      const std::function<double(const BinaryVector&)>& unnorm_mass);

// Same on the log scale, with log-sum-exp normalization.
ExplicitDistribution enumerate_family_log(
    std::size_t d, const std::function<double(const BinaryVector&)>& log_unnorm_mass);

double total_variation(const ExplicitDistribution& a, const ExplicitDistribution& b);

// KL(a || b); infinite when a puts mass where b has none.
double kl_divergence(const ExplicitDistribution& a, const ExplicitDistribution& b);

}  // namespace binfam
