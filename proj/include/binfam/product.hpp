#pragma once

#include <Eigen/Dense>

#include "binfam/chain.hpp"
#include "binfam/moments.hpp"
#include "binfam/types.hpp"

namespace binfam {

// Independent-components family with marginal means m. Boundary means are
// allowed: such components are frozen and sample deterministically.
struct ProductParams {
  Eigen::VectorXd mean;

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
  bool frozen(std::size_t i) const {
    const double m = mean[static_cast<Eigen::Index>(i)];
    return m <= 0.0 || m >= 1.0;
  }
};

ProductParams fit_product(const WeightedSample& sample);

// prod m_i^g_i (1-m_i)^(1-g_i), with 0^0 = 1 for frozen components.
double product_eval(const ProductParams& params, const BinaryVector& g);

// Log-scale evaluation through the logit representation; -inf when a frozen
// component disagrees with g.
double product_log_eval(const ProductParams& params, const BinaryVector& g);

ConditionalProvider product_conditionals(const ProductParams& params);
BinaryVector product_sample(const ProductParams& params, Rng& rng);

}  // namespace binfam
