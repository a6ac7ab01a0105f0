#include "binfam/product.hpp"

#include <cmath>
#include <limits>

#include "binfam/errors.hpp"

namespace binfam {

namespace {
void check(const ProductParams& params, const BinaryVector& g) {
  if (g.dim() != params.dim()) throw ValidationError("dimension mismatch");
}
}  // namespace

ProductParams fit_product(const WeightedSample& sample) {
  return ProductParams{compute_moments(sample).mean};
}

double product_eval(const ProductParams& params, const BinaryVector& g) {
  check(params, g);
  double p = 1.0;
  for (std::size_t i = 0; i < params.dim(); ++i) {
    const double m = params.mean[static_cast<Eigen::Index>(i)];
    p *= g[i] ? m : 1.0 - m;
  }
  return p;
}

double product_log_eval(const ProductParams& params, const BinaryVector& g) {
  check(params, g);
  double lp = 0.0;
  for (std::size_t i = 0; i < params.dim(); ++i) {
    const double m = params.mean[static_cast<Eigen::Index>(i)];
    if (params.frozen(i)) {
      const bool want = m >= 1.0;
      if (static_cast<bool>(g[i]) != want) return -std::numeric_limits<double>::infinity();
      continue;
    }
    lp += std::log1p(-m) + (g[i] ? logit(m) : 0.0);
  }
  return lp;
}

ConditionalProvider product_conditionals(const ProductParams& params) {
  const Eigen::VectorXd mean = params.mean;
  return ConditionalProvider(params.dim(), [mean](std::span<const std::uint8_t> prefix) {
    return mean[static_cast<Eigen::Index>(prefix.size())];
  });
}

BinaryVector product_sample(const ProductParams& params, Rng& rng) {
  BinaryVector y(params.dim());
  for (std::size_t i = 0; i < params.dim(); ++i)
    y.set(i, rng.uniform() <= params.mean[static_cast<Eigen::Index>(i)]);
  return y;
}

}  // namespace binfam
