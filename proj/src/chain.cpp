#include "binfam/chain.hpp"

#include <cmath>
#include <vector>

#include "binfam/errors.hpp"

namespace binfam {

ChainDraw chain_rule_sample(const ConditionalProvider& cond, Rng& rng) {
  const std::size_t d = cond.dim();
  BinaryVector y(d);
  double p = 1.0;
  std::vector<std::uint8_t> prefix;
  prefix.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double r = cond({prefix.data(), prefix.size()});
    if (!(r >= 0.0 && r <= 1.0) || std::isnan(r))
      throw ValidationError("conditional probability outside [0,1]");
    const double u = rng.uniform();
    const bool bit = u <= r;
    y.set(i, bit);
    p *= bit ? r : 1.0 - r;
    prefix.push_back(bit ? 1 : 0);
  }
  return {y, p};
}

}  // namespace binfam
