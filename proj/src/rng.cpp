#include "binfam/rng.hpp"

#include <cmath>

#include "binfam/errors.hpp"
#include "binfam/normal.hpp"

namespace binfam {

double Rng::normal() { return phi1_inv(uniform()); }

long Rng::poisson(double rate) {
  if (rate < 0.0 || !std::isfinite(rate)) throw ValidationError("poisson rate must be finite and nonnegative");
  long count = 0;
  // Knuth's product method, splitting large rates into chunks of at most 30.
  while (rate > 0.0) {
    const double chunk = rate > 30.0 ? 30.0 : rate;
    rate -= chunk;
    const double limit = std::exp(-chunk);
    double p = 1.0;
    long k = -1;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    count += k;
  }
  return count;
}

}  // namespace binfam
