#include "binfam/moments.hpp"

#include <algorithm>
#include <cmath>

namespace binfam {

MomentSummary compute_moments(const WeightedSample& sample) {
  const auto d = static_cast<Eigen::Index>(sample.dim());
  MomentSummary ms;
  ms.mean = Eigen::VectorXd::Zero(d);
  ms.second = Eigen::MatrixXd::Zero(d, d);

  for (std::size_t k = 0; k < sample.size(); ++k) {
    const double w = sample.weight(k);
    const BinaryVector& x = sample.row(k);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (!x[static_cast<std::size_t>(i)]) continue;
      ms.mean[i] += w;
      for (Eigen::Index j = 0; j <= i; ++j)
        if (x[static_cast<std::size_t>(j)]) ms.second(i, j) += w;
    }
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    ms.second(i, i) = ms.mean[i];
    for (Eigen::Index j = 0; j < i; ++j) ms.second(j, i) = ms.second(i, j);
  }

  ms.degenerate.assign(static_cast<std::size_t>(d), false);
  for (Eigen::Index i = 0; i < d; ++i)
    if (ms.mean[i] <= 0.0 || ms.mean[i] >= 1.0) ms.degenerate[static_cast<std::size_t>(i)] = true;

  ms.corr = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    ms.corr(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      if (ms.degenerate[static_cast<std::size_t>(i)] || ms.degenerate[static_cast<std::size_t>(j)]) continue;
      const double denom = std::sqrt(ms.mean[i] * (1.0 - ms.mean[i]) * ms.mean[j] * (1.0 - ms.mean[j]));
      const double r = (ms.second(i, j) - ms.mean[i] * ms.mean[j]) / denom;
      ms.corr(i, j) = ms.corr(j, i) = std::clamp(r, -1.0, 1.0);
    }
  }
  return ms;
}

std::pair<double, double> frechet_bounds(std::span<const double> marginals) {
  if (marginals.empty()) throw ValidationError("frechet_bounds requires a nonempty index set");
  double sum = 0.0;
  double upper = 1.0;
  for (double m : marginals) {
    if (!(m >= 0.0 && m <= 1.0)) throw ValidationError("marginal means must lie in [0,1]");
    sum += m;
    upper = std::min(upper, m);
  }
  const double lower = std::max(sum - static_cast<double>(marginals.size()) + 1.0, 0.0);
  return {lower, upper};
}

double logit(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("logit requires p in (0,1)");
  return std::log(p) - std::log1p(-p);
}

double logit_inverse(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log1p_exp(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace binfam
