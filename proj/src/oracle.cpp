#include "binfam/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <queue>

#include "binfam/errors.hpp"

namespace binfam {

namespace {

void check_dim(std::size_t d) {
  if (d == 0) throw ValidationError("dimension must be positive");
  if (d > ExplicitDistribution::kMaxDim)
    throw ValidationError("explicit tables support at most d = 20");
}

std::uint32_t mask_of(std::size_t d, std::span<const int> index_set) {
  std::uint32_t mask = 0;
  for (int i : index_set) {
    if (i < 0 || static_cast<std::size_t>(i) >= d) throw ValidationError("component index out of range");
    mask |= (std::uint32_t{1} << i);
  }
  return mask;
}

}  // namespace

ExplicitDistribution::ExplicitDistribution(std::size_t d, std::vector<double> probs) {
  check_dim(d);
  if (probs.size() != (std::size_t{1} << d)) throw ValidationError("table size must be 2^d");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("table entries must be finite and nonnegative");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-10) throw ValidationError("table mass must equal 1 within 1e-10");
  d_ = d;
  probs_ = std::move(probs);
}

ExplicitDistribution ExplicitDistribution::from_signed(std::size_t d, std::vector<double> values) {
  check_dim(d);
  if (values.size() != (std::size_t{1} << d)) throw ValidationError("table size must be 2^d");
  double total = 0.0;
  bool negative = false;
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("table entries must be finite");
    total += v;
    if (v < 0.0) negative = true;
  }
  if (!(total > 0.0)) throw NumericalError("table has nonpositive total mass");
  for (double& v : values) v /= total;
  ExplicitDistribution dist;
  dist.d_ = d;
  dist.probs_ = std::move(values);
  dist.valid_ = !negative;
  return dist;
}

double cross_moment(const ExplicitDistribution& dist, std::span<const int> index_set) {
  const std::uint32_t mask = mask_of(dist.dim(), index_set);
  double m = 0.0;
  for (std::uint64_t s = 0; s < dist.states(); ++s)
    if ((s & mask) == mask) m += dist.prob(s);
  return m;
}

double correlation_order(const ExplicitDistribution& dist, std::span<const int> index_set) {
  std::vector<double> mean(index_set.size());
  std::vector<double> sd(index_set.size());
  for (std::size_t t = 0; t < index_set.size(); ++t) {
    const int i = index_set[t];
    mean[t] = cross_moment(dist, {&i, 1});
    const double var = mean[t] * (1.0 - mean[t]);
    if (var <= 0.0) throw ValidationError("correlation_order requires marginals strictly inside (0,1)");
    sd[t] = std::sqrt(var);
  }
  double c = 0.0;
  for (std::uint64_t s = 0; s < dist.states(); ++s) {
    double v = dist.prob(s);
    if (v == 0.0) continue;
    for (std::size_t t = 0; t < index_set.size(); ++t) {
      const double bit = static_cast<double>((s >> index_set[t]) & 1u);
      v *= (bit - mean[t]) / sd[t];
    }
    c += v;
  }
  return c;
}

ExplicitDistribution marginalize(const ExplicitDistribution& dist, std::span<const int> index_set) {
  if (index_set.empty()) throw ValidationError("marginalize requires a nonempty index set");
  mask_of(dist.dim(), index_set);  // range check
  const std::size_t k = index_set.size();
  std::vector<double> out(std::size_t{1} << k, 0.0);
  for (std::uint64_t s = 0; s < dist.states(); ++s) {
    std::uint64_t t = 0;
    for (std::size_t j = 0; j < k; ++j)
      if ((s >> index_set[j]) & 1u) t |= (std::uint64_t{1} << j);
    out[t] += dist.prob(s);
  }
  return ExplicitDistribution::from_signed(k, std::move(out));
}

OracleConditional oracle_conditional(const ExplicitDistribution& dist,
                                     std::span<const std::uint8_t> prefix) {
  const std::size_t d = dist.dim();
  const std::size_t k = prefix.size();
  if (k >= d) throw ValidationError("prefix length must be smaller than the dimension");
  std::uint64_t base = 0;
  for (std::size_t i = 0; i < k; ++i)
    if (prefix[i]) base |= (std::uint64_t{1} << i);
  double with_one = 0.0;
  double with_zero = 0.0;
  const std::uint64_t high_states = std::uint64_t{1} << (d - k - 1);
  for (std::uint64_t h = 0; h < high_states; ++h) {
    const std::uint64_t tail = h << (k + 1);
    with_zero += dist.prob(tail | base);
    with_one += dist.prob(tail | base | (std::uint64_t{1} << k));
  }
  const double denom = with_one + with_zero;
  if (denom <= 0.0) return {0.0, true};
  return {with_one / denom, false};
}

ConditionalProvider conditionals(const ExplicitDistribution& dist) {
  return ConditionalProvider(dist.dim(), [dist](std::span<const std::uint8_t> prefix) {
    return oracle_conditional(dist, prefix).p;
  });
}

BahadurCoefficients bahadur_extract(const ExplicitDistribution& dist) {
  const std::size_t d = dist.dim();
  BahadurCoefficients out;
  out.means.resize(static_cast<Eigen::Index>(d));
  std::vector<double> sd(d);
  for (std::size_t i = 0; i < d; ++i) {
    const int idx = static_cast<int>(i);
    const double m = cross_moment(dist, {&idx, 1});
    const double var = m * (1.0 - m);
    if (var <= 0.0) throw ValidationError("bahadur_extract requires marginals strictly inside (0,1)");
    out.means[static_cast<Eigen::Index>(i)] = m;
    sd[i] = std::sqrt(var);
  }
  const std::uint32_t subsets = std::uint32_t{1} << d;
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    if (std::popcount(mask) < 2) continue;
    double c = 0.0;
    for (std::uint64_t s = 0; s < dist.states(); ++s) {
      double v = dist.prob(s);
      if (v == 0.0) continue;
      for (std::size_t i = 0; i < d; ++i) {
        if (!((mask >> i) & 1u)) continue;
        const double bit = static_cast<double>((s >> i) & 1u);
        v *= (bit - out.means[static_cast<Eigen::Index>(i)]) / sd[i];
      }
      c += v;
    }
    out.corr[mask] = c;
  }
  return out;
}

ExplicitDistribution bahadur_reconstruct(const Eigen::VectorXd& means,
                                         const std::map<std::uint32_t, double>& correlations) {
  const auto d = static_cast<std::size_t>(means.size());
  check_dim(d);
  std::vector<double> sd(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double m = means[static_cast<Eigen::Index>(i)];
    if (!(m > 0.0 && m < 1.0)) throw ValidationError("bahadur_reconstruct requires means strictly inside (0,1)");
    sd[i] = std::sqrt(m * (1.0 - m));
  }
  std::vector<double> table(std::size_t{1} << d);
  for (std::uint64_t s = 0; s < table.size(); ++s) {
    double base = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double m = means[static_cast<Eigen::Index>(i)];
      base *= ((s >> i) & 1u) ? m : 1.0 - m;
    }
    double corr_sum = 1.0;  // empty index set contributes c = 1
    for (const auto& [mask, c] : correlations) {
      if (c == 0.0) continue;
      if (mask >= (std::uint32_t{1} << d)) throw ValidationError("correlation index set out of range");
      double v = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        if (!((mask >> i) & 1u)) continue;
        const double bit = static_cast<double>((s >> i) & 1u);
        v *= (bit - means[static_cast<Eigen::Index>(i)]) / sd[i];
      }
      corr_sum += c * v;
    }
    table[s] = base * corr_sum;
  }
  return ExplicitDistribution::from_signed(d, std::move(table));
}

AliasTable::AliasTable(const ExplicitDistribution& dist) : d_(dist.dim()) {
  if (!dist.valid()) throw ValidationError("alias table requires a nonnegative table");
  const std::size_t n = dist.states();
  threshold_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::queue<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    threshold_[i] = dist.prob(i) * static_cast<double>(n);
    alias_[i] = static_cast<std::uint32_t>(i);
    if (threshold_[i] < 1.0)
      small.push(static_cast<std::uint32_t>(i));
    else
      large.push(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.front();
    const std::uint32_t l = large.front();
    small.pop();
    large.pop();
    alias_[s] = l;
    threshold_[l] -= 1.0 - threshold_[s];
    if (threshold_[l] < 1.0)
      small.push(l);
    else
      large.push(l);
  }
  // Slots left over by rounding keep themselves as alias.
  while (!large.empty()) {
    threshold_[large.front()] = 1.0;
    large.pop();
  }
  while (!small.empty()) {
    threshold_[small.front()] = 1.0;
    small.pop();
  }
}

std::uint64_t AliasTable::sample_state(Rng& rng) const {
  const std::size_t n = threshold_.size();
  auto slot = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
  if (slot >= n) slot = n - 1;
  const double v = rng.uniform();
  return v <= threshold_[slot] ? slot : alias_[slot];
}

BinaryVector AliasTable::sample(Rng& rng) const {
  return BinaryVector::from_index(sample_state(rng), d_);
}

std::vector<double> AliasTable::reconstruct() const {
  const std::size_t n = threshold_.size();
  std::vector<double> probs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    probs[i] += threshold_[i];
    if (alias_[i] != i) probs[alias_[i]] += 1.0 - threshold_[i];
  }
  for (double& p : probs) p /= static_cast<double>(n);
  return probs;
}

ExplicitDistribution enumerate_family(std::size_t d,
                                      const std::function<double(const BinaryVector&)>& unnorm_mass) {
  check_dim(d);
  std::vector<double> table(std::size_t{1} << d);
  for (std::uint64_t s = 0; s < table.size(); ++s)
    table[s] = unnorm_mass(BinaryVector::from_index(s, d));
  return ExplicitDistribution::from_signed(d, std::move(table));
}

ExplicitDistribution enumerate_family_log(
    std::size_t d, const std::function<double(const BinaryVector&)>& log_unnorm_mass) {
  check_dim(d);
  std::vector<double> logs(std::size_t{1} << d);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < logs.size(); ++s) {
    logs[s] = log_unnorm_mass(BinaryVector::from_index(s, d));
    max_log = std::max(max_log, logs[s]);
  }
  if (!std::isfinite(max_log)) throw NumericalError("log masses are all -inf or contain non-finite values");
  std::vector<double> table(logs.size());
  for (std::size_t s = 0; s < logs.size(); ++s) table[s] = std::exp(logs[s] - max_log);
  return ExplicitDistribution::from_signed(d, std::move(table));
}

double total_variation(const ExplicitDistribution& a, const ExplicitDistribution& b) {
  if (a.dim() != b.dim()) throw ValidationError("total_variation requires equal dimensions");
  double tv = 0.0;
  for (std::uint64_t s = 0; s < a.states(); ++s) tv += std::fabs(a.prob(s) - b.prob(s));
  return 0.5 * tv;
}

double kl_divergence(const ExplicitDistribution& a, const ExplicitDistribution& b) {
  if (a.dim() != b.dim()) throw ValidationError("kl_divergence requires equal dimensions");
  double kl = 0.0;
  for (std::uint64_t s = 0; s < a.states(); ++s) {
    const double pa = a.prob(s);
    if (pa <= 0.0) continue;
    const double pb = b.prob(s);
    if (pb <= 0.0) return std::numeric_limits<double>::infinity();
    kl += pa * std::log(pa / pb);
  }
  return kl;
}

}  // namespace binfam
