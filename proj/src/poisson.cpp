#include "binfam/poisson.hpp"

#include <algorithm>
#include <cmath>

#include "binfam/errors.hpp"

namespace binfam {

namespace {

constexpr std::size_t kMassBudget = 20;  // cap on |D_0| in the inclusion-exclusion

std::vector<char> union_marks(const PoiParams& params, std::span<const int> index_set) {
  std::vector<char> mark(params.var_count, 0);
  for (int i : index_set) {
    if (i < 0 || static_cast<std::size_t>(i) >= params.dim())
      throw ValidationError("component index out of range");
    for (int k : params.sets[static_cast<std::size_t>(i)]) mark[static_cast<std::size_t>(k)] = 1;
  }
  return mark;
}

double rate_of_marks(const PoiParams& params, const std::vector<char>& mark) {
  double rate = 0.0;
  for (std::size_t k = 0; k < mark.size(); ++k)
    if (mark[k]) rate += params.lambda[static_cast<Eigen::Index>(k)];
  return rate;
}

// Shared core of the two mass rules; combine picks union or intersection of
// the per-component variable sets inside the exclusion terms.
double poi_mass_impl(const PoiParams& params, const BinaryVector& g, bool use_union) {
  if (g.dim() != params.dim()) throw ValidationError("dimension mismatch");
  std::vector<int> zeros, ones;
  for (std::size_t i = 0; i < g.dim(); ++i) (g[i] ? ones : zeros).push_back(static_cast<int>(i));
  if (zeros.size() > kMassBudget)
    throw ValidationError("mass evaluation budget exceeded (more than 20 zero components)");

  const std::vector<char> forced_zero = union_marks(params, ones);
  const double m_ones = std::exp(-rate_of_marks(params, forced_zero));
  if (zeros.empty()) return m_ones;

  // Per zero component, the variables not already forced to zero.
  std::vector<std::vector<int>> free_vars(zeros.size());
  for (std::size_t t = 0; t < zeros.size(); ++t)
    for (int k : params.sets[static_cast<std::size_t>(zeros[t])])
      if (!forced_zero[static_cast<std::size_t>(k)]) free_vars[t].push_back(k);

  double excl = 0.0;
  const std::uint32_t subsets = std::uint32_t{1} << zeros.size();
  std::vector<int> count(params.var_count);
  for (std::uint32_t mask = 1; mask < subsets; ++mask) {
    std::fill(count.begin(), count.end(), 0);
    int members = 0;
    for (std::size_t t = 0; t < zeros.size(); ++t) {
      if (!((mask >> t) & 1u)) continue;
      ++members;
      for (int k : free_vars[t]) ++count[static_cast<std::size_t>(k)];
    }
    double rate = 0.0;
    for (std::size_t k = 0; k < params.var_count; ++k) {
      const bool in_term = use_union ? count[k] > 0 : count[k] == members;
      if (in_term) rate += params.lambda[static_cast<Eigen::Index>(k)];
    }
    const double sign = (members % 2 == 1) ? 1.0 : -1.0;
    excl += sign * std::exp(-rate);
  }
  return m_ones * (1.0 - excl);
}

}  // namespace

PoiParams make_poisson(std::size_t var_count, std::vector<std::vector<int>> sets,
                       Eigen::VectorXd lambda) {
  if (sets.empty()) throw ValidationError("at least one component is required");
  if (static_cast<std::size_t>(lambda.size()) != var_count)
    throw ValidationError("rate vector must have one entry per variable");
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    if (!(lambda[k] > 0.0) || !std::isfinite(lambda[k]))
      throw ValidationError("rates must be positive and finite");
  for (auto& s : sets) {
    if (s.empty()) throw ValidationError("every component needs a nonempty variable set");
    for (int k : s)
      if (k < 0 || static_cast<std::size_t>(k) >= var_count)
        throw ValidationError("variable index out of range");
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return PoiParams{var_count, std::move(sets), std::move(lambda)};
}

double poi_cross_moment(const PoiParams& params, std::span<const int> index_set) {
  return std::exp(-rate_of_marks(params, union_marks(params, index_set)));
}

double poi_cross_moment_intersection_rule(const PoiParams& params, std::span<const int> index_set) {
  if (index_set.empty()) return 1.0;
  std::vector<int> count(params.var_count, 0);
  int members = 0;
  for (int i : index_set) {
    if (i < 0 || static_cast<std::size_t>(i) >= params.dim())
      throw ValidationError("component index out of range");
    ++members;
    for (int k : params.sets[static_cast<std::size_t>(i)]) ++count[static_cast<std::size_t>(k)];
  }
  double rate = 0.0;
  for (std::size_t k = 0; k < params.var_count; ++k)
    if (count[k] == members) rate += params.lambda[static_cast<Eigen::Index>(k)];
  return std::exp(-rate);
}

double poi_mass(const PoiParams& params, const BinaryVector& g) {
  return poi_mass_impl(params, g, /*use_union=*/true);
}

double poi_mass_intersection_rule(const PoiParams& params, const BinaryVector& g) {
  return poi_mass_impl(params, g, /*use_union=*/false);
}

BinaryVector poi_sample(const PoiParams& params, Rng& rng) {
  std::vector<long> counts(params.var_count);
  for (std::size_t k = 0; k < params.var_count; ++k)
    counts[k] = rng.poisson(params.lambda[static_cast<Eigen::Index>(k)]);
  BinaryVector y(params.dim());
  for (std::size_t i = 0; i < params.dim(); ++i) {
    long total = 0;
    for (int k : params.sets[i]) total += counts[static_cast<std::size_t>(k)];
    y.set(i, total == 0);
  }
  return y;
}

ExplicitDistribution poi_enumerate_patterns(const PoiParams& params) {
  if (params.var_count > 20) throw ValidationError("pattern enumeration supports at most 20 variables");
  if (params.dim() > ExplicitDistribution::kMaxDim)
    throw ValidationError("explicit tables support at most d = 20");
  std::vector<double> zero_prob(params.var_count);
  for (std::size_t k = 0; k < params.var_count; ++k)
    zero_prob[k] = std::exp(-params.lambda[static_cast<Eigen::Index>(k)]);

  std::vector<double> table(std::size_t{1} << params.dim(), 0.0);
  const std::uint64_t patterns = std::uint64_t{1} << params.var_count;
  for (std::uint64_t z = 0; z < patterns; ++z) {
    // Bit k of z set means variable k is positive.
    double p = 1.0;
    for (std::size_t k = 0; k < params.var_count; ++k)
      p *= ((z >> k) & 1u) ? 1.0 - zero_prob[k] : zero_prob[k];
    std::uint64_t state = 0;
    for (std::size_t i = 0; i < params.dim(); ++i) {
      bool all_zero = true;
      for (int k : params.sets[i])
        if ((z >> k) & 1u) {
          all_zero = false;
          break;
        }
      if (all_zero) state |= (std::uint64_t{1} << i);
    }
    table[state] += p;
  }
  return ExplicitDistribution::from_signed(params.dim(), std::move(table));
}

PoiFit fit_poi_greedy(const MomentSummary& moments) {
  const auto d = static_cast<std::size_t>(moments.dim());
  PoiFit fit;

  std::vector<double> mean(d);
  for (std::size_t i = 0; i < d; ++i) {
    double m = moments.mean[static_cast<Eigen::Index>(i)];
    if (m < 1e-12 || m > 1.0 - 1e-12) {
      m = std::clamp(m, 1e-12, 1.0 - 1e-12);
      fit.report.clamped_means.push_back(static_cast<int>(i));
    }
    mean[i] = m;
  }

  std::vector<double> remaining(d);  // private-rate budget -log(m_i) left for component i
  for (std::size_t i = 0; i < d; ++i) remaining[i] = -std::log(mean[i]);

  struct Candidate {
    int i, j;
    double abs_r;
    double r;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double r = moments.corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (r == 0.0) continue;
      candidates.push_back({static_cast<int>(i), static_cast<int>(j), std::fabs(r), r});
    }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.abs_r != b.abs_r) return a.abs_r > b.abs_r;
    return std::pair(a.i, a.j) < std::pair(b.i, b.j);
  });

  std::vector<std::vector<int>> sets(d);
  std::vector<double> rates;
  for (const Candidate& c : candidates) {
    if (c.r < 0.0) {
      fit.report.dropped_negative.emplace_back(c.i, c.j);
      continue;
    }
    const double m_ij = moments.second(c.i, c.j);
    if (!(m_ij > 0.0)) {
      fit.report.dropped_negative.emplace_back(c.i, c.j);
      continue;
    }
    // Shared rate reproducing the pair moment: m_ij = m_i m_j exp(rate).
    const double rate = std::log(m_ij) - std::log(mean[static_cast<std::size_t>(c.i)]) -
                        std::log(mean[static_cast<std::size_t>(c.j)]);
    if (rate <= 1e-15) continue;  // indistinguishable from independence
    if (rate > remaining[static_cast<std::size_t>(c.i)] + 1e-15 ||
        rate > remaining[static_cast<std::size_t>(c.j)] + 1e-15) {
      fit.report.skipped_by_cap.emplace_back(c.i, c.j);
      continue;
    }
    const int var = static_cast<int>(rates.size());
    rates.push_back(rate);
    sets[static_cast<std::size_t>(c.i)].push_back(var);
    sets[static_cast<std::size_t>(c.j)].push_back(var);
    remaining[static_cast<std::size_t>(c.i)] =
        std::max(remaining[static_cast<std::size_t>(c.i)] - rate, 0.0);
    remaining[static_cast<std::size_t>(c.j)] =
        std::max(remaining[static_cast<std::size_t>(c.j)] - rate, 0.0);
  }

  for (std::size_t i = 0; i < d; ++i) {
    if (remaining[i] > 1e-15 || sets[i].empty()) {
      const int var = static_cast<int>(rates.size());
      rates.push_back(std::max(remaining[i], 1e-15));
      sets[i].push_back(var);
    }
  }

  Eigen::VectorXd lambda(static_cast<Eigen::Index>(rates.size()));
  for (std::size_t k = 0; k < rates.size(); ++k) lambda[static_cast<Eigen::Index>(k)] = rates[k];
  fit.params = make_poisson(rates.size(), std::move(sets), std::move(lambda));
  return fit;
}

}  // namespace binfam
