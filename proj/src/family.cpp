#include "binfam/family.hpp"

#include <cmath>

#include "binfam/errors.hpp"

namespace binfam {

std::string family_name(const FamilyParams& params) {
  struct Visitor {
    std::string operator()(const ProductParams&) const { return "product"; }
    std::string operator()(const LinQuParams&) const { return "linquad"; }
    std::string operator()(const ExpQuParams&) const { return "expquad"; }
    std::string operator()(const LogCoParams&) const { return "logcond"; }
    std::string operator()(const GauCParams&) const { return "gaussian_copula"; }
    std::string operator()(const PoiParams&) const { return "poisson"; }
  };
  return std::visit(Visitor{}, params);
}

std::size_t family_dim(const FamilyParams& params) {
  return std::visit([](const auto& p) { return p.dim(); }, params);
}

bool family_supports_eval(const FamilyParams& params) {
  return !std::holds_alternative<GauCParams>(params);
}

double family_log_eval(const FamilyParams& params, const BinaryVector& g) {
  struct Visitor {
    const BinaryVector& g;
    double operator()(const ProductParams& p) const { return product_log_eval(p, g); }
    double operator()(const LinQuParams& p) const { return std::log(linquad_eval(p, g)); }
    double operator()(const ExpQuParams& p) const { return expquad_log_eval_unnorm(p, g); }
    double operator()(const LogCoParams& p) const { return logcond_log_eval(p, g); }
    double operator()(const GauCParams&) const {
      throw ValidationError(
          "gaussian_copula has no pointwise mass: evaluating it requires a d-dimensional "
          "orthant integral");
    }
    double operator()(const PoiParams& p) const { return std::log(poi_mass(p, g)); }
  };
  return std::visit(Visitor{g}, params);
}

SampleBatch family_sample(const FamilyParams& params, Rng& rng, std::size_t n, bool force_clamp,
                          const std::vector<int>* proxy_order) {
  SampleBatch batch;
  batch.rows.reserve(n);

  if (const auto* p = std::get_if<ProductParams>(&params)) {
    batch.probs.emplace();
    for (std::size_t k = 0; k < n; ++k) {
      BinaryVector y = product_sample(*p, rng);
      batch.probs->push_back(product_eval(*p, y));
      batch.rows.push_back(std::move(y));
    }
  } else if (const auto* p = std::get_if<LinQuParams>(&params)) {
    const ConditionalProvider cond = linquad_conditionals(*p, force_clamp);
    batch.probs.emplace();
    for (std::size_t k = 0; k < n; ++k) {
      ChainDraw draw = chain_rule_sample(cond, rng);
      batch.probs->push_back(draw.prob);
      batch.rows.push_back(std::move(draw.value));
    }
  } else if (const auto* p = std::get_if<ExpQuParams>(&params)) {
    const ProxyChain chain = proxy_order ? build_proxy(*p, *proxy_order) : build_proxy(*p);
    batch.probs.emplace();
    for (std::size_t k = 0; k < n; ++k) {
      ChainDraw draw = proxy_sample(chain, rng);
      batch.probs->push_back(draw.prob);
      batch.rows.push_back(std::move(draw.value));
    }
  } else if (const auto* p = std::get_if<LogCoParams>(&params)) {
    batch.probs.emplace();
    for (std::size_t k = 0; k < n; ++k) {
      ChainDraw draw = logcond_sample(*p, rng);
      batch.probs->push_back(draw.prob);
      batch.rows.push_back(std::move(draw.value));
    }
  } else if (const auto* p = std::get_if<GauCParams>(&params)) {
    batch = gauc_sample(*p, rng, n);
  } else if (const auto* p = std::get_if<PoiParams>(&params)) {
    for (std::size_t k = 0; k < n; ++k) batch.rows.push_back(poi_sample(*p, rng));
  }
  return batch;
}

std::optional<ExplicitDistribution> family_enumerate(const FamilyParams& params) {
  const std::size_t d = family_dim(params);
  if (d > 12) throw ValidationError("exact enumeration supported up to d = 12 here");
  if (const auto* p = std::get_if<ProductParams>(&params))
    return enumerate_family(d, [p](const BinaryVector& g) { return product_eval(*p, g); });
  if (const auto* p = std::get_if<LinQuParams>(&params))
    return enumerate_family(d, [p](const BinaryVector& g) {
      double quad = p->a0();
      for (std::size_t i = 0; i < g.dim(); ++i) {
        if (!g[i]) continue;
        quad += p->A()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        for (std::size_t j = 0; j < i; ++j)
          if (g[j]) quad += 2.0 * p->A()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
      return quad;
    });
  if (const auto* p = std::get_if<ExpQuParams>(&params))
    return enumerate_family_log(d, [p](const BinaryVector& g) { return expquad_log_eval_unnorm(*p, g); });
  if (const auto* p = std::get_if<LogCoParams>(&params))
    return enumerate_family_log(d, [p](const BinaryVector& g) { return logcond_log_eval(*p, g); });
  if (const auto* p = std::get_if<PoiParams>(&params)) {
    if (p->var_count <= 20) return poi_enumerate_patterns(*p);
    return std::nullopt;
  }
  return std::nullopt;
}

ExplicitDistribution family_empirical_table(const FamilyParams& params, Rng& rng,
                                            std::size_t draws) {
  const std::size_t d = family_dim(params);
  if (d > 12) throw ValidationError("empirical tables supported up to d = 12 here");
  std::vector<double> table(std::size_t{1} << d, 0.0);
  const SampleBatch batch = family_sample(params, rng, draws);
  for (const BinaryVector& row : batch.rows) table[row.to_index()] += 1.0;
  return ExplicitDistribution::from_signed(d, std::move(table));
}

}  // namespace binfam
