#pragma once

#include <optional>
#include <string>
#include <variant>

#include "binfam/expquad.hpp"
#include "binfam/gausscopula.hpp"
#include "binfam/linquad.hpp"
#include "binfam/logcond.hpp"
#include "binfam/oracle.hpp"
#include "binfam/poisson.hpp"
#include "binfam/product.hpp"
#include "binfam/types.hpp"

namespace binfam {

using FamilyParams =
    std::variant<ProductParams, LinQuParams, ExpQuParams, LogCoParams, GauCParams, PoiParams>;

std::string family_name(const FamilyParams& params);
std::size_t family_dim(const FamilyParams& params);

// Whether the family supports pointwise (log-)mass evaluation. The Gaussian
// copula does not: its mass is a d-dimensional orthant integral.
bool family_supports_eval(const FamilyParams& params);

// Log-mass of a row. product/logcond are exact, linquad exact with the
// negative-mass caveat, expquad unnormalized, poisson exact at desk scale.
double family_log_eval(const FamilyParams& params, const BinaryVector& g);

// n independent rows; per-row probabilities where the family evaluates them
// while sampling (chain-rule families), absent for copula-type families.
// force_clamp applies only to linquad; order only to the expquad proxy.
SampleBatch family_sample(const FamilyParams& params, Rng& rng, std::size_t n,
                          bool force_clamp = false,
                          const std::vector<int>* proxy_order = nullptr);

// Exact table for families that can be enumerated at small d (d <= 12 here);
// expquad is normalized by enumeration, gaussian_copula and poisson are not
// enumerable this way and yield nullopt.
std::optional<ExplicitDistribution> family_enumerate(const FamilyParams& params);

// Empirical table from seeded draws, for families without exact enumeration.
ExplicitDistribution family_empirical_table(const FamilyParams& params, Rng& rng, std::size_t draws);

}  // namespace binfam
