#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "binfam/moments.hpp"
#include "binfam/oracle.hpp"
#include "binfam/rng.hpp"
#include "binfam/types.hpp"

namespace binfam {

// Component i is the indicator that all auxiliary Poisson counts indexed by
// S_i are zero. Shared variables induce positive correlation.
struct PoiParams {
  std::size_t var_count = 0;           // number of auxiliary Poisson variables
  std::vector<std::vector<int>> sets;  // S_i, nonempty, 0-based variable ids
  Eigen::VectorXd lambda;              // positive rates, one per variable

  std::size_t dim() const { return sets.size(); }
};

PoiParams make_poisson(std::size_t var_count, std::vector<std::vector<int>> sets,
                       Eigen::VectorXd lambda);

// m_I = exp(-sum of rates over the union of the S_i, i in I); m_{} = 1.
double poi_cross_moment(const PoiParams& params, std::span<const int> index_set);

// Same expression with the intersection of the S_i instead of the union.
// That reading is inconsistent with the generating process (a disjoint pair
// would get m_{ij} = 1); it is kept only so the check command can contrast
// the two against enumeration.
double poi_cross_moment_intersection_rule(const PoiParams& params, std::span<const int> index_set);

// Exact mass by inclusion-exclusion over subsets of the zero set of g.
// Requires |{i : g_i = 0}| <= 20.
double poi_mass(const PoiParams& params, const BinaryVector& g);

// Intersection-rule variant of the mass, kept for the contrast check.
double poi_mass_intersection_rule(const PoiParams& params, const BinaryVector& g);

BinaryVector poi_sample(const PoiParams& params, Rng& rng);

// Ground-truth table by enumerating zero/positive patterns of the auxiliary
// variables (2^n terms; var_count <= 20).
ExplicitDistribution poi_enumerate_patterns(const PoiParams& params);

struct PoiFitReport {
  std::vector<std::pair<int, int>> dropped_negative;  // pairs with r < 0
  std::vector<std::pair<int, int>> skipped_by_cap;    // shared rate would exceed a budget
  std::vector<int> clamped_means;
};

struct PoiFit {
  PoiParams params;
  PoiFitReport report;
};

// Greedy constructor: one private variable per component plus one shared
// variable per retained positively correlated pair, visited in decreasing
// |r| order. Marginal means are reproduced exactly; each retained pair
// moment is reproduced exactly.
PoiFit fit_poi_greedy(const MomentSummary& moments);

}  // namespace binfam
