#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "binfam/family.hpp"
#include "binfam/fit_config.hpp"
#include "binfam/sample_io.hpp"

namespace binfam {

struct FitOptions {
  std::string family;
  FitConfig config;
  std::vector<int> permutation;  // 0-based column order applied before fitting; empty = identity
};

struct FitOutcome {
  FamilyParams params;
  nlohmann::json report;
};

FitOutcome run_fit(const SampleData& data, const FitOptions& opts);

// Deterministic synthetic parameters for the identity checks.
FamilyParams random_params(const std::string& family, std::size_t d, std::uint64_t seed);

// Runs the enumeration-backed identity suite appropriate for the family of
// params (d <= 12). Returns machine-readable pass/fail with max deviations.
nlohmann::json run_check(const FamilyParams& params, std::uint64_t seed);

// Divergence report between two parameter sets, or between parameters and a
// sample. Exact tables where the family permits, seeded empirical tables
// otherwise (with the Monte Carlo resolution reported).
nlohmann::json run_compare(const FamilyParams& a, const FamilyParams& b, std::uint64_t seed,
                           std::size_t draws);
nlohmann::json run_compare_sample(const FamilyParams& a, const WeightedSample& sample,
                                  std::uint64_t seed, std::size_t draws);

}  // namespace binfam
