#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "binfam/fit_config.hpp"
#include "binfam/moments.hpp"
#include "binfam/normal.hpp"
#include "binfam/rng.hpp"
#include "binfam/types.hpp"

namespace binfam {

// Gaussian threshold family: draw v ~ N(0, Sigma), set y_i = 1 iff
// v_i <= mu_i. Pointwise mass evaluation is deliberately not provided; it
// would require a d-dimensional orthant integral.
struct GauCParams {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;                          // correlation matrix
  std::vector<std::pair<int, int>> association;   // pairs actively fitted
  bool pd_repaired = false;
  double repair_shift = 0.0;
  std::vector<int> clamped_means;

  std::size_t dim() const { return static_cast<std::size_t>(mu.size()); }
};

// mu_i = phi1_inv(mean_i); boundary means are clamped and reported.
Eigen::VectorXd fit_gauc_mean(const MomentSummary& moments, std::vector<int>* clamped = nullptr);

struct PairFitInfo {
  int i = 0;
  int j = 0;
  double sigma = 0.0;
  int iterations = 0;
  bool used_bisection = false;
  bool clamped_target = false;  // target outside the attainable coupling range
  double achieved_error = 0.0;  // |phi2 - target| at the solution
};

// Solves phi2(mu_i, mu_j; sigma) = target for sigma by Newton steps from 0
// with a guarded bisection fallback; phi2 is monotone in sigma.
double solve_pair_correlation(double mu_i, double mu_j, double target, PairFitInfo* info = nullptr);

struct GauCCorrFit {
  Eigen::MatrixXd sigma;  // pre-repair
  std::vector<std::pair<int, int>> association;
  std::vector<PairFitInfo> report;
};

// Per-pair moment matching over the sparse association set (same epsilon /
// delta rules as the logistic structure selection); pairs outside the set
// keep sigma = 0.
GauCCorrFit fit_gauc_corr(const MomentSummary& moments, const Eigen::VectorXd& mu,
                          const FitConfig& cfg);

struct RepairResult {
  Eigen::MatrixXd sigma;
  bool repaired = false;
  double shift = 0.0;
};

// Eigenvalue-shift repair (Sigma + |lambda| I) / (1 + |lambda|), followed by
// a 1e-12 ridge so the result is strictly factorizable. Already-PD inputs
// pass through unchanged and the repair is idempotent.
RepairResult repair_pd(const Eigen::MatrixXd& sigma);

struct GauCFit {
  GauCParams params;
  std::vector<PairFitInfo> report;
};

// Full fit: means, sparse pairwise correlations, then PD repair.
GauCFit fit_gauc(const MomentSummary& moments, const FitConfig& cfg);

// Threshold sampling through a triangular factorization of sigma.
SampleBatch gauc_sample(const GauCParams& params, Rng& rng, std::size_t m);

}  // namespace binfam
