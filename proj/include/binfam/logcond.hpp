#pragma once

#include <Eigen/Dense>
#include <vector>

#include "binfam/chain.hpp"
#include "binfam/fit_config.hpp"
#include "binfam/moments.hpp"
#include "binfam/types.hpp"

namespace binfam {

// Chain of logistic conditionals with sparse predictor sets. Row i of the
// lower-triangular B holds the intercept b_ii and slopes b_ij for j in the
// predictor set L_i; components in the independent set are intercept-only.
struct LogCoParams {
  Eigen::MatrixXd B;
  std::vector<int> independent;             // sorted
  std::vector<std::vector<int>> predictors;  // predictors[i] = L_i, sorted, empty for independent i

  std::size_t dim() const { return static_cast<std::size_t>(B.rows()); }
};

LogCoParams make_logcond(Eigen::MatrixXd B, std::vector<int> independent,
                         std::vector<std::vector<int>> predictors);

// Saturated chain: every earlier component is a predictor.
LogCoParams make_logcond_dense(Eigen::MatrixXd B);

struct Structure {
  std::vector<int> independent;
  std::vector<std::vector<int>> predictors;
};

// Threshold rules: components with means outside (eps, 1-eps) are drawn
// independently; the rest take as predictors the earlier non-independent
// components with |sample correlation| above delta.
Structure select_structure(const MomentSummary& moments, const FitConfig& cfg);

struct ComponentFitInfo {
  int component = 0;
  int iterations = 0;
  bool demoted = false;           // moved to the independent set during fitting
  bool clamped_intercept = false;  // boundary mean clamped before the logit
  std::vector<double> objective_trace;  // penalized log-likelihood per accepted step
};

struct LogCoFit {
  LogCoParams params;
  std::vector<ComponentFitInfo> report;
};

// Penalized Newton-Raphson fit of the weighted logistic regressions, with
// step halving and demotion of non-converging or blowing-up components.
LogCoFit fit_logcond(const WeightedSample& sample, const FitConfig& cfg);
LogCoFit fit_logcond(const WeightedSample& sample, const FitConfig& cfg,
                     const LogCoParams* warm_start);

// Exact log-probability of g under the chain.
double logcond_log_eval(const LogCoParams& params, const BinaryVector& g);

ConditionalProvider logcond_conditionals(const LogCoParams& params);
ChainDraw logcond_sample(const LogCoParams& params, Rng& rng);

}  // namespace binfam
