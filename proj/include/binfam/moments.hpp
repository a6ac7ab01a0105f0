#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "binfam/types.hpp"

namespace binfam {

// Weighted first and second sample moments with pairwise sample
// correlations. Components whose mean sits on the boundary of [0,1] have no
// variance; their correlation entries are stored as 0 and flagged.
struct MomentSummary {
  Eigen::VectorXd mean;        // mean[i] in [0,1]
  Eigen::MatrixXd second;      // second(i,j) = weighted E[x_i x_j], second(i,i) = mean[i]
  Eigen::MatrixXd corr;        // unit diagonal, 0 where degenerate
  std::vector<bool> degenerate;

  Eigen::Index dim() const { return mean.size(); }
};

MomentSummary compute_moments(const WeightedSample& sample);

// Sharp joint-moment bounds given the marginal means of an index set:
// lower = max(sum m_i - |I| + 1, 0), upper = min_i m_i.
std::pair<double, double> frechet_bounds(std::span<const double> marginals);

double logit(double p);          // log p - log(1-p), p in (0,1)
double logit_inverse(double x);  // 1 / (1 + exp(-x))

// log(1 + exp(x)) without overflow.
double log1p_exp(double x);

}  // namespace binfam
