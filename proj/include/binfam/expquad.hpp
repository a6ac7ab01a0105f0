#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "binfam/chain.hpp"
#include "binfam/moments.hpp"
#include "binfam/types.hpp"

namespace binfam {

// Mass proportional to exp(g'Ag) for a symmetric matrix A. The normalizing
// constant is intentionally never computed for large d.
struct ExpQuParams {
  Eigen::MatrixXd A;

  std::size_t dim() const { return static_cast<std::size_t>(A.rows()); }
};

ExpQuParams make_expquad(Eigen::MatrixXd A);  // validates symmetry

// g'Ag, the log of the unnormalized mass.
double expquad_log_eval_unnorm(const ExpQuParams& params, const BinaryVector& g);

// One reduction step: the quadratic Taylor approximation of the marginal
// over the last component, and the log factor log(1 + e^c) it accumulates.
struct TaylorStep {
  Eigen::MatrixXd reduced;
  double log_factor;
};
TaylorStep taylor_marginal_step(const Eigen::MatrixXd& A);

// Logistic chain extracted from the recursive reduction A = A_d, A_{d-1},
// ..., A_1. Component t of the chain is original component order[t]; the
// conditional is logit_inverse(intercept[t] + slope[t] . prefix), where the
// slopes carry the doubled off-diagonal block of the reduced matrix (the
// quadratic form counts each symmetric pair twice).
struct ProxyChain {
  std::vector<int> order;                // chain position -> original component
  std::vector<double> intercepts;
  std::vector<Eigen::VectorXd> slopes;   // slope[t] has length t
  std::vector<double> log_factors;       // per-step log(1+e^c), diagnostics only

  std::size_t dim() const { return order.size(); }
};

ProxyChain build_proxy(const ExpQuParams& params);
ProxyChain build_proxy(const ExpQuParams& params, std::span<const int> order);

// Provider over chain positions (prefix given in chain order).
ConditionalProvider proxy_conditionals(const ProxyChain& chain);

// Log-probability of g (original component order) under the proxy chain.
double proxy_log_eval(const ProxyChain& chain, const BinaryVector& g);

// Draw from the proxy; the value is reported in original component order and
// the probability is exact under the chain.
ChainDraw proxy_sample(const ProxyChain& chain, Rng& rng);

// Total variation between the proxy chain and the exactly normalized family;
// enumeration-based, d <= 12.
double proxy_tv_distance(const ExpQuParams& params, const ProxyChain& chain);

struct ExpQuFit {
  ExpQuParams params;
  double intercept;      // constant absorbed from unnormalized log targets
  double residual;       // l2 norm of the prediction residual
  bool rank_deficient;
  Eigen::Index rank;
};

// Least-squares fit of g'Ag + c to given log-target values. Rank-deficient
// designs yield the minimum-norm solution, reported through the flag.
ExpQuFit fit_expquad(const WeightedSample& sample, std::span<const double> log_target);

}  // namespace binfam
