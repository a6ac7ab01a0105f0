#include "binfam/expquad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "binfam/errors.hpp"
#include "binfam/linquad.hpp"
#include "binfam/oracle.hpp"

namespace binfam {

namespace {

void check_symmetric(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() == 0) throw ValidationError("A must be a nonempty square matrix");
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (std::fabs(A(i, j) - A(j, i)) > 1e-12 * (1.0 + std::fabs(A(i, j))))
        throw ValidationError("A must be symmetric");
}

}  // namespace

ExpQuParams make_expquad(Eigen::MatrixXd A) {
  check_symmetric(A);
  return ExpQuParams{std::move(A)};
}

double expquad_log_eval_unnorm(const ExpQuParams& params, const BinaryVector& g) {
  if (g.dim() != params.dim()) throw ValidationError("dimension mismatch");
  double quad = 0.0;
  for (std::size_t i = 0; i < g.dim(); ++i) {
    if (!g[i]) continue;
    const auto ii = static_cast<Eigen::Index>(i);
    quad += params.A(ii, ii);
    for (std::size_t j = 0; j < i; ++j)
      if (g[j]) quad += 2.0 * params.A(ii, static_cast<Eigen::Index>(j));
  }
  return quad;
}

TaylorStep taylor_marginal_step(const Eigen::MatrixXd& A) {
  check_symmetric(A);
  const Eigen::Index k = A.rows();
  if (k < 2) throw ValidationError("taylor_marginal_step requires a matrix of size at least 2");
  const Eigen::MatrixXd head = A.topLeftCorner(k - 1, k - 1);
  const Eigen::VectorXd b = A.topRightCorner(k - 1, 1);
  const double c = A(k - 1, k - 1);
  const double th = std::tanh(0.5 * c);
  const double ch = std::cosh(0.5 * c);
  const double sech2 = 1.0 / (ch * ch);
  Eigen::MatrixXd reduced = head;
  reduced.diagonal() += (1.0 + th) * b;
  reduced += 0.5 * sech2 * (b * b.transpose());
  return {std::move(reduced), log1p_exp(c)};
}

ProxyChain build_proxy(const ExpQuParams& params) {
  std::vector<int> order(params.dim());
  std::iota(order.begin(), order.end(), 0);
  return build_proxy(params, order);
}

ProxyChain build_proxy(const ExpQuParams& params, std::span<const int> order) {
  const std::size_t d = params.dim();
  if (order.size() != d) throw ValidationError("order must be a permutation of all components");
  std::vector<bool> seen(d, false);
  for (int o : order) {
    if (o < 0 || static_cast<std::size_t>(o) >= d || seen[static_cast<std::size_t>(o)])
      throw ValidationError("order must be a permutation of all components");
    seen[static_cast<std::size_t>(o)] = true;
  }

  Eigen::MatrixXd current(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      current(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          params.A(order[i], order[j]);

  ProxyChain chain;
  chain.order.assign(order.begin(), order.end());
  chain.intercepts.resize(d);
  chain.slopes.resize(d);
  chain.log_factors.reserve(d > 0 ? d - 1 : 0);
  for (std::size_t k = d; k >= 1; --k) {
    const auto kk = static_cast<Eigen::Index>(k);
    chain.intercepts[k - 1] = current(kk - 1, kk - 1);
    chain.slopes[k - 1] = 2.0 * current.row(kk - 1).head(kk - 1).transpose();
    if (k == 1) break;
    TaylorStep step = taylor_marginal_step(current);
    chain.log_factors.push_back(step.log_factor);
    current = std::move(step.reduced);
  }
  std::reverse(chain.log_factors.begin(), chain.log_factors.end());
  return chain;
}

ConditionalProvider proxy_conditionals(const ProxyChain& chain) {
  const ProxyChain local = chain;
  return ConditionalProvider(chain.dim(), [local](std::span<const std::uint8_t> prefix) {
    const std::size_t t = prefix.size();
    double eta = local.intercepts[t];
    for (std::size_t j = 0; j < t; ++j)
      if (prefix[j]) eta += local.slopes[t][static_cast<Eigen::Index>(j)];
    return logit_inverse(eta);
  });
}

double proxy_log_eval(const ProxyChain& chain, const BinaryVector& g) {
  if (g.dim() != chain.dim()) throw ValidationError("dimension mismatch");
  double lp = 0.0;
  for (std::size_t t = 0; t < chain.dim(); ++t) {
    double eta = chain.intercepts[t];
    for (std::size_t j = 0; j < t; ++j)
      if (g[static_cast<std::size_t>(chain.order[j])]) eta += chain.slopes[t][static_cast<Eigen::Index>(j)];
    lp += (g[static_cast<std::size_t>(chain.order[t])] ? eta : 0.0) - log1p_exp(eta);
  }
  return lp;
}

ChainDraw proxy_sample(const ProxyChain& chain, Rng& rng) {
  ChainDraw draw = chain_rule_sample(proxy_conditionals(chain), rng);
  BinaryVector y(chain.dim());
  for (std::size_t t = 0; t < chain.dim(); ++t)
    y.set(static_cast<std::size_t>(chain.order[t]), draw.value[t]);
  return {y, draw.prob};
}

double proxy_tv_distance(const ExpQuParams& params, const ProxyChain& chain) {
  const std::size_t d = params.dim();
  if (d != chain.dim()) throw ValidationError("dimension mismatch");
  if (d > 12) throw ValidationError("proxy TV diagnostic supports at most d = 12");
  auto exact = enumerate_family_log(
      d, [&](const BinaryVector& g) { return expquad_log_eval_unnorm(params, g); });
  auto proxy = enumerate_family_log(d, [&](const BinaryVector& g) { return proxy_log_eval(chain, g); });
  return total_variation(exact, proxy);
}

ExpQuFit fit_expquad(const WeightedSample& sample, std::span<const double> log_target) {
  if (log_target.size() != sample.size())
    throw ValidationError("log-target vector must match the sample size");
  for (double y : log_target)
    if (!std::isfinite(y)) throw ValidationError("log targets must be finite");
  const std::size_t d = sample.dim();
  const TriangularIndex tri(d);
  const auto T = static_cast<Eigen::Index>(tri.size());
  const auto n = static_cast<Eigen::Index>(sample.size());

  // Design: one column per product gamma_i gamma_j (i >= j) plus a constant
  // column that absorbs an additive offset in unnormalized log targets.
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, T + 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    const BinaryVector& x = sample.row(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < d; ++i) {
      if (!x[i]) continue;
      for (std::size_t j = 0; j <= i; ++j)
        if (x[j]) X(k, static_cast<Eigen::Index>(tri.flat(i, j))) = 1.0;
    }
    X(k, T) = 1.0;
  }
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) y[k] = log_target[static_cast<std::size_t>(k)];

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
  const Eigen::VectorXd beta = cod.solve(y);
  const double residual = (X * beta - y).norm();

  Eigen::MatrixXd A(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
        beta[static_cast<Eigen::Index>(tri.flat(i, i))];
    for (std::size_t j = 0; j < i; ++j) {
      // The design feature gamma_i gamma_j carries coefficient 2 a_ij.
      const double a = 0.5 * beta[static_cast<Eigen::Index>(tri.flat(i, j))];
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a;
      A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = a;
    }
  }
  return ExpQuFit{ExpQuParams{std::move(A)}, beta[T], residual, cod.rank() < T + 1, cod.rank()};
}

}  // namespace binfam
