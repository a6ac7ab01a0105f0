#include "binfam/linquad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <vector>

#include "binfam/errors.hpp"

namespace binfam {

namespace {

void check_symmetric(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() == 0) throw ValidationError("A must be a nonempty square matrix");
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (std::fabs(A(i, j) - A(j, i)) > 1e-12 * (1.0 + std::fabs(A(i, j))))
        throw ValidationError("A must be symmetric");
}

std::string prefix_string(std::span<const std::uint8_t> prefix) {
  std::ostringstream os;
  for (auto b : prefix) os << (b ? '1' : '0');
  return os.str();
}

}  // namespace

std::pair<std::size_t, std::size_t> TriangularIndex::unflat(std::size_t t) const {
  std::size_t i = 0;
  while ((i + 1) * (i + 2) / 2 <= t) ++i;
  return {i, t - i * (i + 1) / 2};
}

LinQuParams LinQuParams::make(Eigen::MatrixXd A, double a0) {
  check_symmetric(A);
  LinQuParams p;
  const Eigen::Index d = A.rows();
  p.A_ = std::move(A);
  p.a0_ = a0;
  p.weight_sum_ = 4.0 * a0 + p.A_.sum() + p.A_.trace();
  p.abs_scale_ = 4.0 * std::fabs(a0) + 4.0 * p.A_.cwiseAbs().sum() + p.A_.diagonal().cwiseAbs().sum();
  if (p.weight_sum_ > 0.0) {
    p.mu_ = std::exp2(-static_cast<double>(d) + 2.0) / p.weight_sum_;
    p.mu_defined_ = true;
  } else {
    p.mu_ = std::numeric_limits<double>::quiet_NaN();
    p.mu_defined_ = false;
  }
  p.row_tail_ = Eigen::MatrixXd::Zero(d, d + 1);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index k = d - 1; k >= 0; --k)
      p.row_tail_(i, k) = p.row_tail_(i, k + 1) + p.A_(i, k);
  p.tail_ = Eigen::VectorXd::Zero(d + 1);
  for (Eigen::Index k = d - 1; k >= 0; --k) {
    double block = p.A_(k, k);
    for (Eigen::Index j = k + 1; j < d; ++j) block += 2.0 * p.A_(k, j);
    p.tail_[k] = p.tail_[k + 1] + block + p.A_(k, k);  // quadratic block plus diagonal term
  }
  return p;
}

double linquad_negativity_tolerance(const LinQuParams& p) { return 1e-12 * (1.0 + p.abs_scale_); }

double LinQuParams::prefix_weight(std::span<const std::uint8_t> prefix) const {
  const auto k = static_cast<Eigen::Index>(prefix.size());
  if (k > A_.rows()) throw ValidationError("prefix longer than dimension");
  double s = 4.0 * a0_ + tail_[k];
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!prefix[static_cast<std::size_t>(i)]) continue;
    double inner = row_tail_(i, k);
    for (Eigen::Index j = 0; j < k; ++j)
      if (prefix[static_cast<std::size_t>(j)]) inner += A_(i, j);
    s += 4.0 * inner;
  }
  return s;
}

double linquad_cross_moment(const LinQuParams& params, std::span<const int> index_set) {
  if (index_set.empty()) return 1.0;
  const auto d = static_cast<int>(params.dim());
  std::vector<bool> in_set(params.dim(), false);
  for (int i : index_set) {
    if (i < 0 || i >= d) throw ValidationError("component index out of range");
    in_set[static_cast<std::size_t>(i)] = true;
  }
  if (params.weight_sum() == 0.0) throw NumericalError("cross-moment denominator is zero");
  double numer = 0.0;
  for (int i = 0; i < d; ++i) {
    if (!in_set[static_cast<std::size_t>(i)]) continue;
    double term = 2.0 * params.A().row(i).sum();
    for (int j = 0; j < d; ++j)
      if (in_set[static_cast<std::size_t>(j)] && j != i) term += params.A()(i, j);
    numer += term;
  }
  std::size_t card = 0;
  for (bool b : in_set) card += b ? 1 : 0;
  const double scale = std::exp2(-static_cast<double>(card));
  return scale + scale * numer / params.weight_sum();
}

double linquad_mean(const LinQuParams& params, int i) {
  if (i < 0 || static_cast<std::size_t>(i) >= params.dim())
    throw ValidationError("component index out of range");
  if (params.weight_sum() == 0.0) throw NumericalError("mean denominator is zero");
  return 0.5 + params.A().row(i).sum() / params.weight_sum();
}

double linquad_marginal(const LinQuParams& params, std::span<const std::uint8_t> prefix) {
  if (!params.mu_defined()) throw NumericalError("normalizing constant undefined (nonpositive weight sum)");
  const double k = static_cast<double>(prefix.size());
  const double dd = static_cast<double>(params.dim());
  return params.mu() * std::exp2(dd - k - 2.0) * params.prefix_weight(prefix);
}

double linquad_eval(const LinQuParams& params, const BinaryVector& g) {
  if (g.dim() != params.dim()) throw ValidationError("dimension mismatch");
  if (!params.mu_defined()) throw NumericalError("normalizing constant undefined (nonpositive weight sum)");
  double quad = params.a0();
  for (std::size_t i = 0; i < g.dim(); ++i) {
    if (!g[i]) continue;
    const auto ii = static_cast<Eigen::Index>(i);
    quad += params.A()(ii, ii);
    for (std::size_t j = 0; j < i; ++j)
      if (g[j]) quad += 2.0 * params.A()(ii, static_cast<Eigen::Index>(j));
  }
  const double mass = params.mu() * quad;
  if (mass < -linquad_negativity_tolerance(params))
    throw NegativeMassError("negative mass at state " + prefix_string(g.bits()));
  return std::max(mass, 0.0);
}

ConditionalProvider linquad_conditionals(const LinQuParams& params, bool force_clamp) {
  const auto shared = std::make_shared<LinQuParams>(params);
  return ConditionalProvider(params.dim(), [shared, force_clamp](std::span<const std::uint8_t> prefix) {
    std::vector<std::uint8_t> extended(prefix.begin(), prefix.end());
    extended.push_back(1);
    const double s1 = shared->prefix_weight({extended.data(), extended.size()});
    extended.back() = 0;
    const double s0 = shared->prefix_weight({extended.data(), extended.size()});
    const double tol = linquad_negativity_tolerance(*shared);
    if (!force_clamp && (s1 < -tol || s0 < -tol)) {
      throw NegativeMassError("parameter assigns negative mass beyond prefix " +
                              prefix_string(prefix) + "; not a distribution");
    }
    const double c1 = std::max(s1, 0.0);
    const double c0 = std::max(s0, 0.0);
    if (c1 + c0 <= 0.0) return 0.5;
    const double p = c1 / (c1 + c0);
    return std::clamp(p, 0.0, 1.0);
  });
}

namespace {

// Factorizations of the moment-matching system, keyed by dimension. The
// matrix depends only on d, not on the data.
std::map<std::size_t, std::shared_ptr<const Eigen::FullPivLU<Eigen::MatrixXd>>> g_system_cache;
std::mutex g_system_mutex;

std::shared_ptr<const Eigen::FullPivLU<Eigen::MatrixXd>> system_factorization(std::size_t d) {
  std::lock_guard<std::mutex> lock(g_system_mutex);
  auto it = g_system_cache.find(d);
  if (it != g_system_cache.end()) return it->second;

  const TriangularIndex tri(d);
  const auto T = static_cast<Eigen::Index>(tri.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(T + 1, T + 1);
  const double dd = static_cast<double>(d);

  // One row per moment x_{i,j}: the exact expectation of gamma_i gamma_j
  // under unnormalized mass a0 + g'Ag, using |{i,j} u {k,l}| distinct-index
  // counting for the power of two in each coefficient.
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const auto row = static_cast<Eigen::Index>(tri.flat(i, j));
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t l = 0; l <= k; ++l) {
          std::size_t distinct = 2;  // i, j counted below
          if (i == j) distinct = 1;
          if (k != i && k != j) ++distinct;
          if (l != i && l != j && l != k) ++distinct;
          const double mult = (k == l) ? 1.0 : 2.0;
          M(row, static_cast<Eigen::Index>(tri.flat(k, l))) +=
              mult * std::exp2(dd - static_cast<double>(distinct));
        }
      }
      M(row, T) = std::exp2(dd - (i == j ? 1.0 : 2.0));
    }
  }
  // Normalization row: total unnormalized mass equals 1.
  for (std::size_t t = 0; t < tri.size(); ++t) M(T, static_cast<Eigen::Index>(t)) = std::exp2(dd - 1.0);
  M(T, T) = std::exp2(dd);

  auto lu = std::make_shared<Eigen::FullPivLU<Eigen::MatrixXd>>(M);
  if (!lu->isInvertible()) throw NumericalError("moment-matching system is singular");
  g_system_cache.emplace(d, lu);
  return lu;
}

}  // namespace

LinQuFit fit_linquad(const MomentSummary& moments) {
  const auto d = static_cast<std::size_t>(moments.dim());
  if (d == 0) throw ValidationError("moments must have positive dimension");
  const TriangularIndex tri(d);
  const auto T = static_cast<Eigen::Index>(tri.size());
  auto lu = system_factorization(d);

  Eigen::VectorXd rhs(T + 1);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      rhs[static_cast<Eigen::Index>(tri.flat(i, j))] =
          moments.second(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  rhs[T] = 1.0;

  const Eigen::VectorXd u = lu->solve(rhs);

  Eigen::MatrixXd A(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = u[static_cast<Eigen::Index>(tri.flat(i, j))];
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  const double a0 = u[T];

  LinQuFit fit{LinQuParams::make(std::move(A), a0), 0.0};
  // Residual of the solved system in the moment domain.
  double max_resid = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      std::vector<int> idx;
      idx.push_back(static_cast<int>(i));
      if (j != i) idx.push_back(static_cast<int>(j));
      const double got = linquad_cross_moment(fit.params, idx);
      max_resid = std::max(max_resid,
                           std::fabs(got - moments.second(static_cast<Eigen::Index>(i),
                                                          static_cast<Eigen::Index>(j))));
    }
  max_resid = std::max(
      max_resid, std::fabs(std::exp2(static_cast<double>(d) - 2.0) * fit.params.weight_sum() - 1.0));
  fit.residual = max_resid;
  return fit;
}

LinQuFit fit_linquad(const WeightedSample& sample) { return fit_linquad(compute_moments(sample)); }

double linquad_min_mass(const LinQuParams& params) {
  const std::size_t d = params.dim();
  if (d > 20) throw ValidationError("min-mass enumeration supports at most d = 20");
  if (!params.mu_defined()) throw NumericalError("normalizing constant undefined (nonpositive weight sum)");
  double min_mass = std::numeric_limits<double>::infinity();
  const std::uint64_t states = std::uint64_t{1} << d;
  for (std::uint64_t s = 0; s < states; ++s) {
    double quad = params.a0();
    for (std::size_t i = 0; i < d; ++i) {
      if (!((s >> i) & 1u)) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      quad += params.A()(ii, ii);
      for (std::size_t j = 0; j < i; ++j)
        if ((s >> j) & 1u) quad += 2.0 * params.A()(ii, static_cast<Eigen::Index>(j));
    }
    min_mass = std::min(min_mass, params.mu() * quad);
  }
  return min_mass;
}

}  // namespace binfam
