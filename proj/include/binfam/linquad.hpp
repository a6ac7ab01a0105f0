#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>

#include "binfam/chain.hpp"
#include "binfam/moments.hpp"
#include "binfam/types.hpp"

namespace binfam {

// Bijection between the lower triangle of a symmetric d x d matrix
// (i >= j, 0-based) and flat indices 0 .. d(d+1)/2 - 1.
struct TriangularIndex {
  explicit TriangularIndex(std::size_t d) : d_(d) {}

  std::size_t size() const { return d_ * (d_ + 1) / 2; }
  std::size_t flat(std::size_t i, std::size_t j) const { return i * (i + 1) / 2 + j; }
  std::pair<std::size_t, std::size_t> unflat(std::size_t t) const;

 private:
  std::size_t d_;
};

// Mass proportional to a0 + g'Ag for a symmetric matrix A. The normalizing
// constant mu is derived and cached; whether all 2^d masses are nonnegative
// is generally unknown and checkable only by enumeration at small d.
class LinQuParams {
 public:
  static LinQuParams make(Eigen::MatrixXd A, double a0);

  std::size_t dim() const { return static_cast<std::size_t>(A_.rows()); }
  const Eigen::MatrixXd& A() const { return A_; }
  double a0() const { return a0_; }
  double mu() const { return mu_; }
  bool mu_defined() const { return mu_defined_; }
  // 4 a0 + 1'A1 + tr A, the common denominator of the moment formulas.
  double weight_sum() const { return weight_sum_; }

  // s_k of the marginal formula: the prefix weight of gamma_{0:k-1} with the
  // trailing components integrated out. s_0 equals weight_sum().
  double prefix_weight(std::span<const std::uint8_t> prefix) const;

 private:
  Eigen::MatrixXd A_;
  double a0_ = 0.0;
  double mu_ = 0.0;
  bool mu_defined_ = false;
  double weight_sum_ = 0.0;
  double abs_scale_ = 0.0;          // |4 a0| + 4 sum |a_ij|, for negativity tolerances
  Eigen::MatrixXd row_tail_;        // row_tail(i,k) = sum_{j>=k} a_ij
  Eigen::VectorXd tail_;            // tail(k) = sum_{i,j>=k} a_ij + sum_{i>=k} a_ii

  friend double linquad_negativity_tolerance(const LinQuParams&);
};

// Cross-moment m_I in closed form; m_{} = 1.
double linquad_cross_moment(const LinQuParams& params, std::span<const int> index_set);

// Mean of component i in closed form.
double linquad_mean(const LinQuParams& params, int i);

// Marginal mass of a prefix: mu * 2^(d-k-2) * s_k(prefix).
double linquad_marginal(const LinQuParams& params, std::span<const std::uint8_t> prefix);

// mu * (a0 + g'Ag). Raises NegativeMassError on a negative mass.
double linquad_eval(const LinQuParams& params, const BinaryVector& g);

// Chain-rule conditionals from the marginal formula. Raises
// NegativeMassError when a queried prefix weight is negative, which signals
// the parameter is not a distribution; with force_clamp the conditionals are
// clamped into [0,1] instead (exploratory, not a normalized distribution).
ConditionalProvider linquad_conditionals(const LinQuParams& params, bool force_clamp = false);

struct LinQuFit {
  LinQuParams params;
  double residual;  // max-norm residual of the moment system
};

// Moment-matching fit: solves the d(d+1)/2 + 1 linear system equating all
// first/second moments to the sample moments under unit total mass. The
// system matrix depends only on d and its factorization is cached.
LinQuFit fit_linquad(const MomentSummary& moments);
LinQuFit fit_linquad(const WeightedSample& sample);

// Minimum mass over all 2^d states (enumeration; d <= 20 only).
double linquad_min_mass(const LinQuParams& params);

}  // namespace binfam
