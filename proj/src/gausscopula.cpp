#include "binfam/gausscopula.hpp"

#include <algorithm>
#include <cmath>

#include "binfam/errors.hpp"
#include "binfam/logcond.hpp"
#include "binfam/parallel.hpp"

namespace binfam {

namespace {
constexpr double kMeanClamp = 1e-10;       // boundary means are pulled inside by this much
constexpr double kPairTol = 1e-7;          // target accuracy of the per-pair solver
constexpr double kRepairTrigger = 5e-13;   // smallest eigenvalue that avoids repair
constexpr double kRepairRidge = 1e-12;     // strict-PD ridge after the shift
}  // namespace

Eigen::VectorXd fit_gauc_mean(const MomentSummary& moments, std::vector<int>* clamped) {
  const Eigen::Index d = moments.dim();
  Eigen::VectorXd mu(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double m = moments.mean[i];
    if (m < kMeanClamp || m > 1.0 - kMeanClamp) {
      m = std::clamp(m, kMeanClamp, 1.0 - kMeanClamp);
      if (clamped) clamped->push_back(static_cast<int>(i));
    }
    mu[i] = phi1_inv(m);
  }
  return mu;
}

double solve_pair_correlation(double mu_i, double mu_j, double target, PairFitInfo* info) {
  const double p_i = phi1(mu_i);
  const double p_j = phi1(mu_j);
  const double lo_val = std::max(p_i + p_j - 1.0, 0.0);  // coupling at sigma = -1
  const double hi_val = std::min(p_i, p_j);              // coupling at sigma = +1

  PairFitInfo local;
  PairFitInfo& rec = info ? *info : local;

  double t = target;
  if (t < lo_val || t > hi_val) {
    rec.clamped_target = true;
    t = std::clamp(t, lo_val, hi_val);
  }
  if (t <= lo_val) {
    rec.sigma = -1.0;
    rec.achieved_error = 0.0;
    return -1.0;
  }
  if (t >= hi_val) {
    rec.sigma = 1.0;
    rec.achieved_error = 0.0;
    return 1.0;
  }

  double lo = -1.0, hi = 1.0;
  double sigma = 0.0;
  double f = phi2(mu_i, mu_j, sigma) - t;
  int iter = 0;
  while (std::fabs(f) > kPairTol && iter < 200) {
    ++iter;
    if (f < 0.0)
      lo = sigma;
    else
      hi = sigma;
    double next;
    const double den = binormal_pdf(mu_i, mu_j, sigma);
    if (den > 1e-300) {
      next = sigma - f / den;
      if (!(next > lo && next < hi)) {
        next = 0.5 * (lo + hi);
        rec.used_bisection = true;
      }
    } else {
      next = 0.5 * (lo + hi);
      rec.used_bisection = true;
    }
    if (next == sigma) break;
    sigma = next;
    f = phi2(mu_i, mu_j, sigma) - t;
  }
  rec.sigma = sigma;
  rec.iterations = iter;
  rec.achieved_error = std::fabs(f);
  return sigma;
}

GauCCorrFit fit_gauc_corr(const MomentSummary& moments, const Eigen::VectorXd& mu,
                          const FitConfig& cfg) {
  cfg.validate();
  const Eigen::Index d = moments.dim();
  if (mu.size() != d) throw ValidationError("dimension mismatch between moments and thresholds");

  std::vector<bool> extreme(static_cast<std::size_t>(d), false);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double m = moments.mean[i];
    if (!(m > cfg.epsilon_marginal && m < 1.0 - cfg.epsilon_marginal))
      extreme[static_cast<std::size_t>(i)] = true;
  }

  GauCCorrFit fit;
  fit.sigma = Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < i; ++j) {
      if (extreme[static_cast<std::size_t>(i)] || extreme[static_cast<std::size_t>(j)]) continue;
      if (std::fabs(moments.corr(i, j)) > cfg.delta_corr)
        fit.association.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }

  fit.report.resize(fit.association.size());
  parallel_for(fit.association.size(), [&](std::size_t t) {
    const auto [i, j] = fit.association[t];
    PairFitInfo& rec = fit.report[t];
    rec.i = i;
    rec.j = j;
    solve_pair_correlation(mu[i], mu[j], moments.second(i, j), &rec);
  });
  for (const PairFitInfo& rec : fit.report) {
    fit.sigma(rec.i, rec.j) = rec.sigma;
    fit.sigma(rec.j, rec.i) = rec.sigma;
  }
  return fit;
}

RepairResult repair_pd(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0)
    throw ValidationError("sigma must be a nonempty square matrix");
  for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
    if (std::fabs(sigma(i, i) - 1.0) > 1e-10) throw ValidationError("sigma must have unit diagonal");
    for (Eigen::Index j = 0; j < i; ++j)
      if (std::fabs(sigma(i, j) - sigma(j, i)) > 1e-12) throw ValidationError("sigma must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  const double lambda = es.eigenvalues().minCoeff();
  if (lambda >= kRepairTrigger) return {sigma, false, 0.0};

  const double shift = std::fabs(lambda);
  Eigen::MatrixXd repaired = sigma;
  if (shift > 0.0) {
    repaired = (sigma + shift * Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols())) / (1.0 + shift);
  }
  repaired = (repaired + kRepairRidge * Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols())) /
             (1.0 + kRepairRidge);
  repaired.diagonal().setOnes();
  return {std::move(repaired), true, shift};
}

GauCFit fit_gauc(const MomentSummary& moments, const FitConfig& cfg) {
  GauCFit out;
  out.params.clamped_means.clear();
  out.params.mu = fit_gauc_mean(moments, &out.params.clamped_means);
  GauCCorrFit corr = fit_gauc_corr(moments, out.params.mu, cfg);
  RepairResult rep = repair_pd(corr.sigma);
  out.params.sigma = std::move(rep.sigma);
  out.params.association = std::move(corr.association);
  out.params.pd_repaired = rep.repaired;
  out.params.repair_shift = rep.shift;
  out.report = std::move(corr.report);
  return out;
}

SampleBatch gauc_sample(const GauCParams& params, Rng& rng, std::size_t m) {
  const Eigen::Index d = static_cast<Eigen::Index>(params.dim());
  if (params.sigma.rows() != d || params.sigma.cols() != d)
    throw ValidationError("sigma dimension does not match mu");
  Eigen::LLT<Eigen::MatrixXd> llt(params.sigma);
  if (llt.info() != Eigen::Success)
    throw NumericalError("correlation matrix is not positive definite; repair it before sampling");
  const Eigen::MatrixXd L = llt.matrixL();

  SampleBatch batch;
  batch.rows.reserve(m);
  Eigen::VectorXd z(d);
  for (std::size_t k = 0; k < m; ++k) {
    for (Eigen::Index i = 0; i < d; ++i) z[i] = rng.normal();
    const Eigen::VectorXd v = L * z;
    BinaryVector y(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) y.set(static_cast<std::size_t>(i), v[i] <= params.mu[i]);
    batch.rows.push_back(std::move(y));
  }
  return batch;
}

}  // namespace binfam
