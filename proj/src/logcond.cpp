#include "binfam/logcond.hpp"

#include <algorithm>
#include <cmath>

#include "binfam/errors.hpp"
#include "binfam/parallel.hpp"

namespace binfam {

void FitConfig::validate() const {
  if (!(epsilon_marginal > 0.0 && epsilon_marginal < 0.5))
    throw ValidationError("epsilon_marginal must lie in (0, 0.5)");
  if (!(delta_corr > 0.0 && delta_corr < 1.0)) throw ValidationError("delta_corr must lie in (0,1)");
  if (!(penalty >= 0.0)) throw ValidationError("penalty must be nonnegative");
  if (!(newton_tol > 0.0)) throw ValidationError("newton_tol must be positive");
  if (max_iter <= 0) throw ValidationError("max_iter must be positive");
  if (!(blowup_threshold > 0.0)) throw ValidationError("blowup_threshold must be positive");
}

LogCoParams make_logcond(Eigen::MatrixXd B, std::vector<int> independent,
                         std::vector<std::vector<int>> predictors) {
  const auto d = static_cast<std::size_t>(B.rows());
  if (B.rows() != B.cols() || d == 0) throw ValidationError("B must be a nonempty square matrix");
  if (predictors.size() != d) throw ValidationError("predictor sets must cover every component");
  std::vector<bool> indep(d, false);
  for (int i : independent) {
    if (i < 0 || static_cast<std::size_t>(i) >= d) throw ValidationError("independent index out of range");
    indep[static_cast<std::size_t>(i)] = true;
  }
  std::sort(independent.begin(), independent.end());
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<bool> allowed(d, false);
    for (int j : predictors[i]) {
      if (j < 0 || j >= static_cast<int>(i))
        throw ValidationError("predictors must have smaller index than their component");
      allowed[static_cast<std::size_t>(j)] = true;
    }
    if (indep[i] && !predictors[i].empty())
      throw ValidationError("independent components must have empty predictor sets");
    std::sort(predictors[i].begin(), predictors[i].end());
    for (std::size_t j = 0; j < d; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      if (j == i) continue;
      if (j > i || !allowed[j]) {
        if (B(ii, jj) != 0.0)
          throw ValidationError("B carries a slope outside the predictor structure");
      }
    }
  }
  return LogCoParams{std::move(B), std::move(independent), std::move(predictors)};
}

LogCoParams make_logcond_dense(Eigen::MatrixXd B) {
  const auto d = static_cast<std::size_t>(B.rows());
  if (B.rows() != B.cols() || d == 0) throw ValidationError("B must be a nonempty square matrix");
  std::vector<std::vector<int>> predictors(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0)
        predictors[i].push_back(static_cast<int>(j));
  return make_logcond(std::move(B), {}, std::move(predictors));
}

Structure select_structure(const MomentSummary& moments, const FitConfig& cfg) {
  cfg.validate();
  const auto d = static_cast<std::size_t>(moments.dim());
  Structure st;
  st.predictors.resize(d);
  std::vector<bool> indep(d, false);
  for (std::size_t i = 0; i < d; ++i) {
    const double m = moments.mean[static_cast<Eigen::Index>(i)];
    if (!(m > cfg.epsilon_marginal && m < 1.0 - cfg.epsilon_marginal)) {
      indep[i] = true;
      st.independent.push_back(static_cast<int>(i));
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (indep[i]) continue;
    for (std::size_t j = 0; j < i; ++j) {
      if (indep[j]) continue;
      if (std::fabs(moments.corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) >
          cfg.delta_corr)
        st.predictors[i].push_back(static_cast<int>(j));
    }
  }
  return st;
}

namespace {

double clamped_mean(double m, std::size_t n) {
  const double lo = 1.0 / (2.0 * static_cast<double>(n));
  return std::clamp(m, lo, 1.0 - lo);
}

struct ComponentResult {
  Eigen::VectorXd coef;  // slopes for L_i then intercept
  ComponentFitInfo info;
};

// Penalized weighted logistic regression of column i on its predictors.
ComponentResult fit_component(const WeightedSample& sample, int i, const std::vector<int>& preds,
                              double warm_intercept, const Eigen::VectorXd& warm_slopes,
                              const FitConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(sample.size());
  const auto p = static_cast<Eigen::Index>(preds.size()) + 1;  // slopes + intercept

  Eigen::MatrixXd Z(n, p);
  Eigen::VectorXd y(n), w(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const BinaryVector& x = sample.row(static_cast<std::size_t>(k));
    for (Eigen::Index c = 0; c + 1 < p; ++c)
      Z(k, c) = static_cast<double>(x[static_cast<std::size_t>(preds[static_cast<std::size_t>(c)])]);
    Z(k, p - 1) = 1.0;
    y[k] = static_cast<double>(x[static_cast<std::size_t>(i)]);
    w[k] = sample.weight(static_cast<std::size_t>(k));
  }

  Eigen::VectorXd b(p);
  b.head(p - 1) = warm_slopes;
  b[p - 1] = warm_intercept;

  const auto objective = [&](const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = Z * beta;
    double obj = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) obj += w[k] * (y[k] * eta[k] - log1p_exp(eta[k]));
    return obj - 0.5 * cfg.penalty * beta.squaredNorm();
  };

  ComponentResult res;
  res.info.component = i;
  res.info.objective_trace.push_back(objective(b));

  bool converged = false;
  for (int r = 0; r < cfg.max_iter; ++r) {
    const Eigen::VectorXd eta = Z * b;
    Eigen::VectorXd prob(n), wq(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      prob[k] = logit_inverse(eta[k]);
      wq[k] = w[k] * prob[k] * (1.0 - prob[k]);
    }
    Eigen::MatrixXd H = Z.transpose() * wq.asDiagonal() * Z;
    H.diagonal().array() += cfg.penalty;
    const Eigen::VectorXd grad = Z.transpose() * (w.cwiseProduct(y - prob)) - cfg.penalty * b;
    const Eigen::VectorXd delta = H.llt().solve(grad);

    // Step halving keeps the penalized objective non-decreasing.
    const double obj0 = res.info.objective_trace.back();
    double t = 1.0;
    Eigen::VectorXd candidate = b + delta;
    double obj1 = objective(candidate);
    int halvings = 0;
    while (obj1 < obj0 - 1e-12 * (1.0 + std::fabs(obj0)) && halvings < 40) {
      t *= 0.5;
      ++halvings;
      candidate = b + t * delta;
      obj1 = objective(candidate);
    }
    const double max_change = (candidate - b).cwiseAbs().maxCoeff();
    b = candidate;
    res.info.objective_trace.push_back(obj1);
    res.info.iterations = r + 1;
    if (b.cwiseAbs().maxCoeff() > cfg.blowup_threshold) break;
    if (max_change < cfg.newton_tol) {
      converged = true;
      break;
    }
  }
  res.info.demoted = !converged || b.cwiseAbs().maxCoeff() > cfg.blowup_threshold;
  res.coef = b;
  return res;
}

}  // namespace

LogCoFit fit_logcond(const WeightedSample& sample, const FitConfig& cfg) {
  return fit_logcond(sample, cfg, nullptr);
}

LogCoFit fit_logcond(const WeightedSample& sample, const FitConfig& cfg,
                     const LogCoParams* warm_start) {
  cfg.validate();
  const std::size_t d = sample.dim();
  const std::size_t n = sample.size();
  const MomentSummary moments = compute_moments(sample);
  Structure st = select_structure(moments, cfg);

  std::vector<bool> indep(d, false);
  for (int i : st.independent) indep[static_cast<std::size_t>(i)] = true;

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  std::vector<ComponentFitInfo> report(d);
  std::vector<ComponentResult> results(d);

  std::vector<std::size_t> regressed;
  for (std::size_t i = 0; i < d; ++i)
    if (!indep[i]) regressed.push_back(i);

  parallel_for(regressed.size(), [&](std::size_t t) {
    const std::size_t i = regressed[t];
    const auto& preds = st.predictors[i];
    const double mean_i = moments.mean[static_cast<Eigen::Index>(i)];
    double warm_intercept = logit(clamped_mean(mean_i, n));
    Eigen::VectorXd warm_slopes = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(preds.size()));
    if (warm_start && warm_start->dim() == d) {
      warm_intercept = warm_start->B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
      for (std::size_t c = 0; c < preds.size(); ++c)
        warm_slopes[static_cast<Eigen::Index>(c)] =
            warm_start->B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(preds[c]));
    }
    results[i] = fit_component(sample, static_cast<int>(i), preds, warm_intercept, warm_slopes, cfg);
  });

  for (std::size_t i = 0; i < d; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double mean_i = moments.mean[ii];
    if (indep[i]) {
      const double m = clamped_mean(mean_i, n);
      B(ii, ii) = logit(m);
      report[i].component = static_cast<int>(i);
      report[i].clamped_intercept = (m != mean_i);
      continue;
    }
    ComponentResult& res = results[i];
    if (res.info.demoted) {
      // Strategy: a component whose regression blows up or fails to converge
      // is moved to the independent set and refit as intercept-only.
      const double m = clamped_mean(mean_i, n);
      B(ii, ii) = logit(m);
      res.info.clamped_intercept = (m != mean_i);
      indep[i] = true;
      st.independent.push_back(static_cast<int>(i));
      st.predictors[i].clear();
    } else {
      const auto& preds = st.predictors[i];
      for (std::size_t c = 0; c < preds.size(); ++c)
        B(ii, static_cast<Eigen::Index>(preds[c])) = res.coef[static_cast<Eigen::Index>(c)];
      B(ii, ii) = res.coef[static_cast<Eigen::Index>(preds.size())];
    }
    report[i] = res.info;
  }
  std::sort(st.independent.begin(), st.independent.end());

  return LogCoFit{make_logcond(std::move(B), std::move(st.independent), std::move(st.predictors)),
                  std::move(report)};
}

namespace {
double linear_predictor(const LogCoParams& params, std::size_t i, const std::uint8_t* bits) {
  const auto ii = static_cast<Eigen::Index>(i);
  double eta = params.B(ii, ii);
  for (int j : params.predictors[i])
    if (bits[j]) eta += params.B(ii, static_cast<Eigen::Index>(j));
  return eta;
}
}  // namespace

double logcond_log_eval(const LogCoParams& params, const BinaryVector& g) {
  if (g.dim() != params.dim()) throw ValidationError("dimension mismatch");
  double lp = 0.0;
  for (std::size_t i = 0; i < params.dim(); ++i) {
    const double eta = linear_predictor(params, i, g.bits().data());
    lp += (g[i] ? eta : 0.0) - log1p_exp(eta);
  }
  return lp;
}

ConditionalProvider logcond_conditionals(const LogCoParams& params) {
  const LogCoParams local = params;
  return ConditionalProvider(params.dim(), [local](std::span<const std::uint8_t> prefix) {
    return logit_inverse(linear_predictor(local, prefix.size(), prefix.data()));
  });
}

ChainDraw logcond_sample(const LogCoParams& params, Rng& rng) {
  return chain_rule_sample(logcond_conditionals(params), rng);
}

}  // namespace binfam
