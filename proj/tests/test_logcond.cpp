#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "binfam/errors.hpp"
#include "binfam/logcond.hpp"
#include "binfam/moments.hpp"
#include "binfam/oracle.hpp"
#include "binfam/product.hpp"
#include "binfam/rng.hpp"

using namespace binfam;

namespace {

WeightedSample draws_from(const LogCoParams& truth, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<BinaryVector> rows;
  rows.reserve(n);
  for (std::size_t k = 0; k < n; ++k) rows.push_back(logcond_sample(truth, rng).value);
  return WeightedSample::uniform(std::move(rows));
}

MomentSummary synthetic_moments(const Eigen::VectorXd& mean, const Eigen::MatrixXd& corr) {
  MomentSummary ms;
  ms.mean = mean;
  ms.corr = corr;
  const Eigen::Index d = mean.size();
  ms.second = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    ms.second(i, i) = mean[i];
    for (Eigen::Index j = 0; j < i; ++j) {
      const double sd = std::sqrt(mean[i] * (1 - mean[i]) * mean[j] * (1 - mean[j]));
      ms.second(i, j) = ms.second(j, i) = corr(i, j) * sd + mean[i] * mean[j];
    }
  }
  ms.degenerate.assign(static_cast<std::size_t>(d), false);
  return ms;
}

}  // namespace

TEST_CASE("structure selection thresholds") {
  FitConfig cfg;

  {
    Eigen::VectorXd mean = Eigen::VectorXd::Constant(3, 0.5);
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(3, 3);
    corr(1, 0) = corr(0, 1) = 0.05;
    const Structure st = select_structure(synthetic_moments(mean, corr), cfg);
    CHECK(st.independent.empty());
    for (const auto& preds : st.predictors) CHECK(preds.empty());
  }
  {
    Eigen::VectorXd mean(3);
    mean << 0.5, 0.5, 0.995;
    const Structure st = select_structure(synthetic_moments(mean, Eigen::MatrixXd::Identity(3, 3)), cfg);
    REQUIRE(st.independent.size() == 1);
    CHECK(st.independent[0] == 2);
  }
  {
    Eigen::VectorXd mean = Eigen::VectorXd::Constant(3, 0.4);
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(3, 3);
    corr(1, 0) = corr(0, 1) = 0.5;
    corr(2, 0) = corr(0, 2) = 0.05;
    corr(2, 1) = corr(1, 2) = 0.3;
    const Structure st = select_structure(synthetic_moments(mean, corr), cfg);
    CHECK(st.independent.empty());
    CHECK(st.predictors[1] == std::vector<int>{0});
    CHECK(st.predictors[2] == std::vector<int>{1});
  }
  // Independent components are not used as predictors.
  {
    Eigen::VectorXd mean(3);
    mean << 0.999, 0.4, 0.4;
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(3, 3);
    corr(1, 0) = corr(0, 1) = 0.9;
    corr(2, 1) = corr(1, 2) = 0.4;
    const Structure st = select_structure(synthetic_moments(mean, corr), cfg);
    CHECK(st.independent == std::vector<int>{0});
    CHECK(st.predictors[1].empty());
    CHECK(st.predictors[2] == std::vector<int>{1});
  }
}

TEST_CASE("diagonal parameter reproduces the product family") {
  Eigen::VectorXd m(4);
  m << 0.2, 0.45, 0.6, 0.8;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(4, 4);
  for (Eigen::Index i = 0; i < 4; ++i) B(i, i) = logit(m[i]);
  const LogCoParams p = make_logcond_dense(B);
  const ProductParams prod{m};
  for (std::uint64_t s = 0; s < 16; ++s) {
    const BinaryVector g = BinaryVector::from_index(s, 4);
    CHECK(std::exp(logcond_log_eval(p, g)) == doctest::Approx(product_eval(prod, g)).epsilon(1e-12));
  }
}

TEST_CASE("zero parameter is the uniform distribution") {
  const LogCoParams p = make_logcond_dense(Eigen::MatrixXd::Zero(3, 3));
  for (std::uint64_t s = 0; s < 8; ++s)
    CHECK(logcond_log_eval(p, BinaryVector::from_index(s, 3)) ==
          doctest::Approx(-3.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("chain masses sum to one") {
  Rng rng(51);
  for (std::size_t d : {8, 10}) {
    Eigen::MatrixXd B(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    B.setZero();
    for (Eigen::Index i = 0; i < B.rows(); ++i)
      for (Eigen::Index j = 0; j <= i; ++j) B(i, j) = 2.0 * (rng.uniform() - 0.5);
    const LogCoParams p = make_logcond_dense(B);
    double total = 0.0;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << d); ++s)
      total += std::exp(logcond_log_eval(p, BinaryVector::from_index(s, d)));
    CHECK(std::fabs(total - 1.0) < 1e-10);
  }
}

TEST_CASE("sampled probability equals the evaluated mass") {
  Rng rng(52);
  Eigen::MatrixXd B(5, 5);
  B.setZero();
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) B(i, j) = 1.4 * (rng.uniform() - 0.5);
  const LogCoParams p = make_logcond_dense(B);
  Rng draw_rng(53);
  for (int k = 0; k < 10000; ++k) {
    const ChainDraw draw = logcond_sample(p, draw_rng);
    CHECK(std::fabs(draw.prob - std::exp(logcond_log_eval(p, draw.value))) < 1e-12);
  }
}

TEST_CASE("fit on product data recovers intercepts and near-zero slopes") {
  Eigen::VectorXd m(3);
  m << 0.3, 0.5, 0.7;
  Eigen::MatrixXd B0 = Eigen::MatrixXd::Zero(3, 3);
  for (Eigen::Index i = 0; i < 3; ++i) B0(i, i) = logit(m[i]);
  const LogCoParams truth = make_logcond_dense(B0);
  const std::size_t n = 100000;
  const WeightedSample sample = draws_from(truth, n, 54);

  FitConfig cfg;
  cfg.delta_corr = 0.005;  // force the saturated structure so slopes are estimated
  const LogCoFit fit = fit_logcond(sample, cfg);
  for (Eigen::Index i = 0; i < 3; ++i) {
    const double se = 3.0 / std::sqrt(static_cast<double>(n) * m[i] * (1.0 - m[i]));
    CHECK(std::fabs(fit.params.B(i, i) - logit(m[i])) < 3.0 * se);
    for (Eigen::Index j = 0; j < i; ++j) CHECK(std::fabs(fit.params.B(i, j)) < 0.1);
  }
}

TEST_CASE("fit recovers the conditionals of a known chain") {
  Eigen::MatrixXd B0(3, 3);
  B0 << 0.4, 0.0, 0.0,
        1.1, -0.6, 0.0,
        -0.9, 1.3, 0.3;
  const LogCoParams truth = make_logcond_dense(B0);
  const WeightedSample sample = draws_from(truth, 100000, 55);

  FitConfig cfg;
  cfg.delta_corr = 0.01;
  const LogCoFit fit = fit_logcond(sample, cfg);

  const ConditionalProvider fitted = logcond_conditionals(fit.params);
  const ConditionalProvider exact = logcond_conditionals(truth);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::uint64_t q = 0; q < (std::uint64_t{1} << i); ++q) {
      std::vector<std::uint8_t> prefix(i);
      for (std::size_t t = 0; t < i; ++t) prefix[t] = static_cast<std::uint8_t>((q >> t) & 1u);
      CHECK(std::fabs(fitted({prefix.data(), i}) - exact({prefix.data(), i})) < 0.02);
    }
  }
}

TEST_CASE("complete separation terminates and yields a valid distribution") {
  // Second column equals the first in every row.
  Rng rng(56);
  std::vector<BinaryVector> rows;
  for (int k = 0; k < 400; ++k) {
    const bool a = rng.uniform() < 0.5;
    BinaryVector g(3);
    g.set(0, a);
    g.set(1, a);
    g.set(2, rng.uniform() < 0.3);
    rows.push_back(std::move(g));
  }
  FitConfig cfg;
  cfg.delta_corr = 0.05;
  const LogCoFit fit = fit_logcond(WeightedSample::uniform(rows), cfg);

  bool bounded = true;
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      if (std::fabs(fit.params.B(i, j)) > cfg.blowup_threshold) bounded = false;
  const bool demoted = !fit.params.independent.empty();
  CHECK((bounded || demoted));

  double total = 0.0;
  for (std::uint64_t s = 0; s < 8; ++s)
    total += std::exp(logcond_log_eval(fit.params, BinaryVector::from_index(s, 3)));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("constant columns become clamped intercept-only components") {
  std::vector<BinaryVector> rows(50, BinaryVector{1, 0});
  for (int k = 0; k < 50; ++k) rows.push_back(BinaryVector{1, 1});
  const LogCoFit fit = fit_logcond(WeightedSample::uniform(rows), FitConfig{});
  REQUIRE(!fit.params.independent.empty());
  CHECK(fit.params.independent[0] == 0);
  CHECK(std::isfinite(fit.params.B(0, 0)));
  CHECK(fit.report[0].clamped_intercept);
  double total = 0.0;
  for (std::uint64_t s = 0; s < 4; ++s)
    total += std::exp(logcond_log_eval(fit.params, BinaryVector::from_index(s, 2)));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("penalized objective never decreases across accepted steps") {
  Eigen::MatrixXd B0(2, 2);
  B0 << 0.5, 0.0, 1.2, -0.8;
  const LogCoParams truth = make_logcond_dense(B0);
  const WeightedSample sample = draws_from(truth, 5000, 57);
  FitConfig cfg;
  cfg.delta_corr = 0.01;
  const LogCoFit fit = fit_logcond(sample, cfg);
  for (const auto& info : fit.report)
    for (std::size_t r = 1; r < info.objective_trace.size(); ++r)
      CHECK(info.objective_trace[r] >=
            info.objective_trace[r - 1] - 1e-9 * (1.0 + std::fabs(info.objective_trace[r - 1])));
}

TEST_CASE("warm start converges to the same chain") {
  Eigen::MatrixXd B0(3, 3);
  B0 << 0.2, 0.0, 0.0, 0.8, -0.5, 0.0, 0.3, 0.9, -0.2;
  const LogCoParams truth = make_logcond_dense(B0);
  const WeightedSample sample = draws_from(truth, 20000, 58);
  FitConfig cfg;
  cfg.delta_corr = 0.01;
  const LogCoFit cold = fit_logcond(sample, cfg);
  const LogCoFit warm = fit_logcond(sample, cfg, &cold.params);
  CHECK((warm.params.B - cold.params.B).cwiseAbs().maxCoeff() < 5.0 * cfg.newton_tol);
  for (const auto& info : warm.report) CHECK(info.iterations <= cfg.max_iter);
}

TEST_CASE("newton engine reproduces the closed-form weighted logit") {
  // Binary predictor, so the regression is saturated and the weighted
  // maximum-likelihood coefficients have a closed form from the 2x2 table:
  // intercept log(w01/w00) = -1.1631508098056806, slope
  // log(w11/w10) - intercept = 1.7692866133759961 (frozen reference values,
  // cross-checked against an external IRLS implementation).
  const int xs[16] = {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1};
  const int ys[16] = {0, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 1, 0, 1, 1, 0};
  const double ws[16] = {1.0, 2.0, 1.0, 1.5, 0.5, 1.0, 1.0, 2.5,
                         1.0, 1.0, 2.0, 0.5, 1.5, 1.0, 1.0, 0.5};
  std::vector<BinaryVector> rows;
  std::vector<double> weights;
  for (int k = 0; k < 16; ++k) {
    BinaryVector g(2);
    g.set(0, xs[k]);
    g.set(1, ys[k]);
    rows.push_back(std::move(g));
    weights.push_back(ws[k]);
  }
  FitConfig cfg;
  cfg.delta_corr = 0.01;
  cfg.penalty = 1e-12;
  cfg.newton_tol = 1e-12;
  cfg.max_iter = 100;
  const LogCoFit fit = fit_logcond(WeightedSample(weights, rows), cfg);
  REQUIRE(fit.params.predictors[1] == std::vector<int>{0});
  CHECK(fit.params.B(1, 1) == doctest::Approx(-1.1631508098056806).epsilon(1e-9));
  CHECK(fit.params.B(1, 0) == doctest::Approx(1.7692866133759961).epsilon(1e-9));
}

TEST_CASE("a weight of two equals a duplicated row") {
  Rng rng(59);
  std::vector<BinaryVector> base;
  for (int k = 0; k < 120; ++k) {
    BinaryVector g(3);
    g.set(0, rng.uniform() < 0.5);
    g.set(1, rng.uniform() < (g[0] ? 0.7 : 0.3));
    g.set(2, rng.uniform() < 0.45);
    base.push_back(std::move(g));
  }
  std::vector<double> weights(base.size(), 1.0);
  weights[7] = 2.0;
  const WeightedSample weighted(weights, base);
  std::vector<BinaryVector> duplicated = base;
  duplicated.push_back(base[7]);
  const WeightedSample twice = WeightedSample::uniform(duplicated);

  FitConfig cfg;
  cfg.delta_corr = 0.02;
  const LogCoFit a = fit_logcond(weighted, cfg);
  const LogCoFit b = fit_logcond(twice, cfg);
  CHECK((a.params.B - b.params.B).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("parameter construction validates the sparsity pattern") {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 3);
  B(2, 0) = 0.5;
  CHECK_THROWS_AS(make_logcond(B, {}, {{}, {}, {}}), ValidationError);
  CHECK_NOTHROW(make_logcond(B, {}, {{}, {}, {0}}));
  CHECK_THROWS_AS(make_logcond(B, {2}, {{}, {}, {0}}), ValidationError);
  Eigen::MatrixXd upper = Eigen::MatrixXd::Zero(2, 2);
  upper(0, 1) = 0.3;
  CHECK_THROWS_AS(make_logcond(upper, {}, {{}, {}}), ValidationError);
}
