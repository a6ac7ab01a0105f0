#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "binfam/errors.hpp"
#include "binfam/expquad.hpp"
#include "binfam/moments.hpp"
#include "binfam/oracle.hpp"
#include "binfam/product.hpp"
#include "binfam/rng.hpp"

using namespace binfam;

namespace {

ExpQuParams random_params(std::size_t d, Rng& rng, double scale = 0.8) {
  Eigen::MatrixXd A(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j) A(i, j) = A(j, i) = scale * 2.0 * (rng.uniform() - 0.5);
  return make_expquad(std::move(A));
}

ExplicitDistribution enumerate(const ExpQuParams& p) {
  return enumerate_family_log(p.dim(),
                              [&](const BinaryVector& g) { return expquad_log_eval_unnorm(p, g); });
}

}  // namespace

TEST_CASE("unnormalized log mass is the quadratic form") {
  Eigen::MatrixXd A(2, 2);
  A << 0.5, 0.3, 0.3, -0.2;
  const ExpQuParams p{A};
  CHECK(expquad_log_eval_unnorm(p, BinaryVector{0, 0}) == 0.0);
  CHECK(expquad_log_eval_unnorm(p, BinaryVector{1, 0}) == doctest::Approx(0.5));
  CHECK(expquad_log_eval_unnorm(p, BinaryVector{1, 1}) == doctest::Approx(0.5 + 0.6 - 0.2));
  Eigen::MatrixXd bad(2, 2);
  bad << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(make_expquad(bad), ValidationError);
}

TEST_CASE("diagonal of logits is the product family up to normalization") {
  Eigen::VectorXd m(4);
  m << 0.15, 0.4, 0.6, 0.85;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
  for (Eigen::Index i = 0; i < 4; ++i) A(i, i) = logit(m[i]);
  const auto table = enumerate(ExpQuParams{A});
  const ProductParams prod{m};
  for (std::uint64_t s = 0; s < 16; ++s)
    CHECK(table.prob(s) ==
          doctest::Approx(product_eval(prod, BinaryVector::from_index(s, 4))).epsilon(1e-12));
}

TEST_CASE("normalized masses sum to one") {
  Rng rng(41);
  const auto table = enumerate(random_params(3, rng));
  double total = 0.0;
  for (std::uint64_t s = 0; s < 8; ++s) total += table.prob(s);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reduction step is exact when the coupling block vanishes") {
  Rng rng(42);
  for (std::size_t d : {2, 4, 6}) {
    ExpQuParams p = random_params(d, rng);
    const auto last = static_cast<Eigen::Index>(d) - 1;
    for (Eigen::Index j = 0; j < last; ++j) p.A(last, j) = p.A(j, last) = 0.0;
    const TaylorStep step = taylor_marginal_step(p.A);
    CHECK((step.reduced - p.A.topLeftCorner(last, last)).cwiseAbs().maxCoeff() == 0.0);
    const double c = p.A(last, last);
    CHECK(step.log_factor == doctest::Approx(std::log1p(std::exp(c))).epsilon(1e-12));

    std::vector<int> head(d - 1);
    std::iota(head.begin(), head.end(), 0);
    const ExplicitDistribution exact = marginalize(enumerate(p), head);
    const ExplicitDistribution approx = enumerate(ExpQuParams{step.reduced});
    for (std::uint64_t s = 0; s < exact.states(); ++s)
      CHECK(std::fabs(exact.prob(s) - approx.prob(s)) < 1e-12);
  }
}

TEST_CASE("reduction step with zero corner entry") {
  Eigen::MatrixXd A(3, 3);
  A << 0.4, 0.1, 0.2,
       0.1, -0.3, 0.5,
       0.2, 0.5, 0.0;  // c = 0
  const TaylorStep step = taylor_marginal_step(A);
  const Eigen::VectorXd b = A.topRightCorner(2, 1);
  Eigen::MatrixXd expect = A.topLeftCorner(2, 2);
  expect.diagonal() += b;  // tanh(0) = 0
  expect += 0.5 * b * b.transpose();  // sech(0) = 1
  CHECK((step.reduced - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("frozen golden bound for the two-dimensional reduction error") {
  Eigen::MatrixXd A(2, 2);
  A << 0.5, 0.3, 0.3, -0.2;
  const ExpQuParams p{A};
  const TaylorStep step = taylor_marginal_step(p.A);
  const int first = 0;
  const ExplicitDistribution exact = marginalize(enumerate(p), {&first, 1});
  const ExplicitDistribution approx = enumerate(ExpQuParams{step.reduced});
  double err = 0.0;
  for (std::uint64_t s = 0; s < 2; ++s)
    err = std::max(err, std::fabs(exact.prob(s) - approx.prob(s)));
  // Golden value frozen from the first enumeration of this case.
  CHECK(err == doctest::Approx(4.7602612938457689e-05).epsilon(1e-9));
  CHECK(err < 4.8e-5);
}

TEST_CASE("proxy of a diagonal matrix is the product family") {
  const std::size_t d = 10;
  Eigen::VectorXd m(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) m[static_cast<Eigen::Index>(i)] = 0.08 + 0.084 * static_cast<double>(i);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < A.rows(); ++i) A(i, i) = logit(m[i]);
  const ProxyChain chain = build_proxy(ExpQuParams{A});
  const ProductParams prod{m};
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << d); ++s) {
    const BinaryVector g = BinaryVector::from_index(s, d);
    CHECK(std::exp(proxy_log_eval(chain, g)) ==
          doctest::Approx(product_eval(prod, g)).epsilon(1e-12));
  }
}

TEST_CASE("one-dimensional proxy is a single logistic unit") {
  Eigen::MatrixXd A(1, 1);
  A << 0.85;
  const ProxyChain chain = build_proxy(ExpQuParams{A});
  CHECK(chain.intercepts[0] == doctest::Approx(0.85));
  CHECK(std::exp(proxy_log_eval(chain, BinaryVector{1})) ==
        doctest::Approx(logit_inverse(0.85)).epsilon(1e-12));
}

TEST_CASE("two-dimensional proxy conditional carries the doubled coupling") {
  Eigen::MatrixXd A(2, 2);
  A << 0.2, 0.7, 0.7, -0.4;
  const ExpQuParams p{A};
  const ProxyChain chain = build_proxy(p);
  // The conditional of the second component is exact: mass ratio of the
  // enumerated family.
  const auto table = enumerate(p);
  const double exact_cond = table.prob(std::uint64_t{0b11}) /
                            (table.prob(std::uint64_t{0b11}) + table.prob(std::uint64_t{0b01}));
  const ConditionalProvider cond = proxy_conditionals(chain);
  const std::uint8_t one[] = {1};
  CHECK(cond({one, 1}) == doctest::Approx(exact_cond).epsilon(1e-12));
}

TEST_CASE("proxy conditionals are strictly inside the unit interval") {
  Rng rng(43);
  const ExpQuParams p = random_params(6, rng, 2.5);
  const ProxyChain chain = build_proxy(p);
  const ConditionalProvider cond = proxy_conditionals(chain);
  for (std::uint64_t s = 0; s < 64; ++s) {
    const BinaryVector g = BinaryVector::from_index(s, 6);
    std::vector<std::uint8_t> prefix;
    for (std::size_t i = 0; i < 6; ++i) {
      const double r = cond({prefix.data(), prefix.size()});
      CHECK(r > 0.0);
      CHECK(r < 1.0);
      prefix.push_back(g[i]);
    }
  }
  // A valid distribution even when the approximation is poor.
  double total = 0.0;
  for (std::uint64_t s = 0; s < 64; ++s)
    total += std::exp(proxy_log_eval(chain, BinaryVector::from_index(s, 6)));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("proxy total variation is finite and bitwise reproducible") {
  Rng rng(44);
  const ExpQuParams p = random_params(5, rng);
  const double tv1 = proxy_tv_distance(p, build_proxy(p));
  const double tv2 = proxy_tv_distance(p, build_proxy(p));
  CHECK(tv1 == tv2);
  CHECK(tv1 >= 0.0);
  CHECK(tv1 <= 1.0);
}

TEST_CASE("permuted proxy stays a valid distribution over original components") {
  Rng rng(45);
  const ExpQuParams p = random_params(4, rng);
  const std::vector<int> order = {3, 1, 0, 2};
  const ProxyChain chain = build_proxy(p, order);
  double total = 0.0;
  for (std::uint64_t s = 0; s < 16; ++s)
    total += std::exp(proxy_log_eval(chain, BinaryVector::from_index(s, 4)));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  Rng draw_rng(46);
  const ChainDraw draw = proxy_sample(chain, draw_rng);
  CHECK(draw.prob == doctest::Approx(std::exp(proxy_log_eval(chain, draw.value))).epsilon(1e-12));
  const std::vector<int> bad = {0, 0, 1, 2};
  CHECK_THROWS_AS(build_proxy(p, bad), ValidationError);
}

TEST_CASE("least squares recovers the generating matrix on a full design") {
  Rng rng(47);
  const ExpQuParams truth = random_params(4, rng);
  std::vector<BinaryVector> rows;
  std::vector<double> targets;
  for (std::uint64_t s = 0; s < 16; ++s) {
    const BinaryVector g = BinaryVector::from_index(s, 4);
    rows.push_back(g);
    targets.push_back(expquad_log_eval_unnorm(truth, g) - 1.37);  // unnormalized offset
  }
  const WeightedSample sample = WeightedSample::uniform(rows);
  const ExpQuFit fit = fit_expquad(sample, targets);
  CHECK(fit.residual < 1e-8);
  CHECK_FALSE(fit.rank_deficient);
  CHECK((fit.params.A - truth.A).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(fit.intercept == doctest::Approx(-1.37).epsilon(1e-8));
}

TEST_CASE("constant targets are fit exactly by the intercept") {
  std::vector<BinaryVector> rows;
  std::vector<double> targets;
  for (std::uint64_t s = 0; s < 8; ++s) {
    rows.push_back(BinaryVector::from_index(s, 3));
    targets.push_back(2.5);
  }
  const ExpQuFit fit = fit_expquad(WeightedSample::uniform(rows), targets);
  CHECK(fit.residual < 1e-10);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < i; ++j) CHECK(std::fabs(fit.params.A(i, j)) < 1e-10);
}

TEST_CASE("duplicate rows trigger the rank-deficiency flag") {
  std::vector<BinaryVector> rows(6, BinaryVector{1, 0, 1});
  std::vector<double> targets(6, 0.3);
  const ExpQuFit fit = fit_expquad(WeightedSample::uniform(rows), targets);
  CHECK(fit.rank_deficient);
  CHECK(fit.residual < 1e-10);
}

TEST_CASE("residual stays at zero as model-consistent rows are added") {
  Rng rng(48);
  const ExpQuParams truth = random_params(3, rng);
  std::vector<BinaryVector> rows;
  std::vector<double> targets;
  double previous = 0.0;
  for (std::uint64_t s = 0; s < 8; ++s) {
    rows.push_back(BinaryVector::from_index(s, 3));
    targets.push_back(expquad_log_eval_unnorm(truth, rows.back()));
    if (rows.size() < 2) continue;
    const ExpQuFit fit = fit_expquad(WeightedSample::uniform(rows), targets);
    CHECK(fit.residual < 1e-8);
    CHECK(fit.residual >= previous - 1e-9);  // consistent data keeps it flat
    previous = fit.residual;
  }
}

TEST_CASE("log-target length must match the sample") {
  std::vector<BinaryVector> rows(3, BinaryVector{1, 0});
  std::vector<double> targets(2, 0.0);
  CHECK_THROWS_AS(fit_expquad(WeightedSample::uniform(rows), targets), ValidationError);
}
