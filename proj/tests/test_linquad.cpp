#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "binfam/chain.hpp"
#include "binfam/errors.hpp"
#include "binfam/linquad.hpp"
#include "binfam/moments.hpp"
#include "binfam/oracle.hpp"
#include "binfam/rng.hpp"

using namespace binfam;

namespace {

LinQuParams random_nonnegative_params(std::size_t d, Rng& rng) {
  Eigen::MatrixXd A(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j) A(i, j) = A(j, i) = (rng.uniform() - 0.5) / static_cast<double>(d);
  const double a0 = A.cwiseAbs().sum() + 0.25;
  return LinQuParams::make(std::move(A), a0);
}

ExplicitDistribution enumerate(const LinQuParams& p) {
  return enumerate_family(p.dim(), [&](const BinaryVector& g) {
    double quad = p.a0();
    for (std::size_t i = 0; i < g.dim(); ++i) {
      if (!g[i]) continue;
      quad += p.A()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
      for (std::size_t j = 0; j < i; ++j)
        if (g[j]) quad += 2.0 * p.A()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    return quad;
  });
}

std::vector<std::vector<int>> subsets_of(std::size_t d) {
  std::vector<std::vector<int>> out;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << d); ++mask) {
    std::vector<int> I;
    for (std::size_t i = 0; i < d; ++i)
      if ((mask >> i) & 1u) I.push_back(static_cast<int>(i));
    out.push_back(std::move(I));
  }
  return out;
}

}  // namespace

TEST_CASE("triangular index is a bijection") {
  const TriangularIndex tri(6);
  std::vector<bool> hit(tri.size(), false);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const std::size_t t = tri.flat(i, j);
      REQUIRE(t < tri.size());
      CHECK_FALSE(hit[t]);
      hit[t] = true;
      const auto [bi, bj] = tri.unflat(t);
      CHECK(bi == i);
      CHECK(bj == j);
    }
  for (bool b : hit) CHECK(b);
}

TEST_CASE("zero interaction matrix gives the uniform distribution") {
  const auto p = LinQuParams::make(Eigen::MatrixXd::Zero(3, 3), 0.7);
  for (const auto& I : subsets_of(3))
    CHECK(linquad_cross_moment(p, I) ==
          doctest::Approx(std::exp2(-static_cast<double>(I.size()))).epsilon(1e-12));
  const std::uint8_t prefix[] = {1, 0};
  CHECK(linquad_marginal(p, {prefix, 2}) == doctest::Approx(0.25).epsilon(1e-12));
  const ConditionalProvider cond = linquad_conditionals(p);
  CHECK(cond({}) == doctest::Approx(0.5));
  CHECK(cond({prefix, 2}) == doctest::Approx(0.5));
}

TEST_CASE("one-dimensional example: masses one quarter and three quarters") {
  Eigen::MatrixXd A(1, 1);
  A << 2.0;
  const auto p = LinQuParams::make(A, 1.0);
  const int zero = 0;
  CHECK(linquad_cross_moment(p, {&zero, 1}) == doctest::Approx(0.75).epsilon(1e-12));
  const auto table = enumerate(p);
  CHECK(table.prob(std::uint64_t{0}) == doctest::Approx(0.25));
  CHECK(table.prob(std::uint64_t{1}) == doctest::Approx(0.75));
  CHECK(linquad_eval(p, BinaryVector{0}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(linquad_eval(p, BinaryVector{1}) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("closed-form cross-moments match enumeration for every index set") {
  Rng rng(31);
  for (int rep = 0; rep < 5; ++rep) {
    const LinQuParams p = random_nonnegative_params(4, rng);
    const auto table = enumerate(p);
    for (const auto& I : subsets_of(4))
      CHECK(std::fabs(linquad_cross_moment(p, I) - cross_moment(table, I)) < 1e-10);
  }
}

TEST_CASE("normalizing constant and mean formulas match enumeration") {
  Rng rng(32);
  for (std::size_t d : {3, 6, 10}) {
    const LinQuParams p = random_nonnegative_params(d, rng);
    double total = 0.0;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << d); ++s) {
      const BinaryVector g = BinaryVector::from_index(s, d);
      double quad = p.a0();
      for (std::size_t i = 0; i < d; ++i) {
        if (!g[i]) continue;
        quad += p.A()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        for (std::size_t j = 0; j < i; ++j)
          if (g[j]) quad += 2.0 * p.A()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
      total += quad;
    }
    CHECK(std::fabs(p.mu() - 1.0 / total) < 1e-10);
    if (d <= 6) {
      const auto table = enumerate(p);
      for (std::size_t i = 0; i < d; ++i) {
        const int idx = static_cast<int>(i);
        CHECK(std::fabs(linquad_mean(p, idx) - cross_moment(table, {&idx, 1})) < 1e-10);
      }
    }
  }
}

TEST_CASE("marginal recursion is consistent and ends at the pointwise mass") {
  Rng rng(33);
  for (int rep = 0; rep < 5; ++rep) {
    const LinQuParams p = random_nonnegative_params(5, rng);
    for (std::size_t k = 0; k < 5; ++k) {
      for (std::uint64_t q = 0; q < (std::uint64_t{1} << k); ++q) {
        std::vector<std::uint8_t> prefix(k);
        for (std::size_t i = 0; i < k; ++i) prefix[i] = static_cast<std::uint8_t>((q >> i) & 1u);
        const double here = linquad_marginal(p, {prefix.data(), prefix.size()});
        prefix.push_back(0);
        const double lo = linquad_marginal(p, {prefix.data(), prefix.size()});
        prefix.back() = 1;
        const double hi = linquad_marginal(p, {prefix.data(), prefix.size()});
        CHECK(std::fabs(here - lo - hi) < 1e-10);
      }
    }
    for (std::uint64_t s = 0; s < 32; ++s) {
      const BinaryVector g = BinaryVector::from_index(s, 5);
      CHECK(std::fabs(linquad_marginal(p, g.bits()) - linquad_eval(p, g)) < 1e-12);
    }
  }
}

TEST_CASE("all-ones prefix marginal equals the closed-form cross moment") {
  Rng rng(34);
  const LinQuParams p = random_nonnegative_params(5, rng);
  for (std::size_t k = 1; k <= 5; ++k) {
    const std::vector<std::uint8_t> prefix(k, 1);
    std::vector<int> I(k);
    for (std::size_t i = 0; i < k; ++i) I[i] = static_cast<int>(i);
    CHECK(std::fabs(linquad_marginal(p, {prefix.data(), k}) - linquad_cross_moment(p, I)) < 1e-10);
  }
}

TEST_CASE("chain-rule joint equals the enumerated table") {
  Rng rng(35);
  for (std::size_t d : {2, 4, 6}) {
    const LinQuParams p = random_nonnegative_params(d, rng);
    const auto table = enumerate(p);
    const ConditionalProvider cond = linquad_conditionals(p);
    for (std::uint64_t s = 0; s < table.states(); ++s) {
      const BinaryVector g = BinaryVector::from_index(s, d);
      double joint = 1.0;
      std::vector<std::uint8_t> prefix;
      for (std::size_t i = 0; i < d; ++i) {
        const double r = cond({prefix.data(), prefix.size()});
        joint *= g[i] ? r : 1.0 - r;
        prefix.push_back(g[i]);
      }
      CHECK(std::fabs(joint - table.prob(s)) < 1e-10);
    }
  }
}

TEST_CASE("moment fit interpolates the sample moments exactly") {
  Rng rng(36);
  // Moments taken from random strictly positive tables are always feasible.
  for (std::size_t d : {2, 4, 8}) {
    std::vector<double> vals(std::size_t{1} << d);
    for (double& v : vals) v = rng.uniform() + 0.01;
    const auto target = ExplicitDistribution::from_signed(d, std::move(vals));
    std::vector<BinaryVector> rows;
    std::vector<double> weights;
    for (std::uint64_t s = 0; s < target.states(); ++s) {
      rows.push_back(BinaryVector::from_index(s, d));
      weights.push_back(target.prob(s));
    }
    const MomentSummary ms = compute_moments(WeightedSample(weights, rows));
    const LinQuFit fit = fit_linquad(ms);
    CHECK(fit.residual < 1e-10);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        std::vector<int> I = {static_cast<int>(i)};
        if (j != i) I.push_back(static_cast<int>(j));
        CHECK(std::fabs(linquad_cross_moment(fit.params, I) -
                        ms.second(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) < 1e-8);
      }
    // Unit total mass in the solved gauge.
    CHECK(std::fabs(std::exp2(static_cast<double>(d) - 2.0) * fit.params.weight_sum() - 1.0) < 1e-10);
  }
}

TEST_CASE("fit on a known family recovers its moments") {
  Rng rng(37);
  const LinQuParams truth = random_nonnegative_params(4, rng);
  const auto table = enumerate(truth);
  std::vector<BinaryVector> rows;
  std::vector<double> weights;
  for (std::uint64_t s = 0; s < table.states(); ++s) {
    rows.push_back(BinaryVector::from_index(s, 4));
    weights.push_back(table.prob(s));
  }
  const WeightedSample sample(weights, rows);
  const MomentSummary ms = compute_moments(sample);
  const LinQuFit fit = fit_linquad(sample);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      std::vector<int> I = {static_cast<int>(i)};
      if (j != i) I.push_back(static_cast<int>(j));
      CHECK(std::fabs(linquad_cross_moment(fit.params, I) -
                      ms.second(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) < 1e-8);
    }
}

TEST_CASE("fit of independent fair coins has vanishing off-diagonals") {
  std::vector<BinaryVector> rows;
  for (std::uint64_t s = 0; s < 16; ++s) rows.push_back(BinaryVector::from_index(s, 4));
  const LinQuFit fit = fit_linquad(WeightedSample::uniform(rows));
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < i; ++j) CHECK(std::fabs(fit.params.A()(i, j)) < 1e-8);
}

TEST_CASE("perfectly anti-correlated pair solves to the boundary distribution") {
  const WeightedSample s({0.5, 0.5}, {BinaryVector{1, 0}, BinaryVector{0, 1}});
  const LinQuFit fit = fit_linquad(s);
  CHECK(fit.residual < 1e-10);
  const double min_mass = linquad_min_mass(fit.params);
  CHECK(min_mass > -1e-12);  // boundary case: zero mass on (0,0) and (1,1)
  const auto table = enumerate(fit.params);
  CHECK(table.prob(std::uint64_t{0b01}) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(table.prob(std::uint64_t{0b11}) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("jointly infeasible negative correlations produce negative mass") {
  // Three components, means one half, all pairwise moments zero: no
  // distribution has these moments, so the fitted function must go negative.
  MomentSummary ms;
  ms.mean = Eigen::VectorXd::Constant(3, 0.5);
  ms.second = Eigen::MatrixXd::Zero(3, 3);
  ms.second.diagonal().setConstant(0.5);
  ms.corr = Eigen::MatrixXd::Identity(3, 3);
  ms.degenerate.assign(3, false);
  const LinQuFit fit = fit_linquad(ms);
  CHECK(fit.residual < 1e-10);
  CHECK(linquad_min_mass(fit.params) < -1e-3);
  CHECK_THROWS_AS(linquad_eval(fit.params, BinaryVector{1, 1, 1}), NegativeMassError);

  bool raised = false;
  const ConditionalProvider cond = linquad_conditionals(fit.params);
  for (std::uint64_t s = 0; s < 8 && !raised; ++s) {
    const BinaryVector g = BinaryVector::from_index(s, 3);
    std::vector<std::uint8_t> prefix;
    try {
      for (std::size_t i = 0; i < 3; ++i) {
        (void)cond({prefix.data(), prefix.size()});
        prefix.push_back(g[i]);
      }
    } catch (const NegativeMassError&) {
      raised = true;
    }
  }
  CHECK(raised);

  // Clamped exploratory mode keeps conditionals inside [0,1].
  const ConditionalProvider forced = linquad_conditionals(fit.params, true);
  for (std::uint64_t s = 0; s < 8; ++s) {
    const BinaryVector g = BinaryVector::from_index(s, 3);
    std::vector<std::uint8_t> prefix;
    for (std::size_t i = 0; i < 3; ++i) {
      const double r = forced({prefix.data(), prefix.size()});
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
      prefix.push_back(g[i]);
    }
  }
}

TEST_CASE("nonpositive weight sum leaves the normalizer undefined") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  const auto p = LinQuParams::make(A, -1.0);
  CHECK_FALSE(p.mu_defined());
  CHECK_THROWS_AS(linquad_eval(p, BinaryVector{0, 0}), NumericalError);
}
