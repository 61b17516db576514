#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ssd/rng.hpp"
#include "ssd/solver.hpp"

using namespace ssd;

namespace {

// random model with hyperparameters in a range that keeps n_eps small
// enough for exhaustive scanning
ConjugateModel random_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  switch (static_cast<int>(unif(rng) * 3)) {
    case 0:
      return PoissonGamma(0.5 + 5.0 * unif(rng), 0.5 + 3.0 * unif(rng));
    case 1:
      return NormalNig(unif(rng) * 4.0, 0.2 + unif(rng),
                       3.0 + 4.0 * unif(rng), 2.0 + 10.0 * unif(rng));
    default:
      return BetaBernoulli(0.5 + 3.0 * unif(rng), 0.5 + 3.0 * unif(rng));
  }
}

double random_epsilon(const ConjugateModel& model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  // anchor on the n = 1 scale so n_eps stays within a few thousand
  double u1 = std::sqrt(expected_posterior_variance(model, 1));
  return u1 * (0.05 + 0.9 * unif(rng));
}

}  // namespace

TEST_CASE("vpvc on the worked examples") {
  SUBCASE("music prior, eps = 20 sec, k = 2") {
    ConjugateModel m{NormalNig(3.5, 1.0 / 3.0, 6, 15)};
    SsdResult r = vpvc_sample_size(m, CriterionSpec(1.0 / 3.0, 2.0));
    CHECK(r.n == 49);
    CHECK(r.lhs_at_n < 1.0 / 9.0);
    REQUIRE(r.lhs_at_n_minus_1.has_value());
    CHECK(*r.lhs_at_n_minus_1 >= 1.0 / 9.0);
  }
  SUBCASE("football prior, eps = 0.3, k = 2") {
    ConjugateModel m{PoissonGamma(6.25, 2.5)};
    SsdResult r = vpvc_sample_size(m, CriterionSpec(0.3, 2.0));
    CHECK(r.n == 47);
    CHECK(r.lhs_at_n ==
          doctest::Approx(0.0898755682664549).epsilon(1e-12));
    CHECK(*r.lhs_at_n_minus_1 ==
          doctest::Approx(0.09170663213049478).epsilon(1e-12));
  }
  SUBCASE("criterion met at the minimal sample size") {
    ConjugateModel m{PoissonGamma(1.0, 10.0)};
    SsdResult r = vpvc_sample_size(m, CriterionSpec(1.0, 0.0));
    CHECK(r.n == 1);
    CHECK_FALSE(r.lhs_at_n_minus_1.has_value());
  }
}

TEST_CASE("apvc on the worked examples") {
  SUBCASE("music prior: strict inequality at the exact boundary gives 25") {
    // lhs(24) equals eps^2 exactly, so the strict criterion moves to 25
    ConjugateModel m{NormalNig(3.5, 1.0 / 3.0, 6, 15)};
    SsdResult r = apvc_sample_size(m, 1.0 / 3.0);
    CHECK(r.n == 25);
    CHECK(*r.lhs_at_n_minus_1 ==
          doctest::Approx(1.0 / 9.0).epsilon(1e-13));
  }
  SUBCASE("football prior") {
    ConjugateModel m{PoissonGamma(6.25, 2.5)};
    SsdResult r = apvc_sample_size(m, 0.3);
    CHECK(r.n == 26);
  }
}

TEST_CASE("apvc agrees with closed-form inversion") {
  std::mt19937_64 rng = substream(401);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    SUBCASE("") {}
    double alpha = 0.5 + 5.0 * unif(rng), beta = 0.5 + 3.0 * unif(rng);
    ConjugateModel m{PoissonGamma(alpha, beta)};
    double eps = random_epsilon(m, rng);
    long n = apvc_sample_size(m, eps).n;
    // smallest integer n >= 1 with n > alpha/(beta eps^2) - beta
    double bound = alpha / (beta * eps * eps) - beta;
    long expect = std::max(1L, static_cast<long>(std::floor(bound)) + 1);
    if (std::floor(bound) == bound) expect = std::max(1L, (long)bound + 1);
    CHECK(n == expect);
  }
  for (int i = 0; i < 50; ++i) {
    double alpha = 3.0 + 4.0 * unif(rng), beta = 2.0 + 10.0 * unif(rng);
    double lambda = 0.2 + unif(rng);
    ConjugateModel m{NormalNig(0.0, lambda, alpha, beta)};
    double eps = random_epsilon(m, rng);
    long n = apvc_sample_size(m, eps).n;
    double bound = beta / ((alpha - 1.0) * eps * eps) - 1.0 / lambda;
    long expect = std::max(1L, static_cast<long>(std::floor(bound)) + 1);
    CHECK(n == expect);
  }
}

TEST_CASE("solver properties over random configurations") {
  std::mt19937_64 rng = substream(402);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int i = 0; i < 100; ++i) {
    ConjugateModel model = random_model(rng);
    double eps = random_epsilon(model, rng);
    double k = 3.0 * unif(rng);
    CriterionSpec spec(eps, k);
    SsdResult r = vpvc_sample_size(model, spec);
    double eps2 = eps * eps;

    // result invariants
    CHECK(r.lhs_at_n < eps2);
    if (r.n > 1) {
      REQUIRE(r.lhs_at_n_minus_1.has_value());
      CHECK(*r.lhs_at_n_minus_1 >= eps2);
    }

    // minimality: no smaller n satisfies the criterion
    if (r.n <= 10000) {
      for (long m = 1; m < r.n; ++m)
        REQUIRE(criterion_lhs(model, spec, m) >= eps2);
    }

    // k = 0 is exactly the apvc
    SsdResult apvc = apvc_sample_size(model, eps);
    SsdResult k0 = vpvc_sample_size(model, CriterionSpec(eps, 0.0));
    CHECK(apvc.n == k0.n);
    CHECK(apvc.lhs_at_n == k0.lhs_at_n);

    // the variance term can only increase the sample size
    CHECK(r.n >= apvc.n);

    // monotone in epsilon
    SsdResult wider = vpvc_sample_size(model, CriterionSpec(1.5 * eps, k));
    CHECK(wider.n <= r.n);

    // monotone in k
    SsdResult bigger_k = vpvc_sample_size(model, CriterionSpec(eps, k + 0.7));
    CHECK(bigger_k.n >= r.n);
  }
}

TEST_CASE("criterion spec validation") {
  CHECK_THROWS_AS(CriterionSpec(0.0, 1.0), invalid_input);
  CHECK_THROWS_AS(CriterionSpec(-1.0, 1.0), invalid_input);
  CHECK_THROWS_AS(CriterionSpec(0.3, -0.1), invalid_input);
  CHECK_THROWS_AS(CriterionSpec(0.3, std::nan("")), invalid_input);
}
