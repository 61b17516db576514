#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ssd/asymptotics.hpp"
#include "ssd/moments.hpp"
#include "ssd/rng.hpp"

using namespace ssd;

TEST_CASE("closed-form moments on known cases") {
  ConjugateModel football{PoissonGamma(6.25, 2.5)};
  CHECK(expected_posterior_variance(football, 50) ==
        doctest::Approx(0.047619047619047616).epsilon(1e-13));
  CHECK(sd_posterior_variance(football, 50) ==
        doctest::Approx(0.0185885728180673).epsilon(1e-13));

  ConjugateModel music{NormalNig(3.5, 1.0 / 3.0, 6, 15)};
  CHECK(expected_posterior_variance(music, 24) ==
        doctest::Approx(1.0 / 9.0).epsilon(1e-13));
  CHECK(sd_posterior_variance(music, 49) ==
        doctest::Approx(0.026288145486512513).epsilon(1e-13));

  // two-term exact sum: posterior is Beta(2,1) or Beta(1,2), variance 1/18
  ConjugateModel coin{BetaBernoulli(1, 1)};
  CHECK(expected_posterior_variance(coin, 1) ==
        doctest::Approx(1.0 / 18.0).epsilon(1e-13));
}

TEST_CASE("bernoulli exact summation matches 2^n brute force") {
  std::mt19937_64 rng = substream(301);
  std::uniform_real_distribution<double> unif(0.5, 4.0);
  for (int rep = 0; rep < 6; ++rep) {
    BetaBernoulli m(unif(rng), unif(rng));
    for (long n : {1L, 3L, 7L, 12L}) {
      // enumerate every binary outcome; weight = prior predictive of x
      double lb0 = std::lgamma(m.a) + std::lgamma(m.b) -
                   std::lgamma(m.a + m.b);
      double e2 = 0.0, e4 = 0.0;
      for (long bits = 0; bits < (1L << n); ++bits) {
        long s = __builtin_popcountll(static_cast<unsigned long long>(bits));
        double la = m.a + s, lb = m.b + (n - s);
        double logw = std::lgamma(la) + std::lgamma(lb) -
                      std::lgamma(la + lb) - lb0;
        double u2 = posterior_variance(m, n, static_cast<double>(s));
        e2 += std::exp(logw) * u2;
        e4 += std::exp(logw) * u2 * u2;
      }
      ConjugateModel model{m};
      CHECK(expected_posterior_variance(model, n) ==
            doctest::Approx(e2).epsilon(1e-12));
      double sd_bf = std::sqrt(std::max(e4 - e2 * e2, 0.0));
      CHECK(sd_posterior_variance(model, n) ==
            doctest::Approx(sd_bf).epsilon(1e-11));
    }
  }
}

TEST_CASE("closed forms match the Monte-Carlo oracle within 3 jackknife SE") {
  std::mt19937_64 rng = substream(302);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const long reps = 20000;
  for (int draw = 0; draw < 3; ++draw) {
    ConjugateModel models[] = {
        ConjugateModel(PoissonGamma(0.8 + 4.0 * unif(rng),
                                    0.5 + 3.0 * unif(rng))),
        ConjugateModel(NormalNig(unif(rng), 0.2 + unif(rng),
                                 3.0 + 4.0 * unif(rng),
                                 2.0 + 8.0 * unif(rng))),
        ConjugateModel(BetaBernoulli(0.5 + 3.0 * unif(rng),
                                     0.5 + 3.0 * unif(rng)))};
    for (const auto& model : models) {
      for (long n : {1L, 5L, 25L, 100L}) {
        MomentPair cf = posterior_variance_moments(model, n);
        McMoments mc = mc_moment_oracle(model, n, reps,
                                        mix64(1303 + draw + 7 * n), 4);
        CHECK(std::abs(cf.mean_u2 - mc.mean_u2) <= 3.0 * mc.se_mean);
        CHECK(std::abs(cf.sd_u2 - mc.sd_u2) <= 3.0 * mc.se_sd);
      }
    }
  }
}

TEST_CASE("mc oracle preconditions") {
  ConjugateModel m{PoissonGamma(1, 1)};
  CHECK_THROWS_AS(mc_moment_oracle(m, 5, 1, 1), invalid_input);
  CHECK_THROWS_AS(mc_moment_oracle(m, 5, 99, 1), invalid_input);
  CHECK_THROWS_AS(mc_moment_oracle(m, 0, 1000, 1), invalid_input);
}

TEST_CASE("mc oracle is deterministic and thread-count independent") {
  ConjugateModel m{NormalNig(0.5, 0.4, 5, 8)};
  McMoments a = mc_moment_oracle(m, 10, 500, 42, 1);
  McMoments b = mc_moment_oracle(m, 10, 500, 42, 8);
  CHECK(a.mean_u2 == b.mean_u2);
  CHECK(a.sd_u2 == b.sd_u2);
  CHECK(a.se_sd == b.se_sd);
}

TEST_CASE("scaled moments converge to prior moments of the inverse Fisher "
          "information") {
  std::mt19937_64 rng = substream(304);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const long n = 1000000;
  ConjugateModel models[] = {
      ConjugateModel(PoissonGamma(1.0 + 5.0 * unif(rng),
                                  0.5 + 2.0 * unif(rng))),
      ConjugateModel(NormalNig(0.0, 0.5, 3.0 + 3.0 * unif(rng),
                               4.0 + 6.0 * unif(rng))),
      ConjugateModel(BetaBernoulli(0.7 + 2.0 * unif(rng),
                                   0.7 + 2.0 * unif(rng)))};
  for (const auto& model : models) {
    double mean_lim = prior_inv_fisher_mean(model);
    double sd_lim = prior_inv_fisher_sd(model);
    CHECK(n * expected_posterior_variance(model, n) ==
          doctest::Approx(mean_lim).epsilon(0.01));
    CHECK(n * sd_posterior_variance(model, n) ==
          doctest::Approx(sd_lim).epsilon(0.01));
  }
  // n * sd -> sqrt(alpha)/beta, the prior sd of theta
  ConjugateModel football{PoissonGamma(6.25, 2.5)};
  CHECK(n * sd_posterior_variance(football, n) ==
        doctest::Approx(1.0).epsilon(0.001));
}

TEST_CASE("expected posterior variance decreases in n") {
  ConjugateModel models[] = {ConjugateModel(PoissonGamma(6.25, 2.5)),
                             ConjugateModel(NormalNig(3.5, 1.0 / 3.0, 6, 15)),
                             ConjugateModel(BetaBernoulli(2.0, 3.0))};
  for (const auto& model : models) {
    double prev = expected_posterior_variance(model, 1);
    for (long n = 2; n <= 10000; ++n) {
      double cur = expected_posterior_variance(model, n);
      REQUIRE(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("vpvc lhs is not monotone in n") {
  // documented counterexample: tight prior, k = 2
  ConjugateModel m{PoissonGamma(1.0, 10.0)};
  CriterionSpec spec(1.0, 2.0);
  double lhs1 = expected_posterior_variance(m, 1) +
                spec.k * sd_posterior_variance(m, 1);
  double lhs2 = expected_posterior_variance(m, 2) +
                spec.k * sd_posterior_variance(m, 2);
  CHECK(lhs2 > lhs1);
}
