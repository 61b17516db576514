#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ssd/asymptotics.hpp"
#include "ssd/moments.hpp"
#include "ssd/rng.hpp"
#include "ssd/solver.hpp"

using namespace ssd;

TEST_CASE("gamma coefficient closed forms") {
  CHECK(gamma_coefficient(ConjugateModel(PoissonGamma(6.25, 2.5))) ==
        doctest::Approx(0.4).epsilon(1e-13));
  CHECK(gamma_coefficient(ConjugateModel(NormalNig(3.5, 1.0 / 3.0, 6, 15))) ==
        doctest::Approx(0.5).epsilon(1e-13));
  CHECK(gamma_coefficient(ConjugateModel(BetaBernoulli(1, 1))) ==
        doctest::Approx(0.447213595499958).epsilon(1e-12));
}

TEST_CASE("bernoulli gamma matches a Monte-Carlo estimate over the prior") {
  ConjugateModel m{BetaBernoulli(2.0, 3.0)};
  std::mt19937_64 rng = substream(501);
  const long reps = 400000;
  double s1 = 0.0, s2 = 0.0;
  for (long i = 0; i < reps; ++i) {
    double g = fisher_inverse(prior_draw(m, rng));
    s1 += g;
    s2 += g * g;
  }
  double mean = s1 / reps;
  double sd = std::sqrt(s2 / reps - mean * mean);
  CHECK(gamma_coefficient(m) == doctest::Approx(sd / mean).epsilon(0.01));
}

TEST_CASE("asymptotic sample size") {
  ConjugateModel football{PoissonGamma(6.25, 2.5)};
  AsymptoticSummary a = asymptotic_sample_size(football, CriterionSpec(0.3, 2));
  CHECK(a.gamma == doctest::Approx(0.4).epsilon(1e-13));
  CHECK(a.e_pi_inv_fisher == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(a.s_infinity == doctest::Approx(4.5).epsilon(1e-13));
  CHECK(a.n_asymptotic == doctest::Approx(50.0).epsilon(1e-12));

  ConjugateModel music{NormalNig(3.5, 1.0 / 3.0, 6, 15)};
  AsymptoticSummary b =
      asymptotic_sample_size(music, CriterionSpec(1.0 / 3.0, 2));
  CHECK(b.n_asymptotic == doctest::Approx(54.0).epsilon(1e-12));

  // k = 0 drops the gamma term
  AsymptoticSummary c =
      asymptotic_sample_size(music, CriterionSpec(1.0 / 3.0, 0));
  CHECK(c.n_asymptotic == doctest::Approx(9.0 * 3.0).epsilon(1e-12));
}

TEST_CASE("coefficient of variation converges to gamma") {
  std::mt19937_64 rng = substream(502);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const long n = 1000000;
  for (int i = 0; i < 3; ++i) {
    ConjugateModel models[] = {
        ConjugateModel(PoissonGamma(0.8 + 5.0 * unif(rng),
                                    0.5 + 3.0 * unif(rng))),
        ConjugateModel(NormalNig(unif(rng), 0.3 + unif(rng),
                                 3.0 + 4.0 * unif(rng),
                                 2.0 + 9.0 * unif(rng))),
        ConjugateModel(BetaBernoulli(0.6 + 3.0 * unif(rng),
                                     0.6 + 3.0 * unif(rng)))};
    for (const auto& model : models) {
      double c_n = sd_posterior_variance(model, n) /
                   expected_posterior_variance(model, n);
      double g = gamma_coefficient(model);
      CHECK(std::abs(c_n - g) < 0.01 * g);
    }
  }
}

TEST_CASE("point-mass prior limit has gamma -> 0") {
  for (double sd : {0.1, 0.01, 0.001}) {
    ConjugateModel m{PoissonGamma::from_marginal_moments(2.5, sd)};
    CHECK(gamma_coefficient(m) == doctest::Approx(sd / 2.5).epsilon(1e-10));
  }
}

TEST_CASE("k_star on the case-study priors") {
  ConjugateModel football{PoissonGamma::from_marginal_moments(2.5, 1.0)};
  ThresholdReport f = k_star(football, TrueParameter(PoissonTruth(2.71)));
  CHECK(f.k_star == doctest::Approx(0.21).epsilon(1e-10));
  CHECK(f.rho == doctest::Approx(2.71 / 2.5 - 1.0).epsilon(1e-12));

  ConjugateModel music{NormalNig::from_marginal_moments(3.0, 1.5, 1.0, 3.5)};
  ThresholdReport s = k_star(music, TrueParameter(NormalTruth(4.17, 4.05)));
  CHECK(s.k_star == doctest::Approx(0.70).epsilon(1e-10));

  // truth below the prior mean of the inverse information clamps to zero
  ThresholdReport z = k_star(football, TrueParameter(PoissonTruth(2.0)));
  CHECK(z.k_star == 0.0);
  CHECK(z.rho < 0.0);

  CHECK_THROWS_AS(k_star(football, TrueParameter(NormalTruth(0, 1))),
                  invalid_input);
}

TEST_CASE("k_star is invariant under joint rescaling of the poisson setup") {
  for (double c : {0.5, 2.0, 7.0}) {
    ConjugateModel base{PoissonGamma::from_marginal_moments(2.5, 1.0)};
    ConjugateModel scaled{
        PoissonGamma::from_marginal_moments(2.5 * c, 1.0 * c)};
    double k0 = k_star(base, TrueParameter(PoissonTruth(2.71))).k_star;
    double kc = k_star(scaled, TrueParameter(PoissonTruth(2.71 * c))).k_star;
    CHECK(kc == doctest::Approx(k0).epsilon(1e-12));
  }
}

TEST_CASE("k_star upper bound over a region") {
  ConjugateModel music{NormalNig::from_marginal_moments(3.0, 1.5, 1.0, 3.5)};
  SUBCASE("one and two marginal sds around the prior mean") {
    CHECK(k_star_upper_bound(music, default_region(music, 1.0)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // two sds reaches below zero and is clipped to the domain
    ParameterInterval two = default_region(music, 2.0);
    CHECK(two.lo == 0.0);
    CHECK(two.hi == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(k_star_upper_bound(music, two) ==
          doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("poisson corner evaluation") {
    ConjugateModel football{PoissonGamma::from_marginal_moments(2.5, 1.0)};
    CHECK(k_star_upper_bound(football, ParameterInterval{1.5, 3.5}) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("bernoulli takes the p closest to 1/2") {
    ConjugateModel coin{BetaBernoulli(2.0, 6.0)};
    double at_half = k_star(coin, TrueParameter(BernoulliTruth(0.5))).k_star;
    CHECK(k_star_upper_bound(coin, ParameterInterval{0.1, 0.9}) ==
          doctest::Approx(at_half).epsilon(1e-12));
    double at_04 = k_star(coin, TrueParameter(BernoulliTruth(0.4))).k_star;
    CHECK(k_star_upper_bound(coin, ParameterInterval{0.1, 0.4}) ==
          doctest::Approx(at_04).epsilon(1e-12));
  }
  SUBCASE("regions outside the domain error") {
    ConjugateModel football{PoissonGamma(6.25, 2.5)};
    CHECK_THROWS_AS(k_star_upper_bound(football, ParameterInterval{-2, -1}),
                    invalid_input);
    CHECK_THROWS_AS(k_star_upper_bound(football, ParameterInterval{3, 1}),
                    invalid_input);
  }
}

TEST_CASE("solver approaches the asymptotic sample size") {
  ConjugateModel music{NormalNig::from_marginal_moments(3.0, 1.5, 1.0, 3.5)};
  double prev_gap = 1e9;
  for (double eps : {0.3, 0.1, 0.05}) {
    CriterionSpec spec(eps, 2.0);
    double ratio = static_cast<double>(vpvc_sample_size(music, spec).n) /
                   asymptotic_sample_size(music, spec).n_asymptotic;
    double gap = std::abs(ratio - 1.0);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 0.02);
}
