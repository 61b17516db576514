#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ssd/errors.hpp"
#include "ssd/models.hpp"
#include "ssd/parallel.hpp"
#include "ssd/rng.hpp"

namespace ssd {

// First two prior-predictive moments of the posterior variance at sample
// size n: mean_u2 = E_m[u_n^2], sd_u2 = sd_m(u_n^2).
struct MomentPair {
  double mean_u2;
  double sd_u2;
  long n;
};

namespace detail {

inline double lbeta(double x, double y) {
  return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
}

// Exact Beta-Binomial summation of the first two moments of u_n^2 for the
// Bernoulli family. O(n); the pmf is advanced by its exact term ratio
//   pmf(s+1)/pmf(s) = (n-s)/(s+1) * (a+s)/(b+n-s-1)
// in log space, anchored by the exact log pmf at s = 0.
struct BernoulliU2Moments {
  double e_u2;
  double e_u4;
};

inline BernoulliU2Moments beta_binomial_u2_moments(const BetaBernoulli& m,
                                                   long n) {
  double logw = lbeta(m.a, m.b + static_cast<double>(n)) - lbeta(m.a, m.b);
  double e2 = 0.0, e4 = 0.0;
  for (long s = 0;; ++s) {
    double u2 = posterior_variance(m, n, static_cast<double>(s));
    double w = std::exp(logw);
    e2 += w * u2;
    e4 += w * u2 * u2;
    if (s == n) break;
    logw += std::log(static_cast<double>(n - s)) -
            std::log(static_cast<double>(s + 1)) +
            std::log(m.a + static_cast<double>(s)) -
            std::log(m.b + static_cast<double>(n - s - 1));
  }
  return BernoulliU2Moments{e2, e4};
}

}  // namespace detail

// E_m[u_n^2]. Poisson and Normal are closed forms; Bernoulli is an exact
// O(n) summation over the Beta-Binomial support.
inline double expected_posterior_variance(const ConjugateModel& model, long n) {
  detail::require(n >= 1, "expected_posterior_variance: n must be >= 1");
  return std::visit(
      [n](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        double nd = static_cast<double>(n);
        if constexpr (std::is_same_v<T, PoissonGamma>) {
          return m.alpha / (m.beta * (nd + m.beta));
        } else if constexpr (std::is_same_v<T, NormalNig>) {
          double n_lambda = nd + 1.0 / m.lambda;
          return m.beta / (n_lambda * (m.alpha - 1.0));
        } else {
          return detail::beta_binomial_u2_moments(m, n).e_u2;
        }
      },
      model);
}

// sd_m(u_n^2). Factored so nothing overflows for n up to 1e9.
inline double sd_posterior_variance(const ConjugateModel& model, long n) {
  detail::require(n >= 1, "sd_posterior_variance: n must be >= 1");
  return std::visit(
      [n](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        double nd = static_cast<double>(n);
        if constexpr (std::is_same_v<T, PoissonGamma>) {
          double inv = 1.0 / (nd + m.beta);
          return (std::sqrt(m.alpha) / m.beta) * inv * std::sqrt(nd * inv);
        } else if constexpr (std::is_same_v<T, NormalNig>) {
          double n_lambda = nd + 1.0 / m.lambda;
          return m.beta /
                 (n_lambda * (m.alpha - 1.0) * std::sqrt(m.alpha - 2.0)) *
                 std::sqrt(nd / (nd + 2.0 * m.alpha - 2.0));
        } else {
          auto [e2, e4] = detail::beta_binomial_u2_moments(m, n);
          double var = e4 - e2 * e2;
          return var > 0.0 ? std::sqrt(var) : 0.0;
        }
      },
      model);
}

inline MomentPair posterior_variance_moments(const ConjugateModel& model,
                                             long n) {
  if (const auto* bb = std::get_if<BetaBernoulli>(&model)) {
    detail::require(n >= 1, "posterior_variance_moments: n must be >= 1");
    auto [e2, e4] = detail::beta_binomial_u2_moments(*bb, n);
    double var = e4 - e2 * e2;
    return MomentPair{e2, var > 0.0 ? std::sqrt(var) : 0.0, n};
  }
  return MomentPair{expected_posterior_variance(model, n),
                    sd_posterior_variance(model, n), n};
}

// Monte-Carlo estimate of MomentPair with delete-one jackknife standard
// errors. Independent of the closed forms: draws x_n ~ m(x_n) at the data
// level and reduces through posterior_variance.
struct McMoments {
  double mean_u2;
  double sd_u2;
  double se_mean;
  double se_sd;
  long n;
  long replicates;
};

inline McMoments mc_moment_oracle(const ConjugateModel& model, long n,
                                  long replicates, std::uint64_t seed,
                                  int threads = 1) {
  detail::require(n >= 1, "mc_moment_oracle: n must be >= 1");
  detail::require(replicates >= 100,
                  "mc_moment_oracle: replicates must be >= 100 (sample sd "
                  "needs multiple points)");
  std::vector<double> u2(static_cast<std::size_t>(replicates));
  parallel_for(u2.size(), threads, [&](std::size_t r) {
    std::mt19937_64 rng = substream(seed, r);
    DataSample x = prior_predictive_sample(model, n, rng);
    u2[r] = posterior_variance(model, x);
  });

  double rd = static_cast<double>(replicates);
  double s1 = 0.0, s2 = 0.0;
  for (double v : u2) {
    s1 += v;
    s2 += v * v;
  }
  double mean = s1 / rd;
  double var = (s2 - s1 * s1 / rd) / (rd - 1.0);
  double sd = var > 0.0 ? std::sqrt(var) : 0.0;

  // Delete-one jackknife of the sample sd, computed from running totals.
  double jsum = 0.0, jsumsq = 0.0;
  std::vector<double> jack(u2.size());
  for (std::size_t i = 0; i < u2.size(); ++i) {
    double t1 = s1 - u2[i];
    double t2 = s2 - u2[i] * u2[i];
    double vi = (t2 - t1 * t1 / (rd - 1.0)) / (rd - 2.0);
    jack[i] = vi > 0.0 ? std::sqrt(vi) : 0.0;
    jsum += jack[i];
  }
  double jmean = jsum / rd;
  for (double j : jack) jsumsq += (j - jmean) * (j - jmean);
  double se_sd = std::sqrt((rd - 1.0) / rd * jsumsq);
  double se_mean = sd / std::sqrt(rd);

  return McMoments{mean, sd, se_mean, se_sd, n, replicates};
}

}  // namespace ssd
