#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "ssd/errors.hpp"

namespace ssd {

enum class Family { poisson, normal, bernoulli };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::poisson: return "poisson";
    case Family::normal: return "normal";
    case Family::bernoulli: return "bernoulli";
  }
  return "?";
}

namespace detail {
inline void require(bool ok, const std::string& msg) {
  if (!ok) throw invalid_input(msg);
}
inline bool is_finite(double x) { return std::isfinite(x); }
}  // namespace detail

// ---------------------------------------------------------------------------
// Conjugate families. Hyperparameters are validated at construction; all
// downstream code sees native hyperparameters regardless of how the model
// was entered (native or marginal-moment form).
// ---------------------------------------------------------------------------

// Poisson sampling with Gamma(alpha, rate beta) prior on the mean.
struct PoissonGamma {
  double alpha;
  double beta;

  PoissonGamma(double alpha, double beta) : alpha(alpha), beta(beta) {
    detail::require(detail::is_finite(alpha) && alpha > 0.0,
                    "PoissonGamma: alpha must be > 0");
    detail::require(detail::is_finite(beta) && beta > 0.0,
                    "PoissonGamma: beta must be > 0");
  }

  double prior_mean() const { return alpha / beta; }
  double prior_sd() const { return std::sqrt(alpha) / beta; }

  // Inverts (mean, sd) of the Gamma prior: alpha = (m/s)^2, beta = m/s^2.
  static PoissonGamma from_marginal_moments(double mean, double sd) {
    detail::require(detail::is_finite(mean) && mean > 0.0,
                    "PoissonGamma: prior mean must be > 0");
    if (!(detail::is_finite(sd) && sd > 0.0)) {
      throw infeasible_moments(
          "PoissonGamma: prior sd must be > 0 (zero-variance prior is not "
          "representable by a Gamma distribution)");
    }
    double r = mean / sd;
    return PoissonGamma(r * r, mean / (sd * sd));
  }
};

// Normal sampling with normal-inverse-gamma prior: mu | s2 ~ N(mu0, lambda*s2),
// s2 ~ IG(alpha, beta). The parameter of interest is mu; s2 is a nuisance.
struct NormalNig {
  double mu0;
  double lambda;
  double alpha;
  double beta;

  NormalNig(double mu0, double lambda, double alpha, double beta)
      : mu0(mu0), lambda(lambda), alpha(alpha), beta(beta) {
    detail::require(detail::is_finite(mu0), "NormalNig: mu0 must be finite");
    detail::require(detail::is_finite(lambda) && lambda > 0.0,
                    "NormalNig: lambda must be > 0");
    detail::require(detail::is_finite(alpha) && alpha > 2.0,
                    "NormalNig: alpha must be > 2");
    detail::require(detail::is_finite(beta) && beta > 0.0,
                    "NormalNig: beta must be > 0");
  }

  double sigma2_prior_mean() const { return beta / (alpha - 1.0); }
  double sigma2_prior_sd() const {
    return beta / ((alpha - 1.0) * std::sqrt(alpha - 2.0));
  }
  // Marginal variance of mu under the prior: lambda * E[s2].
  double mu_prior_sd() const {
    return std::sqrt(lambda * sigma2_prior_mean());
  }

  // Inverts the IG(mean, sd) pair plus the marginal sd of mu:
  //   alpha = 2 + (m/s)^2,  beta = m(alpha-1),  lambda = sd_mu^2 (alpha-1)/beta.
  static NormalNig from_marginal_moments(double mean_s2, double sd_s2,
                                         double sd_mu, double mu0) {
    detail::require(detail::is_finite(mean_s2) && mean_s2 > 0.0,
                    "NormalNig: mean of the sigma^2 prior must be > 0");
    if (!(detail::is_finite(sd_s2) && sd_s2 > 0.0)) {
      throw infeasible_moments(
          "NormalNig: sd of the sigma^2 prior must be > 0 (implied alpha "
          "would be infinite)");
    }
    detail::require(detail::is_finite(sd_mu) && sd_mu > 0.0,
                    "NormalNig: marginal sd of mu must be > 0");
    double r = mean_s2 / sd_s2;
    double alpha = 2.0 + r * r;
    double beta = mean_s2 * (alpha - 1.0);
    double lambda = sd_mu * sd_mu * (alpha - 1.0) / beta;
    return NormalNig(mu0, lambda, alpha, beta);
  }
};

// Bernoulli sampling with Beta(a, b) prior on the success probability.
struct BetaBernoulli {
  double a;
  double b;

  BetaBernoulli(double a, double b) : a(a), b(b) {
    detail::require(detail::is_finite(a) && a > 0.0,
                    "BetaBernoulli: a must be > 0");
    detail::require(detail::is_finite(b) && b > 0.0,
                    "BetaBernoulli: b must be > 0");
  }

  double prior_mean() const { return a / (a + b); }
  double prior_sd() const {
    double s = a + b;
    return std::sqrt(a * b / (s * s * (s + 1.0)));
  }

  static BetaBernoulli from_marginal_moments(double mean, double sd) {
    detail::require(detail::is_finite(mean) && mean > 0.0 && mean < 1.0,
                    "BetaBernoulli: prior mean must lie in (0, 1)");
    if (!(detail::is_finite(sd) && sd > 0.0)) {
      throw infeasible_moments("BetaBernoulli: prior sd must be > 0");
    }
    double nu = mean * (1.0 - mean) / (sd * sd) - 1.0;
    if (!(nu > 0.0)) {
      throw infeasible_moments(
          "BetaBernoulli: sd too large for the given mean (requires sd^2 < "
          "mean(1-mean))");
    }
    return BetaBernoulli(mean * nu, (1.0 - mean) * nu);
  }
};

using ConjugateModel = std::variant<PoissonGamma, NormalNig, BetaBernoulli>;

inline Family family_of(const ConjugateModel& model) {
  if (std::holds_alternative<PoissonGamma>(model)) return Family::poisson;
  if (std::holds_alternative<NormalNig>(model)) return Family::normal;
  return Family::bernoulli;
}

// ---------------------------------------------------------------------------
// Data and true parameters.
// ---------------------------------------------------------------------------

struct DataSample {
  std::vector<double> values;

  long n() const { return static_cast<long>(values.size()); }
  double sum() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  double mean() const { return values.empty() ? 0.0 : sum() / n(); }
  // Sum of squared deviations from the sample mean; 0 for n <= 1.
  double centered_ss() const {
    if (values.size() < 2) return 0.0;
    double m = mean(), s = 0.0;
    for (double v : values) s += (v - m) * (v - m);
    return s;
  }
};

inline bool is_nonneg_integer(double v) {
  return v >= 0.0 && std::isfinite(v) && v == std::floor(v);
}

// Strict domain validation; silent coercion hides ingestion bugs.
inline void validate_data(Family family, const DataSample& data) {
  for (std::size_t i = 0; i < data.values.size(); ++i) {
    double v = data.values[i];
    switch (family) {
      case Family::poisson:
        if (!is_nonneg_integer(v)) {
          throw invalid_input("poisson data must be non-negative integers, "
                              "entry " + std::to_string(i) + " is " +
                              std::to_string(v));
        }
        break;
      case Family::bernoulli:
        if (!(v == 0.0 || v == 1.0)) {
          throw invalid_input("bernoulli data must be 0 or 1, entry " +
                              std::to_string(i) + " is " + std::to_string(v));
        }
        break;
      case Family::normal:
        if (!std::isfinite(v)) {
          throw invalid_input("normal data must be finite, entry " +
                              std::to_string(i) + " is not");
        }
        break;
    }
  }
}

struct PoissonTruth {
  double theta;
  explicit PoissonTruth(double theta) : theta(theta) {
    detail::require(detail::is_finite(theta) && theta > 0.0,
                    "PoissonTruth: theta must be > 0");
  }
};

struct NormalTruth {
  double mu;
  double sigma2;
  NormalTruth(double mu, double sigma2) : mu(mu), sigma2(sigma2) {
    detail::require(detail::is_finite(mu), "NormalTruth: mu must be finite");
    detail::require(detail::is_finite(sigma2) && sigma2 > 0.0,
                    "NormalTruth: sigma2 must be > 0");
  }
};

struct BernoulliTruth {
  double p;
  explicit BernoulliTruth(double p) : p(p) {
    detail::require(detail::is_finite(p) && p > 0.0 && p < 1.0,
                    "BernoulliTruth: p must lie in (0, 1)");
  }
};

using TrueParameter = std::variant<PoissonTruth, NormalTruth, BernoulliTruth>;

inline Family family_of(const TrueParameter& truth) {
  if (std::holds_alternative<PoissonTruth>(truth)) return Family::poisson;
  if (std::holds_alternative<NormalTruth>(truth)) return Family::normal;
  return Family::bernoulli;
}

// ---------------------------------------------------------------------------
// Posterior variance of the parameter of interest. Sufficient-statistic
// overloads are the workhorses; the DataSample form validates and reduces.
// ---------------------------------------------------------------------------

inline double posterior_variance(const PoissonGamma& m, long n, double sum) {
  double d = static_cast<double>(n) + m.beta;
  return (m.alpha + sum) / (d * d);
}

inline double posterior_variance(const BetaBernoulli& m, long n, double s) {
  double ap = m.a + s;
  double bp = m.b + (static_cast<double>(n) - s);
  double t = ap + bp;
  return ap * bp / (t * t * (t + 1.0));
}

// css = sum of squared deviations from the sample mean (0 when n <= 1);
// xbar is ignored at n = 0, where the prior marginal variance is returned.
inline double posterior_variance(const NormalNig& m, long n, double xbar,
                                 double css) {
  double nd = static_cast<double>(n);
  double n_lambda = nd + 1.0 / m.lambda;
  double shift = (n == 0)
                     ? 0.0
                     : (nd / (m.lambda * n_lambda)) * (xbar - m.mu0) *
                           (xbar - m.mu0);
  return (2.0 * m.beta + css + shift) / (n_lambda * (nd + 2.0 * m.alpha - 2.0));
}

inline double posterior_variance(const ConjugateModel& model,
                                 const DataSample& data) {
  validate_data(family_of(model), data);
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, NormalNig>) {
          return posterior_variance(m, data.n(), data.mean(),
                                    data.centered_ss());
        } else {
          return posterior_variance(m, data.n(), data.sum());
        }
      },
      model);
}

// ---------------------------------------------------------------------------
// Sampling: prior draws, prior-predictive draws, and draws at a fixed truth.
// ---------------------------------------------------------------------------

inline TrueParameter prior_draw(const ConjugateModel& model,
                                std::mt19937_64& rng) {
  return std::visit(
      [&](const auto& m) -> TrueParameter {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PoissonGamma>) {
          std::gamma_distribution<double> g(m.alpha, 1.0 / m.beta);
          return PoissonTruth(g(rng));
        } else if constexpr (std::is_same_v<T, NormalNig>) {
          std::gamma_distribution<double> g(m.alpha, 1.0 / m.beta);
          double sigma2 = 1.0 / g(rng);  // IG(alpha, beta)
          std::normal_distribution<double> nd(
              m.mu0, std::sqrt(m.lambda * sigma2));
          return NormalTruth(nd(rng), sigma2);
        } else {
          std::gamma_distribution<double> ga(m.a, 1.0), gb(m.b, 1.0);
          double x = ga(rng), y = gb(rng);
          return BernoulliTruth(x / (x + y));
        }
      },
      model);
}

inline DataSample sampling_draw(const TrueParameter& truth, long n,
                                std::mt19937_64& rng) {
  detail::require(n >= 1, "sampling_draw: n must be >= 1");
  DataSample out;
  out.values.reserve(static_cast<std::size_t>(n));
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, PoissonTruth>) {
          std::poisson_distribution<long> d(t.theta);
          for (long i = 0; i < n; ++i)
            out.values.push_back(static_cast<double>(d(rng)));
        } else if constexpr (std::is_same_v<T, NormalTruth>) {
          std::normal_distribution<double> d(t.mu, std::sqrt(t.sigma2));
          for (long i = 0; i < n; ++i) out.values.push_back(d(rng));
        } else {
          std::bernoulli_distribution d(t.p);
          for (long i = 0; i < n; ++i)
            out.values.push_back(d(rng) ? 1.0 : 0.0);
        }
      },
      truth);
  return out;
}

// theta ~ pi(theta), then x_n ~ p(x_n | theta) i.i.d.
inline DataSample prior_predictive_sample(const ConjugateModel& model, long n,
                                          std::mt19937_64& rng) {
  detail::require(n >= 1, "prior_predictive_sample: n must be >= 1");
  return sampling_draw(prior_draw(model, rng), n, rng);
}

// ---------------------------------------------------------------------------
// Inverse Fisher information of the single-sample distribution, evaluated at
// a parameter point: Poisson -> theta, Normal -> sigma^2, Bernoulli -> p(1-p).
// ---------------------------------------------------------------------------

inline double fisher_inverse(const TrueParameter& theta) {
  return std::visit(
      [](const auto& t) -> double {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, PoissonTruth>) {
          return t.theta;
        } else if constexpr (std::is_same_v<T, NormalTruth>) {
          return t.sigma2;
        } else {
          return t.p * (1.0 - t.p);
        }
      },
      theta);
}

}  // namespace ssd
