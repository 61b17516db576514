#pragma once

#include <algorithm>
#include <cmath>

#include "ssd/criterion.hpp"
#include "ssd/errors.hpp"
#include "ssd/models.hpp"

namespace ssd {

// Prior moments of the inverse Fisher information I^-1 of the single-sample
// distribution. These drive every small-epsilon quantity below.
//   Poisson:   I^-1 = theta        under Gamma(alpha, beta)
//   Normal:    I^-1 = sigma^2      under IG(alpha, beta)
//   Bernoulli: I^-1 = p(1-p)       under Beta(a, b), via raw Beta moments
inline double prior_inv_fisher_mean(const ConjugateModel& model) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PoissonGamma>) {
          return m.alpha / m.beta;
        } else if constexpr (std::is_same_v<T, NormalNig>) {
          return m.beta / (m.alpha - 1.0);
        } else {
          return m.a * m.b / ((m.a + m.b) * (m.a + m.b + 1.0));
        }
      },
      model);
}

inline double prior_inv_fisher_sd(const ConjugateModel& model) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PoissonGamma>) {
          return std::sqrt(m.alpha) / m.beta;
        } else if constexpr (std::is_same_v<T, NormalNig>) {
          return m.beta / ((m.alpha - 1.0) * std::sqrt(m.alpha - 2.0));
        } else {
          // E[p^j] = prod_{i<j} (a+i)/(a+b+i); g = p - p^2.
          double e[5];
          e[0] = 1.0;
          for (int i = 0; i < 4; ++i)
            e[i + 1] = e[i] * (m.a + i) / (m.a + m.b + i);
          double eg = e[1] - e[2];
          double eg2 = e[2] - 2.0 * e[3] + e[4];
          double var = eg2 - eg * eg;
          return var > 0.0 ? std::sqrt(var) : 0.0;
        }
      },
      model);
}

// gamma = sd_pi(I^-1) / E_pi[I^-1]; the prior-induced relative variability of
// the asymptotic posterior variance.
inline double gamma_coefficient(const ConjugateModel& model) {
  return prior_inv_fisher_sd(model) / prior_inv_fisher_mean(model);
}

struct AsymptoticSummary {
  double gamma;
  double e_pi_inv_fisher;
  double s_infinity;    // (1 + k*gamma) E_pi[I^-1]; limit of n * lhs(n)
  double n_asymptotic;  // eps^-2 * s_infinity
};

inline AsymptoticSummary asymptotic_sample_size(const ConjugateModel& model,
                                                const CriterionSpec& spec) {
  AsymptoticSummary out{};
  out.gamma = gamma_coefficient(model);
  out.e_pi_inv_fisher = prior_inv_fisher_mean(model);
  out.s_infinity = (1.0 + spec.k * out.gamma) * out.e_pi_inv_fisher;
  out.n_asymptotic = out.s_infinity / (spec.epsilon * spec.epsilon);
  return out;
}

// Phase-transition threshold: k_star = max(I^-1(truth) - E_pi[I^-1], 0)
// / sd_pi(I^-1). For k above it the criterion is asymptotically
// conservative under data drawn at the truth; below it, the opposite.
struct ThresholdReport {
  double k_star;
  double rho;  // I^-1(truth) / E_pi[I^-1] - 1
  double inv_fisher_true;
  double prior_mean_inv_fisher;
  double prior_sd_inv_fisher;
};

inline ThresholdReport k_star(const ConjugateModel& model,
                              const TrueParameter& truth) {
  if (family_of(model) != family_of(truth))
    throw invalid_input("k_star: model and truth families differ");
  ThresholdReport r{};
  r.inv_fisher_true = fisher_inverse(truth);
  r.prior_mean_inv_fisher = prior_inv_fisher_mean(model);
  r.prior_sd_inv_fisher = prior_inv_fisher_sd(model);
  if (!(r.prior_sd_inv_fisher > 0.0))
    throw invalid_input(
        "k_star: prior variance of the inverse Fisher information is zero "
        "(degenerate prior)");
  r.rho = r.inv_fisher_true / r.prior_mean_inv_fisher - 1.0;
  r.k_star = std::max(r.inv_fisher_true - r.prior_mean_inv_fisher, 0.0) /
             r.prior_sd_inv_fisher;
  return r;
}

// Axis-aligned region over the parameter that carries the Fisher
// information (theta, sigma^2, or p). k_star(theta) is monotone increasing
// in I^-1, so the supremum sits at the point of the box maximizing I^-1.
struct ParameterInterval {
  double lo;
  double hi;
};

inline double k_star_upper_bound(const ConjugateModel& model,
                                 const ParameterInterval& region) {
  if (!(region.lo <= region.hi))
    throw invalid_input("k_star_upper_bound: empty region");
  double arg_max;
  switch (family_of(model)) {
    case Family::poisson:
      if (!(region.hi > 0.0))
        throw invalid_input("k_star_upper_bound: theta region must intersect "
                            "(0, inf)");
      arg_max = region.hi;
      return k_star(model, TrueParameter(PoissonTruth(arg_max))).k_star;
    case Family::normal:
      if (!(region.hi > 0.0))
        throw invalid_input("k_star_upper_bound: sigma^2 region must "
                            "intersect (0, inf)");
      arg_max = region.hi;
      {
        double mu0 = std::get<NormalNig>(model).mu0;
        return k_star(model, TrueParameter(NormalTruth(mu0, arg_max))).k_star;
      }
    case Family::bernoulli: {
      if (!(region.hi > 0.0 && region.lo < 1.0))
        throw invalid_input("k_star_upper_bound: p region must intersect "
                            "(0, 1)");
      double lo = std::max(region.lo, 0.0);
      double hi = std::min(region.hi, 1.0);
      // p(1-p) peaks at 1/2; otherwise at the interior endpoint closest to it.
      double p = (lo <= 0.5 && 0.5 <= hi) ? 0.5
                 : (std::abs(lo - 0.5) < std::abs(hi - 0.5) ? lo : hi);
      p = std::clamp(p, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
      return k_star(model, TrueParameter(BernoulliTruth(p))).k_star;
    }
  }
  throw invalid_input("k_star_upper_bound: unknown family");
}

// Default region: prior marginal mean +/- j sds of the information-carrying
// parameter, intersected with its open domain.
inline ParameterInterval default_region(const ConjugateModel& model,
                                        double j_sds) {
  return std::visit(
      [j_sds](const auto& m) -> ParameterInterval {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PoissonGamma>) {
          double mean = m.prior_mean(), sd = m.prior_sd();
          return ParameterInterval{std::max(mean - j_sds * sd, 0.0),
                                   mean + j_sds * sd};
        } else if constexpr (std::is_same_v<T, NormalNig>) {
          double mean = m.sigma2_prior_mean(), sd = m.sigma2_prior_sd();
          return ParameterInterval{std::max(mean - j_sds * sd, 0.0),
                                   mean + j_sds * sd};
        } else {
          double mean = m.prior_mean(), sd = m.prior_sd();
          return ParameterInterval{std::max(mean - j_sds * sd, 0.0),
                                   std::min(mean + j_sds * sd, 1.0)};
        }
      },
      model);
}

}  // namespace ssd
