#pragma once

#include <cmath>
#include <optional>

#include "ssd/asymptotics.hpp"
#include "ssd/criterion.hpp"
#include "ssd/errors.hpp"
#include "ssd/moments.hpp"

namespace ssd {

struct SsdResult {
  long n;
  double lhs_at_n;
  std::optional<double> lhs_at_n_minus_1;  // absent when n == 1
  long evaluations;
};

inline double criterion_lhs(const ConjugateModel& model,
                            const CriterionSpec& spec, long n) {
  MomentPair m = posterior_variance_moments(model, n);
  return m.mean_u2 + spec.k * m.sd_u2;
}

// Smallest n >= 1 with ubar_n^2 + k * dsd_n^2 < eps^2 (strict). The lhs is
// not monotone in n for every family/hyperparameter combination, so this is
// a linear scan from n = 1; each evaluation is O(1) (O(n) for Bernoulli).
inline SsdResult vpvc_sample_size(const ConjugateModel& model,
                                  const CriterionSpec& spec) {
  double eps2 = spec.epsilon * spec.epsilon;
  double asym = asymptotic_sample_size(model, spec).n_asymptotic;
  long cap = 1000000;
  if (std::isfinite(asym) && 10.0 * std::ceil(asym) > static_cast<double>(cap))
    cap = static_cast<long>(10.0 * std::ceil(asym));

  double prev = 0.0;
  long evals = 0;
  for (long n = 1; n <= cap; ++n) {
    double lhs = criterion_lhs(model, spec, n);
    ++evals;
    if (lhs < eps2) {
      SsdResult r{n, lhs, std::nullopt, evals};
      if (n > 1) r.lhs_at_n_minus_1 = prev;
      return r;
    }
    prev = lhs;
  }
  throw budget_exceeded(cap, prev);
}

inline SsdResult apvc_sample_size(const ConjugateModel& model,
                                  double epsilon) {
  return vpvc_sample_size(model, CriterionSpec(epsilon, 0.0));
}

}  // namespace ssd
