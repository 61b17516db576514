#pragma once

#include <cmath>

#include "ssd/errors.hpp"

namespace ssd {

// epsilon bounds the posterior uncertainty u_n; k scales the prior-predictive
// sd of u_n^2 in the criterion lhs. k = 0 recovers the plain average
// criterion (APVC); k > 0 is the variation criterion (VPVC).
struct CriterionSpec {
  double epsilon;
  double k;

  CriterionSpec(double epsilon, double k = 0.0) : epsilon(epsilon), k(k) {
    if (!(std::isfinite(epsilon) && epsilon > 0.0))
      throw invalid_input("CriterionSpec: epsilon must be > 0 and finite");
    if (!(std::isfinite(k) && k >= 0.0))
      throw invalid_input("CriterionSpec: k must be >= 0 and finite");
  }
};

}  // namespace ssd
