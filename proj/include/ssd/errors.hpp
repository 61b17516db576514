#pragma once

#include <stdexcept>
#include <string>

namespace ssd {

// Bad hyperparameters, data outside the family domain, malformed specs.
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Marginal-moment combinations that no member of the family can realize.
class infeasible_moments : public invalid_input {
 public:
  using invalid_input::invalid_input;
};

// Thrown by the solvers when no n up to the cap satisfies the criterion.
class budget_exceeded : public std::runtime_error {
 public:
  budget_exceeded(long cap, double lhs_at_cap)
      : std::runtime_error("no sample size up to cap " + std::to_string(cap) +
                           " satisfies the criterion (lhs at cap = " +
                           std::to_string(lhs_at_cap) + ")"),
        cap(cap),
        lhs_at_cap(lhs_at_cap) {}

  long cap;
  double lhs_at_cap;
};

// Ingestion failures: unparseable files, missing columns, domain violations.
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ssd
