#pragma once

#include <map>
#include <string>

#include "ssd/errors.hpp"
#include "ssd/models.hpp"

namespace ssd {

// Marginal-moment parameters by name, as used on sweep axes:
//   poisson:   mean, sd            (of the Gamma prior on theta)
//   normal:    mean_s2, sd_s2      (of the IG prior on sigma^2)
//              sd_mu, mu0          (marginal sd / location of mu)
//   bernoulli: mean, sd            (of the Beta prior on p)
using MomentMap = std::map<std::string, double>;

inline double moment_at(const MomentMap& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end())
    throw invalid_input("missing marginal-moment parameter '" + key + "'");
  return it->second;
}

inline ConjugateModel model_from_moments(Family family, const MomentMap& m) {
  switch (family) {
    case Family::poisson:
      return PoissonGamma::from_marginal_moments(moment_at(m, "mean"),
                                                 moment_at(m, "sd"));
    case Family::normal:
      return NormalNig::from_marginal_moments(
          moment_at(m, "mean_s2"), moment_at(m, "sd_s2"),
          moment_at(m, "sd_mu"), moment_at(m, "mu0"));
    case Family::bernoulli:
      return BetaBernoulli::from_marginal_moments(moment_at(m, "mean"),
                                                  moment_at(m, "sd"));
  }
  throw invalid_input("unknown family");
}

inline bool valid_axis_name(Family family, const std::string& name) {
  switch (family) {
    case Family::poisson:
    case Family::bernoulli:
      return name == "mean" || name == "sd";
    case Family::normal:
      return name == "mean_s2" || name == "sd_s2" || name == "sd_mu" ||
             name == "mu0";
  }
  return false;
}

struct GridAxis {
  std::string name;
  double lo;
  double hi;
  int steps;

  GridAxis(std::string name, double lo, double hi, int steps)
      : name(std::move(name)), lo(lo), hi(hi), steps(steps) {
    if (steps < 1) throw invalid_input("GridAxis: steps must be >= 1");
  }

  double value(int i) const {
    if (steps == 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) /
                    static_cast<double>(steps - 1);
  }
};

}  // namespace ssd
