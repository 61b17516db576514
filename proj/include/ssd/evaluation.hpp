#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ssd/criterion.hpp"
#include "ssd/errors.hpp"
#include "ssd/grid.hpp"
#include "ssd/ingest.hpp"
#include "ssd/models.hpp"
#include "ssd/moments.hpp"
#include "ssd/parallel.hpp"
#include "ssd/rng.hpp"
#include "ssd/solver.hpp"

namespace ssd {

// Where evaluation datasets come from: a fixed sampling truth, resamples of
// an empirical dataset (with replacement by default), or the prior
// predictive itself.
struct SyntheticSource {
  TrueParameter truth;
};
struct EmpiricalSource {
  const Dataset* data;
  bool with_replacement = true;
};
struct PriorPredictiveSource {};

using DataSource =
    std::variant<SyntheticSource, EmpiricalSource, PriorPredictiveSource>;

struct EvaluationReport {
  long replicates;
  long successes;
  double rate;       // successes / replicates
  double std_error;  // sqrt(rate (1-rate) / replicates)
  std::uint64_t seed;
  long n_used;
  double epsilon;
  double k;
};

namespace detail {

inline DataSample draw_from_source(const ConjugateModel& model,
                                   const DataSource& source, long n,
                                   std::mt19937_64& rng) {
  if (const auto* s = std::get_if<SyntheticSource>(&source))
    return sampling_draw(s->truth, n, rng);
  if (const auto* e = std::get_if<EmpiricalSource>(&source)) {
    const Dataset& d = *e->data;
    DataSample out;
    out.values.reserve(static_cast<std::size_t>(n));
    if (e->with_replacement) {
      std::uniform_int_distribution<long> pick(0, d.n() - 1);
      for (long i = 0; i < n; ++i)
        out.values.push_back(d.values[static_cast<std::size_t>(pick(rng))]);
    } else {
      if (d.n() < n)
        throw data_error("empirical dataset has " + std::to_string(d.n()) +
                         " rows, fewer than the requested n = " +
                         std::to_string(n) +
                         " (resampling without replacement)");
      // Partial Fisher-Yates over a copy of the indices.
      std::vector<long> idx(static_cast<std::size_t>(d.n()));
      for (long i = 0; i < d.n(); ++i) idx[static_cast<std::size_t>(i)] = i;
      for (long i = 0; i < n; ++i) {
        std::uniform_int_distribution<long> pick(i, d.n() - 1);
        std::swap(idx[static_cast<std::size_t>(i)],
                  idx[static_cast<std::size_t>(pick(rng))]);
        out.values.push_back(d.values[static_cast<std::size_t>(
            idx[static_cast<std::size_t>(i)])]);
      }
    }
    return out;
  }
  return prior_predictive_sample(model, n, rng);
}

inline EvaluationReport make_report(long replicates, long successes,
                                    std::uint64_t seed, long n, double epsilon,
                                    double k) {
  double rate =
      static_cast<double>(successes) / static_cast<double>(replicates);
  double se = std::sqrt(rate * (1.0 - rate) / static_cast<double>(replicates));
  return EvaluationReport{replicates, successes, rate, se, seed, n, epsilon, k};
}

}  // namespace detail

// Fraction of replicate datasets of size n whose posterior variance falls
// strictly below epsilon^2.
inline EvaluationReport success_rate(const ConjugateModel& model,
                                     const CriterionSpec& spec,
                                     const DataSource& source, long n,
                                     long replicates, std::uint64_t seed,
                                     int threads = 1) {
  detail::require(replicates >= 1, "success_rate: replicates must be >= 1");
  detail::require(n >= 1, "success_rate: n must be >= 1");
  double eps2 = spec.epsilon * spec.epsilon;
  std::atomic<long> successes{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::mutex error_mutex;
  parallel_for(static_cast<std::size_t>(replicates), threads,
               [&](std::size_t r) {
                 if (failed.load(std::memory_order_relaxed)) return;
                 try {
                   std::mt19937_64 rng = substream(seed, r);
                   DataSample x =
                       detail::draw_from_source(model, source, n, rng);
                   if (posterior_variance(model, x) < eps2)
                     successes.fetch_add(1, std::memory_order_relaxed);
                 } catch (const std::exception& e) {
                   std::lock_guard<std::mutex> lock(error_mutex);
                   failed = true;
                   error = e.what();
                 }
               });
  if (failed) throw data_error(error);
  return detail::make_report(replicates, successes.load(), seed, n,
                             spec.epsilon, spec.k);
}

// P(u_n^2 <= ubar_n^2 + k dsd_n^2) under x_n ~ m(x_n).
inline EvaluationReport coverage_probability(const ConjugateModel& model,
                                             long n, double k, long replicates,
                                             std::uint64_t seed,
                                             int threads = 1) {
  detail::require(replicates >= 1,
                  "coverage_probability: replicates must be >= 1");
  double threshold = expected_posterior_variance(model, n) +
                     k * sd_posterior_variance(model, n);
  std::atomic<long> successes{0};
  parallel_for(static_cast<std::size_t>(replicates), threads,
               [&](std::size_t r) {
                 std::mt19937_64 rng = substream(seed, r);
                 DataSample x = prior_predictive_sample(model, n, rng);
                 if (posterior_variance(model, x) <= threshold)
                   successes.fetch_add(1, std::memory_order_relaxed);
               });
  return detail::make_report(replicates, successes.load(), seed, n,
                             std::sqrt(threshold), k);
}

// One Monte-Carlo estimate of P(u_n^2 > ubar_n^2 + k dsd_n^2) under data
// drawn at the truth, per (n, k) pair. Common random numbers across k:
// each replicate draws one dataset per n and tests it against every k, so
// the curve is monotone in k without Monte-Carlo noise.
struct ExceedancePoint {
  long n;
  double k;
  double exceedance;
  double std_error;
  long replicates;
};

inline std::vector<ExceedancePoint> exceedance_curve(
    const ConjugateModel& model, const TrueParameter& truth,
    const std::vector<double>& k_values, const std::vector<long>& n_values,
    long replicates, std::uint64_t seed, int threads = 1) {
  detail::require(replicates >= 1,
                  "exceedance_curve: replicates must be >= 1");
  std::vector<ExceedancePoint> out;
  for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
    long n = n_values[ni];
    double ubar = expected_posterior_variance(model, n);
    double dsd = sd_posterior_variance(model, n);
    std::vector<std::atomic<long>> counts(k_values.size());
    for (auto& c : counts) c = 0;
    parallel_for(static_cast<std::size_t>(replicates), threads,
                 [&](std::size_t r) {
                   std::mt19937_64 rng = substream(seed, ni, r);
                   DataSample x = sampling_draw(truth, n, rng);
                   double u2 = posterior_variance(model, x);
                   for (std::size_t ki = 0; ki < k_values.size(); ++ki)
                     if (u2 > ubar + k_values[ki] * dsd)
                       counts[ki].fetch_add(1, std::memory_order_relaxed);
                 });
    for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
      double rate = static_cast<double>(counts[ki].load()) /
                    static_cast<double>(replicates);
      out.push_back(ExceedancePoint{
          n, k_values[ki], rate,
          std::sqrt(rate * (1.0 - rate) / static_cast<double>(replicates)),
          replicates});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hyperparameter grids: n_eps per cell, success/coverage per cell, and the
// epsilon sweep that exposes the sharpening phase boundary.
// ---------------------------------------------------------------------------

struct GridCell {
  double v1;  // axis1 value
  double v2;  // axis2 value
  std::optional<long> n;
  std::optional<double> value;  // rate, or n as a double for pure sweeps
  std::string note;             // non-empty when the cell failed
};

// Solves n_eps for every cell of an axis1-major grid. Cells where the model
// is infeasible or the solver exceeds its budget are marked, not fatal.
inline std::vector<GridCell> sweep_sample_sizes(Family family,
                                                const MomentMap& base,
                                                const GridAxis& axis1,
                                                const GridAxis& axis2,
                                                const CriterionSpec& spec,
                                                int threads = 1) {
  if (!valid_axis_name(family, axis1.name) ||
      !valid_axis_name(family, axis2.name))
    throw invalid_input("sweep: axis names must be marginal-moment names of "
                        "the family");
  std::size_t cells = static_cast<std::size_t>(axis1.steps) *
                      static_cast<std::size_t>(axis2.steps);
  std::vector<GridCell> out(cells);
  parallel_for(cells, threads, [&](std::size_t c) {
    int i = static_cast<int>(c) / axis2.steps;
    int j = static_cast<int>(c) % axis2.steps;
    GridCell& cell = out[c];
    cell.v1 = axis1.value(i);
    cell.v2 = axis2.value(j);
    MomentMap m = base;
    m[axis1.name] = cell.v1;
    m[axis2.name] = cell.v2;
    try {
      ConjugateModel model = model_from_moments(family, m);
      SsdResult r = vpvc_sample_size(model, spec);
      cell.n = r.n;
      cell.value = static_cast<double>(r.n);
    } catch (const std::exception& e) {
      cell.note = e.what();
    }
  });
  return out;
}

// Success rate per grid cell at that cell's own n_eps.
inline std::vector<GridCell> evaluate_grid(Family family, const MomentMap& base,
                                           const GridAxis& axis1,
                                           const GridAxis& axis2,
                                           const CriterionSpec& spec,
                                           const DataSource& source,
                                           long replicates, std::uint64_t seed,
                                           int threads = 1) {
  std::vector<GridCell> cells =
      sweep_sample_sizes(family, base, axis1, axis2, spec, threads);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    GridCell& cell = cells[c];
    if (!cell.n) continue;
    MomentMap m = base;
    m[axis1.name] = cell.v1;
    m[axis2.name] = cell.v2;
    ConjugateModel model = model_from_moments(family, m);
    EvaluationReport rep = success_rate(model, spec, source, *cell.n,
                                        replicates, mix64(seed ^ c), threads);
    cell.value = rep.rate;
  }
  return cells;
}

// Coverage per grid cell at that cell's own n_eps (prior-predictive draws).
inline std::vector<GridCell> coverage_grid(Family family, const MomentMap& base,
                                           const GridAxis& axis1,
                                           const GridAxis& axis2,
                                           const CriterionSpec& spec,
                                           long replicates, std::uint64_t seed,
                                           int threads = 1) {
  std::vector<GridCell> cells =
      sweep_sample_sizes(family, base, axis1, axis2, spec, threads);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    GridCell& cell = cells[c];
    if (!cell.n) continue;
    MomentMap m = base;
    m[axis1.name] = cell.v1;
    m[axis2.name] = cell.v2;
    ConjugateModel model = model_from_moments(family, m);
    EvaluationReport rep = coverage_probability(model, *cell.n, spec.k,
                                                replicates, mix64(seed ^ c),
                                                threads);
    cell.value = rep.rate;
  }
  return cells;
}

// One success-rate grid per epsilon, epsilons decreasing. As epsilon shrinks
// the mid-rate band between the all-fail and all-pass regions narrows.
struct EpsilonSweepGrid {
  double epsilon;
  std::vector<GridCell> cells;
};

inline std::vector<EpsilonSweepGrid> epsilon_sweep(
    Family family, const MomentMap& base, const GridAxis& axis1,
    const GridAxis& axis2, double k, const std::vector<double>& epsilons,
    const DataSource& source, long replicates, std::uint64_t seed,
    int threads = 1) {
  for (std::size_t i = 1; i < epsilons.size(); ++i)
    detail::require(epsilons[i] < epsilons[i - 1],
                    "epsilon_sweep: epsilons must be strictly decreasing");
  std::vector<EpsilonSweepGrid> out;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    CriterionSpec spec(epsilons[i], k);
    out.push_back(EpsilonSweepGrid{
        epsilons[i], evaluate_grid(family, base, axis1, axis2, spec, source,
                                   replicates, mix64(seed + i), threads)});
  }
  return out;
}

}  // namespace ssd
