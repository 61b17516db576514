// ssdkit: sample-size determination for conjugate Bayesian models.
// Subcommands: ssd, sweep, evaluate, asymptotics, surrogate, coverage.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ssd/ssd.hpp"

using ordered_json = nlohmann::ordered_json;
using namespace ssd;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitBudget = 4;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// epsilon with optional unit suffix: "20sec" -> 1/3 model unit (minutes),
// "5min" -> 5, bare -> model units.
double parse_epsilon(const std::string& text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw invalid_input("cannot parse epsilon '" + text + "'");
  }
  std::string suffix = text.substr(pos);
  if (suffix == "sec") return v / 60.0;
  if (suffix == "min" || suffix.empty()) return v;
  throw invalid_input("unknown epsilon unit '" + suffix +
                      "' (use sec, min, or none)");
}

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, delim)) out.push_back(part);
  return out;
}

GridAxis parse_axis(const std::string& text) {
  auto parts = split(text, ':');
  if (parts.size() != 4)
    throw invalid_input("axis must be name:lo:hi:steps, got '" + text + "'");
  try {
    return GridAxis(parts[0], std::stod(parts[1]), std::stod(parts[2]),
                    std::stoi(parts[3]));
  } catch (const invalid_input&) {
    throw;
  } catch (const std::exception&) {
    throw invalid_input("cannot parse axis '" + text + "'");
  }
}

Family parse_family(const std::string& name) {
  if (name == "poisson") return Family::poisson;
  if (name == "normal") return Family::normal;
  if (name == "bernoulli") return Family::bernoulli;
  throw invalid_input("unknown family '" + name +
                      "' (poisson, normal, bernoulli)");
}

// ---------------------------------------------------------------------------
// Shared option bundles.
// ---------------------------------------------------------------------------

struct ModelOpts {
  std::string family;
  double alpha = 0, beta = 0, a = 0, b = 0, lambda = 0, mu0 = 0;
  double mean = 0, sd = 0, mean_s2 = 0, sd_s2 = 0, sd_mu = 0;
  CLI::Option *o_alpha, *o_beta, *o_a, *o_b, *o_lambda, *o_mu0;
  CLI::Option *o_mean, *o_sd, *o_mean_s2, *o_sd_s2, *o_sd_mu;

  void add_to(CLI::App* cmd, bool family_required = true) {
    auto* fam = cmd->add_option("--family", family,
                                "model family: poisson, normal, bernoulli");
    if (family_required) fam->required();
    o_alpha = cmd->add_option("--alpha", alpha, "gamma/IG shape");
    o_beta = cmd->add_option("--beta", beta, "gamma rate / IG scale");
    o_a = cmd->add_option("--a", a, "beta prior a");
    o_b = cmd->add_option("--b", b, "beta prior b");
    o_lambda = cmd->add_option("--lambda", lambda, "NIG variance ratio");
    o_mu0 = cmd->add_option("--mu0", mu0, "NIG location (default 0)");
    o_mean = cmd->add_option("--mean", mean, "prior mean (poisson/bernoulli)");
    o_sd = cmd->add_option("--sd", sd, "prior sd (poisson/bernoulli)");
    o_mean_s2 = cmd->add_option("--mean-s2", mean_s2, "prior mean of sigma^2");
    o_sd_s2 = cmd->add_option("--sd-s2", sd_s2, "prior sd of sigma^2");
    o_sd_mu = cmd->add_option("--sd-mu", sd_mu, "prior marginal sd of mu");
  }

  Family resolved_family() const { return parse_family(family); }

  ConjugateModel resolve() const {
    switch (resolved_family()) {
      case Family::poisson:
        if (o_alpha->count() && o_beta->count())
          return PoissonGamma(alpha, beta);
        if (o_mean->count() && o_sd->count())
          return PoissonGamma::from_marginal_moments(mean, sd);
        throw invalid_input(
            "poisson needs --alpha/--beta or --mean/--sd");
      case Family::normal:
        if (o_lambda->count() && o_alpha->count() && o_beta->count())
          return NormalNig(mu0, lambda, alpha, beta);
        if (o_mean_s2->count() && o_sd_s2->count() && o_sd_mu->count())
          return NormalNig::from_marginal_moments(mean_s2, sd_s2, sd_mu, mu0);
        throw invalid_input(
            "normal needs --lambda/--alpha/--beta or "
            "--mean-s2/--sd-s2/--sd-mu (plus --mu0)");
      case Family::bernoulli:
        if (o_a->count() && o_b->count()) return BetaBernoulli(a, b);
        if (o_mean->count() && o_sd->count())
          return BetaBernoulli::from_marginal_moments(mean, sd);
        throw invalid_input("bernoulli needs --a/--b or --mean/--sd");
    }
    throw invalid_input("unknown family");
  }

  // Marginal-moment values present on the command line, as a sweep base.
  MomentMap base_moments() const {
    MomentMap m;
    if (o_mean->count()) m["mean"] = mean;
    if (o_sd->count()) m["sd"] = sd;
    if (o_mean_s2->count()) m["mean_s2"] = mean_s2;
    if (o_sd_s2->count()) m["sd_s2"] = sd_s2;
    if (o_sd_mu->count()) m["sd_mu"] = sd_mu;
    if (resolved_family() == Family::normal) m["mu0"] = mu0;
    return m;
  }
};

struct TruthOpts {
  double theta = 0, mu = 0, sigma2 = 0, p = 0;
  CLI::Option *o_theta, *o_mu, *o_sigma2, *o_p;

  void add_to(CLI::App* cmd) {
    o_theta = cmd->add_option("--theta", theta, "true poisson mean");
    o_mu = cmd->add_option("--mu", mu, "true normal mean");
    o_sigma2 = cmd->add_option("--sigma2", sigma2, "true normal variance");
    o_p = cmd->add_option("--p", p, "true bernoulli probability");
  }

  bool given() const {
    return o_theta->count() || o_mu->count() || o_sigma2->count() ||
           o_p->count();
  }

  TrueParameter resolve(Family family) const {
    switch (family) {
      case Family::poisson:
        if (!o_theta->count()) throw invalid_input("poisson truth needs --theta");
        return PoissonTruth(theta);
      case Family::normal:
        if (!o_mu->count() || !o_sigma2->count())
          throw invalid_input("normal truth needs --mu and --sigma2");
        return NormalTruth(mu, sigma2);
      case Family::bernoulli:
        if (!o_p->count()) throw invalid_input("bernoulli truth needs --p");
        return BernoulliTruth(p);
    }
    throw invalid_input("unknown family");
  }
};

struct RunOpts {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
  std::string format = "csv";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "RNG seed (env SSDKIT_SEED)")
        ->envname("SSDKIT_SEED");
    cmd->add_option("--threads", threads, "worker threads")
        ->check(CLI::Range(1, 256));
    cmd->add_option("--out", out, "output file (default stdout)");
    cmd->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  }
};

// ---------------------------------------------------------------------------
// Output assembly: rows of (name, value) pairs, one schema per run.
// ---------------------------------------------------------------------------

struct Emitter {
  std::string header;  // provenance line, without the leading '#'
  std::vector<ordered_json> rows;

  void write(const RunOpts& run) const {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!run.out.empty()) {
      file.open(run.out);
      if (!file) throw data_error("cannot write " + run.out);
      os = &file;
    }
    *os << "# " << header << "\n";
    if (run.format == "json") {
      for (const auto& row : rows) *os << row.dump() << "\n";
    } else {
      if (!rows.empty()) {
        bool first = true;
        for (auto it = rows[0].begin(); it != rows[0].end(); ++it) {
          if (!first) *os << ",";
          *os << it.key();
          first = false;
        }
        *os << "\n";
      }
      for (const auto& row : rows) {
        bool first = true;
        for (auto it = row.begin(); it != row.end(); ++it) {
          if (!first) *os << ",";
          first = false;
          const auto& v = it.value();
          if (v.is_null()) {
            *os << "NA";
          } else if (v.is_string()) {
            std::string s = v.get<std::string>();
            if (s.find_first_of(",\"\n") != std::string::npos) {
              std::string quoted = "\"";
              for (char c : s) {
                if (c == '"') quoted += '"';
                quoted += c;
              }
              quoted += '"';
              s = quoted;
            }
            *os << s;
          } else {
            *os << v.dump();
          }
        }
        *os << "\n";
      }
    }
    if (!*os) throw data_error("write to " + run.out + " failed");
  }
};

std::string provenance(const std::string& config_hash,
                       const RunOpts& run) {
  return std::string("ssdkit ") + SSDKIT_VERSION + " seed=" +
         std::to_string(run.seed) + " config-hash=" + config_hash;
}

ordered_json json_or_null(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    try {
      out.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw invalid_input("cannot parse " + what + " entry '" + part + "'");
    }
  }
  if (out.empty()) throw invalid_input(what + " is empty");
  return out;
}

// ---------------------------------------------------------------------------
// Subcommand state.
// ---------------------------------------------------------------------------

struct SsdCmd {
  ModelOpts model;
  RunOpts run;
  std::string eps_text;
  double k = 0;
};

struct SweepCmd {
  ModelOpts model;
  RunOpts run;
  std::string eps_text, axis1, axis2;
  double k = 0;
};

struct EvaluateCmd {
  ModelOpts model;
  TruthOpts truth;
  RunOpts run;
  std::string kind = "success";
  std::string eps_text, axis1, axis2;
  std::string data_path, column;
  std::string k_list, n_list, eps_list;
  double k = 0;
  long replicates = 10000;
  long n = 0;
  bool no_replacement = false;
  CLI::Option* o_n = nullptr;
};

struct AsymptoticsCmd {
  ModelOpts model;
  TruthOpts truth;
  RunOpts run;
  std::string eps_text, region;
  double k = 0;
  double region_sds = 0;
  CLI::Option *o_region, *o_region_sds;
};

struct SurrogateCmd {
  ModelOpts model;
  TruthOpts truth;
  RunOpts run;
  long size = 0;
  std::string label = "value";
};

struct CoverageCmd {
  ModelOpts model;
  RunOpts run;
  std::string eps_text;
  double k = 0;
  long n = 0;
  long replicates = 10000;
  CLI::Option* o_n = nullptr;
};

DataSource resolve_source(const EvaluateCmd& c, Family family,
                          std::optional<Dataset>& storage) {
  if (!c.data_path.empty()) {
    if (c.column.empty())
      throw invalid_input("--data needs --column");
    storage = load_csv(c.data_path, c.column, family);
    return EmpiricalSource{&*storage, !c.no_replacement};
  }
  if (c.truth.given()) return SyntheticSource{c.truth.resolve(family)};
  return PriorPredictiveSource{};
}

void run_ssd(const SsdCmd& c, const std::string& hash) {
  ConjugateModel model = c.model.resolve();
  CriterionSpec spec(parse_epsilon(c.eps_text), c.k);
  SsdResult r = vpvc_sample_size(model, spec);
  AsymptoticSummary a = asymptotic_sample_size(model, spec);
  double eps2 = spec.epsilon * spec.epsilon;

  std::cout.precision(17);
  std::cout << "family      " << family_name(family_of(model)) << "\n"
            << "epsilon     " << spec.epsilon << "  (epsilon^2 = " << eps2
            << ")\n"
            << "k           " << spec.k << "\n"
            << "n           " << r.n << "\n"
            << "lhs(n)      " << r.lhs_at_n << "\n";
  if (r.lhs_at_n_minus_1) {
    std::cout << "lhs(n-1)    " << *r.lhs_at_n_minus_1 << "\n";
    if (std::abs(*r.lhs_at_n_minus_1 - eps2) <= 1e-9 * eps2)
      std::cout << "note: criterion boundary attained exactly at n-1; the "
                   "strict inequality selects n\n";
  }
  std::cout << "n_asymptotic " << a.n_asymptotic << "\n";

  if (!c.run.out.empty()) {
    Emitter e;
    e.header = provenance(hash, c.run);
    ordered_json row;
    row["family"] = family_name(family_of(model));
    row["epsilon"] = spec.epsilon;
    row["k"] = spec.k;
    row["n"] = r.n;
    row["lhs_at_n"] = r.lhs_at_n;
    row["lhs_at_n_minus_1"] = json_or_null(r.lhs_at_n_minus_1);
    row["n_asymptotic"] = a.n_asymptotic;
    row["gamma"] = a.gamma;
    row["evaluations"] = r.evaluations;
    e.rows.push_back(std::move(row));
    e.write(c.run);
  }
}

void run_sweep(const SweepCmd& c, const std::string& hash) {
  Family family = c.model.resolved_family();
  CriterionSpec spec(parse_epsilon(c.eps_text), c.k);
  GridAxis a1 = parse_axis(c.axis1), a2 = parse_axis(c.axis2);
  auto cells = sweep_sample_sizes(family, c.model.base_moments(), a1, a2,
                                  spec, c.run.threads);
  Emitter e;
  e.header = provenance(hash, c.run);
  for (const auto& cell : cells) {
    ordered_json row;
    row[a1.name] = cell.v1;
    row[a2.name] = cell.v2;
    row["n"] = cell.n ? ordered_json(*cell.n) : ordered_json(nullptr);
    row["note"] = cell.note;
    e.rows.push_back(std::move(row));
  }
  e.write(c.run);
}

void run_evaluate(const EvaluateCmd& c, const std::string& hash) {
  Family family = c.model.resolved_family();
  Emitter e;
  e.header = provenance(hash, c.run);

  if (c.kind == "exceedance") {
    ConjugateModel model = c.model.resolve();
    TrueParameter truth = c.truth.resolve(family);
    auto ks = parse_double_list(c.k_list, "--k-list");
    std::vector<long> ns;
    for (double v : parse_double_list(c.n_list, "--n-list"))
      ns.push_back(static_cast<long>(v));
    auto points = exceedance_curve(model, truth, ks, ns, c.replicates,
                                   c.run.seed, c.run.threads);
    for (const auto& p : points) {
      ordered_json row;
      row["n"] = p.n;
      row["k"] = p.k;
      row["exceedance"] = p.exceedance;
      row["std_error"] = p.std_error;
      row["replicates"] = p.replicates;
      e.rows.push_back(std::move(row));
    }
    e.write(c.run);
    return;
  }

  GridAxis a1 = parse_axis(c.axis1), a2 = parse_axis(c.axis2);
  MomentMap base = c.model.base_moments();

  if (c.kind == "coverage") {
    CriterionSpec spec(parse_epsilon(c.eps_text), c.k);
    auto cells = coverage_grid(family, base, a1, a2, spec, c.replicates,
                               c.run.seed, c.run.threads);
    for (const auto& cell : cells) {
      ordered_json row;
      row[a1.name] = cell.v1;
      row[a2.name] = cell.v2;
      row["n"] = cell.n ? ordered_json(*cell.n) : ordered_json(nullptr);
      row["rate"] = json_or_null(cell.value);
      row["note"] = cell.note;
      e.rows.push_back(std::move(row));
    }
    e.write(c.run);
    return;
  }

  std::optional<Dataset> storage;
  DataSource source = resolve_source(c, family, storage);

  if (c.kind == "eps-sweep") {
    std::vector<double> epsilons;
    for (const auto& part : split(c.eps_list, ','))
      epsilons.push_back(parse_epsilon(part));
    if (epsilons.empty()) throw invalid_input("--eps-list is empty");
    auto grids = epsilon_sweep(family, base, a1, a2, c.k, epsilons, source,
                               c.replicates, c.run.seed, c.run.threads);
    for (const auto& grid : grids) {
      for (const auto& cell : grid.cells) {
        ordered_json row;
        row["epsilon"] = grid.epsilon;
        row[a1.name] = cell.v1;
        row[a2.name] = cell.v2;
        row["n"] = cell.n ? ordered_json(*cell.n) : ordered_json(nullptr);
        row["rate"] = json_or_null(cell.value);
        row["note"] = cell.note;
        e.rows.push_back(std::move(row));
      }
    }
    e.write(c.run);
    return;
  }

  if (c.kind != "success")
    throw invalid_input("unknown --kind '" + c.kind +
                        "' (success, coverage, exceedance, eps-sweep)");
  CriterionSpec spec(parse_epsilon(c.eps_text), c.k);
  auto cells = evaluate_grid(family, base, a1, a2, spec, source, c.replicates,
                             c.run.seed, c.run.threads);
  for (const auto& cell : cells) {
    ordered_json row;
    row[a1.name] = cell.v1;
    row[a2.name] = cell.v2;
    row["n"] = cell.n ? ordered_json(*cell.n) : ordered_json(nullptr);
    row["rate"] = json_or_null(cell.value);
    row["note"] = cell.note;
    e.rows.push_back(std::move(row));
  }
  e.write(c.run);
}

void run_asymptotics(const AsymptoticsCmd& c, const std::string& hash) {
  ConjugateModel model = c.model.resolve();
  std::cout.precision(17);
  std::cout << "family          " << family_name(family_of(model)) << "\n"
            << "gamma           " << gamma_coefficient(model) << "\n"
            << "E_pi[I^-1]      " << prior_inv_fisher_mean(model) << "\n";

  ordered_json row;
  row["family"] = family_name(family_of(model));
  row["gamma"] = gamma_coefficient(model);
  row["e_pi_inv_fisher"] = prior_inv_fisher_mean(model);
  row["s_infinity"] = nullptr;
  row["n_asymptotic"] = nullptr;
  row["k_star"] = nullptr;
  row["k_star_upper_bound"] = nullptr;

  if (!c.eps_text.empty()) {
    CriterionSpec spec(parse_epsilon(c.eps_text), c.k);
    AsymptoticSummary a = asymptotic_sample_size(model, spec);
    std::cout << "s_infinity      " << a.s_infinity << "\n"
              << "n_asymptotic    " << a.n_asymptotic << "\n";
    row["s_infinity"] = a.s_infinity;
    row["n_asymptotic"] = a.n_asymptotic;
  }
  if (c.truth.given()) {
    ThresholdReport t = k_star(model, c.truth.resolve(family_of(model)));
    std::cout << "k_star          " << t.k_star << "\n"
              << "rho             " << t.rho << "\n";
    row["k_star"] = t.k_star;
  }
  if (c.o_region->count() || c.o_region_sds->count()) {
    ParameterInterval box =
        c.o_region->count()
            ? [&] {
                auto parts = split(c.region, ':');
                if (parts.size() != 2)
                  throw invalid_input("--region must be lo:hi");
                return ParameterInterval{std::stod(parts[0]),
                                         std::stod(parts[1])};
              }()
            : default_region(model, c.region_sds);
    double ub = k_star_upper_bound(model, box);
    std::cout << "region          [" << box.lo << ", " << box.hi << "]\n"
              << "k_star_bound    " << ub << "\n";
    row["k_star_upper_bound"] = ub;
  }

  if (!c.run.out.empty()) {
    Emitter e;
    e.header = provenance(hash, c.run);
    e.rows.push_back(std::move(row));
    e.write(c.run);
  }
}

void run_surrogate(const SurrogateCmd& c, const std::string& hash) {
  if (c.run.out.empty()) throw invalid_input("surrogate needs --out");
  if (!c.truth.given()) throw invalid_input("surrogate needs a truth");
  Family family = c.model.resolved_family();
  TrueParameter truth = c.truth.resolve(family);
  std::mt19937_64 rng = substream(c.run.seed);
  Dataset d = make_surrogate(truth, c.size, rng, c.label);
  write_csv(c.run.out, d, provenance(hash, c.run));
  std::cout << "wrote " << d.n() << " rows to " << c.run.out << "\n";
}

void run_coverage(const CoverageCmd& c, const std::string& hash) {
  ConjugateModel model = c.model.resolve();
  long n = c.n;
  if (!c.o_n->count()) {
    if (c.eps_text.empty())
      throw invalid_input("coverage needs --n or --eps");
    n = vpvc_sample_size(model, CriterionSpec(parse_epsilon(c.eps_text), c.k))
            .n;
  }
  EvaluationReport r = coverage_probability(model, n, c.k, c.replicates,
                                            c.run.seed, c.run.threads);
  std::cout.precision(17);
  std::cout << "n          " << n << "\n"
            << "k          " << c.k << "\n"
            << "coverage   " << r.rate << "\n"
            << "std_error  " << r.std_error << "\n";
  if (!c.run.out.empty()) {
    Emitter e;
    e.header = provenance(hash, c.run);
    ordered_json row;
    row["family"] = family_name(family_of(model));
    row["n"] = n;
    row["k"] = c.k;
    row["rate"] = r.rate;
    row["std_error"] = r.std_error;
    row["replicates"] = r.replicates;
    e.rows.push_back(std::move(row));
    e.write(c.run);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sample-size determination for conjugate Bayesian models"};
  app.set_config("--config", "", "INI config file; flags override");
  app.require_subcommand(1);

  auto sub = [&app](const char* name, const char* desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->configurable();
    return cmd;
  };

  SsdCmd ssd_cmd;
  auto* c_ssd = sub("ssd", "solve for the minimal sample size");
  ssd_cmd.model.add_to(c_ssd);
  ssd_cmd.run.add_to(c_ssd);
  c_ssd->add_option("--eps", ssd_cmd.eps_text, "precision target")->required();
  c_ssd->add_option("--k", ssd_cmd.k, "variance-penalty weight");

  SweepCmd sweep_cmd;
  auto* c_sweep =
      sub("sweep", "sample sizes over a hyperparameter grid");
  sweep_cmd.model.add_to(c_sweep);
  sweep_cmd.run.add_to(c_sweep);
  c_sweep->add_option("--eps", sweep_cmd.eps_text, "precision target")
      ->required();
  c_sweep->add_option("--k", sweep_cmd.k, "variance-penalty weight");
  c_sweep->add_option("--axis1", sweep_cmd.axis1, "name:lo:hi:steps")
      ->required();
  c_sweep->add_option("--axis2", sweep_cmd.axis2, "name:lo:hi:steps")
      ->required();

  EvaluateCmd eval_cmd;
  auto* c_eval = sub(
      "evaluate", "success / coverage / exceedance / eps-sweep experiments");
  eval_cmd.model.add_to(c_eval);
  eval_cmd.truth.add_to(c_eval);
  eval_cmd.run.add_to(c_eval);
  c_eval->add_option("--kind", eval_cmd.kind,
                     "success, coverage, exceedance, eps-sweep");
  c_eval->add_option("--eps", eval_cmd.eps_text, "precision target");
  c_eval->add_option("--k", eval_cmd.k, "variance-penalty weight");
  c_eval->add_option("--axis1", eval_cmd.axis1, "name:lo:hi:steps");
  c_eval->add_option("--axis2", eval_cmd.axis2, "name:lo:hi:steps");
  c_eval->add_option("--data", eval_cmd.data_path, "empirical CSV source");
  c_eval->add_option("--column", eval_cmd.column, "CSV column to load");
  c_eval->add_flag("--no-replacement", eval_cmd.no_replacement,
                   "resample without replacement");
  c_eval->add_option("--replicates", eval_cmd.replicates, "MC replicates")
      ->check(CLI::PositiveNumber);
  c_eval->add_option("--k-list", eval_cmd.k_list, "comma list (exceedance)");
  c_eval->add_option("--n-list", eval_cmd.n_list, "comma list (exceedance)");
  c_eval->add_option("--eps-list", eval_cmd.eps_list,
                     "comma list, decreasing (eps-sweep)");

  AsymptoticsCmd asym_cmd;
  auto* c_asym = sub(
      "asymptotics", "gamma, asymptotic sample size, threshold k*");
  asym_cmd.model.add_to(c_asym);
  asym_cmd.truth.add_to(c_asym);
  asym_cmd.run.add_to(c_asym);
  c_asym->add_option("--eps", asym_cmd.eps_text, "precision target");
  c_asym->add_option("--k", asym_cmd.k, "variance-penalty weight");
  asym_cmd.o_region =
      c_asym->add_option("--region", asym_cmd.region, "lo:hi box for the "
                                                      "k* upper bound");
  asym_cmd.o_region_sds = c_asym->add_option(
      "--region-sds", asym_cmd.region_sds,
      "box = prior mean +/- this many sds, clipped to the domain");

  SurrogateCmd surr_cmd;
  auto* c_surr = sub(
      "surrogate", "draw a synthetic dataset at a fixed truth");
  surr_cmd.model.add_to(c_surr);
  surr_cmd.truth.add_to(c_surr);
  surr_cmd.run.add_to(c_surr);
  c_surr->add_option("--size", surr_cmd.size, "rows to draw")
      ->required()
      ->check(CLI::PositiveNumber);
  c_surr->add_option("--label", surr_cmd.label, "column label");

  CoverageCmd cov_cmd;
  auto* c_cov = sub(
      "coverage", "P(u^2 <= ubar^2 + k sd) under the prior predictive");
  cov_cmd.model.add_to(c_cov);
  cov_cmd.run.add_to(c_cov);
  c_cov->add_option("--eps", cov_cmd.eps_text,
                    "precision target (solves n when --n absent)");
  c_cov->add_option("--k", cov_cmd.k, "variance-penalty weight");
  cov_cmd.o_n = c_cov->add_option("--n", cov_cmd.n, "sample size")
                    ->check(CLI::PositiveNumber);
  c_cov->add_option("--replicates", cov_cmd.replicates, "MC replicates")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitConfig;
  }

  // Hash only the settings that determine the computed numbers: output
  // plumbing (out, format, threads, config) never changes results, so a
  // rerun into a different file keeps the same hash.
  std::string canonical;
  {
    std::istringstream cfg(app.config_to_str(true, false));
    std::string line;
    while (std::getline(cfg, line)) {
      auto eq = line.find('=');
      std::string key = eq == std::string::npos ? "" : line.substr(0, eq);
      if (key == "out" || key == "format" || key == "threads" ||
          key == "config")
        continue;
      canonical += line;
      canonical += '\n';
    }
  }
  char hash_hex[17];
  std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical)));
  std::string hash(hash_hex);

  try {
    if (app.got_subcommand(c_ssd)) run_ssd(ssd_cmd, hash);
    if (app.got_subcommand(c_sweep)) run_sweep(sweep_cmd, hash);
    if (app.got_subcommand(c_eval)) run_evaluate(eval_cmd, hash);
    if (app.got_subcommand(c_asym)) run_asymptotics(asym_cmd, hash);
    if (app.got_subcommand(c_surr)) run_surrogate(surr_cmd, hash);
    if (app.got_subcommand(c_cov)) run_coverage(cov_cmd, hash);
  } catch (const budget_exceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
