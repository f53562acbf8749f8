#include "bmr/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "bmr/elbmr.hpp"
#include "bmr/model_core.hpp"
#include "bmr/nbmr.hpp"
#include "bmr/pbmr.hpp"
#include "bmr/rw_sampler.hpp"
#include "bmr/simgen.hpp"
#include "bmr/summaries.hpp"
#include "bmr/window_rules.hpp"

namespace bmr {

namespace {

std::pair<double, double> parse_pair(const std::string& s, const char* flag) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw std::runtime_error(std::string(flag) + " expects LO,HI");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw std::runtime_error(std::string(flag) + " expects LO,HI");
  }
}

struct SimulateArgs {
  int example = 0;
  std::string error_case;
  double alpha = 0.0, v = 0.0;
  bool has_alpha = false, has_v = false;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::optional<double> beta0, beta1;
};

int cmd_simulate(const SimulateArgs& a) {
  Rng rng(a.seed);
  Dataset ds;
  if (a.example == 1) {
    if (a.error_case.empty())
      throw std::runtime_error("example 1 requires --case");
    if (a.has_alpha || a.has_v)
      throw std::runtime_error("--alpha/--v only apply to --example 2");
    ds = gen_example1(a.n, parse_example1_case(a.error_case),
                      a.beta0.value_or(1.0), a.beta1.value_or(2.0), rng);
  } else if (a.example == 2) {
    if (!a.error_case.empty())
      throw std::runtime_error("--case only applies to --example 1");
    if (!a.has_alpha || !a.has_v)
      throw std::runtime_error("example 2 requires --alpha and --v");
    ds = gen_example2(a.n, a.alpha, a.v, a.beta0.value_or(0.0),
                      a.beta1.value_or(1.0), rng);
  } else {
    throw std::runtime_error("--example must be 1 or 2");
  }
  save_dataset_csv(ds, a.out);
  return 0;
}

struct FitArgs {
  std::string data_path, response, method, out;
  bool no_intercept = false;
  std::optional<double> sigma;
  std::string sigma_rule;
  std::string sigma_prior;  // "LO,HI"
  bool sigma_on_raw = false;
  std::size_t iters = 10000, burnin = 10000, chains = 1;
  std::uint64_t seed = 0;
  std::optional<double> beta_prior_sd;
  int truncation = 30;
  std::optional<double> dp_d;
  std::string dp_m_prior;  // "LO,HI"
  bool table = false;
};

std::vector<BetaPrior> beta_priors_for(const Dataset& data,
                                       const FitArgs& a) {
  std::vector<BetaPrior> priors;
  for (Eigen::Index j = 0; j < data.p(); ++j)
    priors.push_back(a.beta_prior_sd
                         ? BetaPrior::normal(0.0, *a.beta_prior_sd)
                         : BetaPrior::flat());
  return priors;
}

void emit_outputs(const std::vector<std::string>& chain_files,
                  const std::string& method, std::uint64_t seed,
                  const std::string& prefix, bool table) {
  std::vector<Chain> chains;
  for (const auto& f : chain_files) chains.push_back(read_chain_csv(f));
  const SummaryReport rep = summarize_chains(chains, method, seed);

  const std::string json_path = prefix + ".summary.json";
  std::ofstream out(json_path);
  if (!out) throw std::runtime_error("cannot write " + json_path);
  out << summary_json(rep);
  out.close();

  if (table) std::cout << summary_table(rep);
  if (rep.diagnostics_valid) {
    for (std::size_t j = 0; j < rep.geweke.size(); ++j)
      if (rep.geweke[j] > 3.0)
        std::cerr << "warning: Geweke |z| = " << rep.geweke[j] << " for "
                  << rep.params[j].name << "; chain may not have converged\n";
  }
  for (const auto& s : rep.params)
    if (s.hpd_ambiguous)
      std::cerr << "warning: a second near-optimal HPD window exists for "
                << s.name << "; the posterior may be multimodal\n";
}

int cmd_fit(const FitArgs& a) {
  const Dataset data =
      load_dataset_csv(a.data_path, a.response, !a.no_intercept);

  const int sigma_flags = (a.sigma ? 1 : 0) + (a.sigma_rule.empty() ? 0 : 1) +
                          (a.sigma_prior.empty() ? 0 : 1);
  if (sigma_flags > 1)
    throw std::runtime_error(
        "--sigma, --sigma-rule and --sigma-prior are mutually exclusive");

  std::vector<std::string> chain_files;
  auto chain_file = [&](std::size_t c) {
    return a.out + ".chain" + std::to_string(c) + ".csv";
  };

  SamplerConfig config;
  config.n_burnin = a.burnin;
  config.n_keep = a.iters;

  if (a.method == "pbmr") {
    PriorSpec prior;
    prior.beta_priors = beta_priors_for(data, a);
    if (a.sigma) {
      prior.sigma_prior = SigmaPrior::fixed(*a.sigma);
    } else if (!a.sigma_rule.empty()) {
      prior.sigma_prior = SigmaPrior::fixed(apply_sigma_rule(
          parse_sigma_rule(a.sigma_rule), data, a.sigma_on_raw));
    } else if (!a.sigma_prior.empty()) {
      const auto [w1, w2] = parse_pair(a.sigma_prior, "--sigma-prior");
      prior.sigma_prior = SigmaPrior::uniform(w1, w2);
    } else {
      const auto [w1, w2] = sigma_prior_interval(
          data, SigmaRule::kSilverman, SigmaRule::kChebyshev, a.sigma_on_raw);
      prior.sigma_prior = SigmaPrior::uniform(w1, w2);
    }
    for (std::size_t c = 0; c < a.chains; ++c) {
      Rng rng(a.seed + c);
      const Chain chain = fit_pbmr(data, prior, config, rng);
      write_chain_csv(chain, chain_file(c));
      chain_files.push_back(chain_file(c));
    }
  } else if (a.method == "elbmr") {
    if (!a.sigma_prior.empty())
      throw std::runtime_error("elbmr holds sigma fixed; use --sigma or "
                               "--sigma-rule instead of --sigma-prior");
    double sigma;
    if (a.sigma)
      sigma = *a.sigma;
    else if (!a.sigma_rule.empty())
      sigma = apply_sigma_rule(parse_sigma_rule(a.sigma_rule), data,
                               a.sigma_on_raw);
    else
      throw std::runtime_error("elbmr requires --sigma or --sigma-rule");
    const std::vector<BetaPrior> priors = beta_priors_for(data, a);
    for (std::size_t c = 0; c < a.chains; ++c) {
      Rng rng(a.seed + c);
      const Chain chain = fit_elbmr(data, priors, sigma, config, rng);
      write_chain_csv(chain, chain_file(c));
      chain_files.push_back(chain_file(c));
    }
  } else if (a.method == "nbmr") {
    if (sigma_flags > 0)
      throw std::runtime_error(
          "nbmr draws the windows from the mixture; configure --dp-d, "
          "--dp-m-prior and --truncation instead of sigma flags");
    NbmrHyper hyper;
    hyper.truncation = a.truncation;
    if (a.dp_d) hyper.d = *a.dp_d;
    if (!a.dp_m_prior.empty()) {
      const auto [lo, hi] = parse_pair(a.dp_m_prior, "--dp-m-prior");
      hyper.m_lo = lo;
      hyper.m_hi = hi;
    }
    if (a.beta_prior_sd)
      hyper.beta_priors.assign(static_cast<std::size_t>(data.p()),
                               BetaPrior::normal(0.0, *a.beta_prior_sd));
    std::size_t truncation_hits = 0;
    for (std::size_t c = 0; c < a.chains; ++c) {
      Rng rng(a.seed + c);
      NbmrReport rep;
      const Chain chain = fit_nbmr(data, hyper, config, rng, &rep);
      truncation_hits += rep.sweeps_at_truncation;
      write_chain_csv(chain, chain_file(c));
      chain_files.push_back(chain_file(c));
    }
    if (truncation_hits > 0)
      std::cerr << "warning: the last mixture cluster was occupied in "
                << truncation_hits
                << " sweeps; consider a larger --truncation\n";
  } else {
    throw std::runtime_error("--method must be pbmr, nbmr or elbmr");
  }

  emit_outputs(chain_files, a.method, a.seed, a.out, a.table);
  return 0;
}

struct SummarizeArgs {
  std::vector<std::string> files;
  std::string method = "pooled";
  std::uint64_t seed = 0;
  std::string out;
  bool table = false;
};

int cmd_summarize(const SummarizeArgs& a) {
  emit_outputs(a.files, a.method, a.seed, a.out, a.table);
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"Bayesian mode regression"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "generate a study dataset as CSV");
  simulate->add_option("--example", sim.example, "study design, 1 or 2")
      ->required();
  simulate->add_option("--case", sim.error_case,
                       "example-1 error: normal|fisherz|contaminated");
  auto* alpha_opt =
      simulate->add_option("--alpha", sim.alpha, "example-2 gamma shape");
  auto* v_opt =
      simulate->add_option("--v", sim.v, "example-2 heteroscedasticity");
  simulate->add_option("--n", sim.n, "sample size")->required();
  simulate->add_option("--seed", sim.seed, "rng seed");
  simulate->add_option("--out", sim.out, "output CSV path")->required();
  simulate->add_option("--beta0", sim.beta0, "true intercept");
  simulate->add_option("--beta1", sim.beta1, "true slope");

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a mode regression");
  fit_cmd->add_option("--data", fit.data_path, "input CSV")->required();
  fit_cmd->add_option("--response", fit.response, "response column name")
      ->required();
  fit_cmd->add_flag("--no-intercept", fit.no_intercept,
                    "do not prepend an intercept column");
  fit_cmd->add_option("--method", fit.method, "pbmr|nbmr|elbmr")->required();
  fit_cmd->add_option("--sigma", fit.sigma, "fixed window half-width");
  fit_cmd->add_option("--sigma-rule", fit.sigma_rule,
                      "fix sigma by rule: empirical|chebyshev|silverman");
  fit_cmd->add_option("--sigma-prior", fit.sigma_prior,
                      "uniform sigma prior endpoints LO,HI");
  fit_cmd->add_flag("--sigma-on-raw", fit.sigma_on_raw,
                    "apply rules to raw y instead of OLS residuals");
  fit_cmd->add_option("--iters", fit.iters, "kept iterations per chain");
  fit_cmd->add_option("--burnin", fit.burnin, "burn-in iterations per chain");
  fit_cmd->add_option("--chains", fit.chains, "number of chains")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--seed", fit.seed, "rng seed; chain c uses seed+c");
  fit_cmd->add_option("--beta-prior-sd", fit.beta_prior_sd,
                      "Normal(0, sd) coefficient priors instead of flat");
  fit_cmd->add_option("--truncation", fit.truncation,
                      "nbmr stick-breaking truncation level");
  fit_cmd->add_option("--dp-d", fit.dp_d,
                      "nbmr base-distribution upper endpoint");
  fit_cmd->add_option("--dp-m-prior", fit.dp_m_prior,
                      "nbmr concentration prior endpoints LO,HI");
  fit_cmd->add_option("--out", fit.out, "output prefix")->required();
  fit_cmd->add_flag("--table", fit.table, "print a table rendering");

  SummarizeArgs summ;
  CLI::App* summarize = app.add_subcommand(
      "summarize", "pool chain dumps into a summary JSON");
  summarize->add_option("files", summ.files, "chain CSV files")
      ->required()
      ->expected(-1);
  summarize->add_option("--method", summ.method, "method label for the JSON");
  summarize->add_option("--seed", summ.seed, "seed label for the JSON");
  summarize->add_option("--out", summ.out, "output prefix")->required();
  summarize->add_flag("--table", summ.table, "print a table rendering");

  std::vector<const char*> argv;
  argv.push_back("bmr");
  for (const auto& s : args) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    sim.has_alpha = alpha_opt->count() > 0;
    sim.has_v = v_opt->count() > 0;
    if (simulate->parsed()) return cmd_simulate(sim);
    if (fit_cmd->parsed()) return cmd_fit(fit);
    if (summarize->parsed()) return cmd_summarize(summ);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace bmr
