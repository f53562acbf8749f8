#include "bmr/pbmr.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bmr {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
}  // namespace

BetaPrior BetaPrior::normal(double mean, double sd) {
  if (!(sd > 0.0)) throw std::invalid_argument("normal prior: sd must be > 0");
  return {false, mean, sd};
}

SigmaPrior SigmaPrior::fixed(double value) {
  if (!(value > 0.0))
    throw std::invalid_argument("fixed sigma: value must be > 0");
  SigmaPrior p;
  p.is_fixed = true;
  p.value = value;
  return p;
}

SigmaPrior SigmaPrior::uniform(double w1, double w2) {
  if (!(0.0 < w1 && w1 < w2))
    throw std::invalid_argument("sigma prior: needs 0 < w1 < w2");
  SigmaPrior p;
  p.is_fixed = false;
  p.w1 = w1;
  p.w2 = w2;
  return p;
}

double log_beta_prior_density(const Eigen::VectorXd& beta,
                              const std::vector<BetaPrior>& priors) {
  if (static_cast<std::size_t>(beta.size()) != priors.size())
    throw std::invalid_argument(
        "log_beta_prior_density: one prior per coefficient");
  double lp = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    const BetaPrior& bp = priors[static_cast<std::size_t>(j)];
    if (bp.is_flat) continue;
    const double z = (beta[j] - bp.mean) / bp.sd;
    lp += -0.5 * z * z - std::log(bp.sd) - kLogSqrt2Pi;
  }
  return lp;
}

double pbmr_log_posterior(const ModeParams& params, const Dataset& data,
                          const PriorSpec& prior) {
  if (static_cast<Eigen::Index>(prior.beta_priors.size()) != data.p())
    throw std::invalid_argument(
        "pbmr_log_posterior: one beta prior per design column");

  double lp = 0.0;
  if (prior.sigma_prior.is_fixed) {
    if (params.sigma != prior.sigma_prior.value) return kNegInf;
  } else {
    if (params.sigma <= prior.sigma_prior.w1 ||
        params.sigma >= prior.sigma_prior.w2)
      return kNegInf;
    lp -= std::log(prior.sigma_prior.w2 - prior.sigma_prior.w1);
  }
  lp += log_beta_prior_density(params.beta, prior.beta_priors);
  return lp + mode_working_loglik(params, data);
}

Chain fit_pbmr(const Dataset& data, const PriorSpec& prior,
               const SamplerConfig& config, Rng& rng) {
  const Eigen::Index p = data.p();
  const bool sample_sigma = !prior.sigma_prior.is_fixed;
  const Eigen::Index dim = p + (sample_sigma ? 1 : 0);

  const Eigen::VectorXd beta0 = ols_init(data);
  const double sigma0 = sample_sigma
                            ? 0.5 * (prior.sigma_prior.w1 + prior.sigma_prior.w2)
                            : prior.sigma_prior.value;
  if (!sample_sigma &&
      indicator_count(ModeParams{beta0, sigma0}, data) == 0)
    throw std::runtime_error(
        "fit_pbmr: no observation captured at the initial state; "
        "use a larger fixed sigma");

  SamplerConfig cfg = config;
  if (cfg.init.size() == 0) {
    cfg.init.resize(dim);
    cfg.init.head(p) = beta0;
    if (sample_sigma) cfg.init[p] = sigma0;
  } else if (cfg.init.size() != dim) {
    throw std::invalid_argument("fit_pbmr: init length does not match state");
  }
  if (cfg.initial_scales.size() == 0) {
    // residual-based coefficient scales; adaptation refines them in burn-in
    const Eigen::VectorXd resid = data.y - data.X * beta0;
    const double sd_r = std::max(
        1e-3, std::sqrt(resid.squaredNorm() /
                        static_cast<double>(std::max<Eigen::Index>(
                            1, data.n() - p))));
    const Eigen::MatrixXd xtx_inv =
        (data.X.transpose() * data.X).ldlt().solve(
            Eigen::MatrixXd::Identity(p, p));
    cfg.initial_scales.resize(dim);
    for (Eigen::Index j = 0; j < p; ++j)
      cfg.initial_scales[j] =
          std::max(1e-3, sd_r * std::sqrt(std::max(0.0, xtx_inv(j, j))));
    if (sample_sigma)
      cfg.initial_scales[p] =
          (prior.sigma_prior.w2 - prior.sigma_prior.w1) / 6.0;
  } else if (cfg.initial_scales.size() != dim) {
    throw std::invalid_argument("fit_pbmr: scales length does not match state");
  }

  auto target = [&data, &prior, p, sample_sigma,
                 sigma_fixed = sigma0](const Eigen::VectorXd& state) {
    ModeParams mp;
    mp.beta = state.head(p);
    mp.sigma = sample_sigma ? state[p] : sigma_fixed;
    if (!(mp.sigma > 0.0)) return kNegInf;
    return pbmr_log_posterior(mp, data, prior);
  };

  Chain chain = run_chain(target, cfg, rng);
  chain.param_names.clear();
  for (Eigen::Index j = 0; j < p; ++j)
    chain.param_names.push_back(data.column_names[static_cast<std::size_t>(j)]);
  if (sample_sigma) chain.param_names.push_back("sigma");
  return chain;
}

Eigen::VectorXd map_estimate(const Chain& chain) {
  if (chain.draws.empty()) throw std::invalid_argument("map_estimate: empty chain");
  std::size_t best = 0;
  for (std::size_t i = 1; i < chain.log_target.size(); ++i)
    if (chain.log_target[i] > chain.log_target[best]) best = i;
  return chain.draws[best];
}

}  // namespace bmr
