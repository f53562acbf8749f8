#include "bmr/nbmr.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "bmr/window_rules.hpp"

namespace bmr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kStickCap = 1.0 - 1e-12;  // keeps log(1 - v_k) finite

std::vector<int> cluster_counts(const DPState& state) {
  std::vector<int> n_k(state.K, 0);
  for (int z : state.alloc) ++n_k[z];
  return n_k;
}

// log prod_{k<K} Beta(v_k; 1, M), the stick likelihood driving the M update
double stick_loglik(const DPState& state, double m) {
  double ll = 0.0;
  for (int k = 0; k + 1 < state.K; ++k)
    ll += std::log(m) + (m - 1.0) * std::log1p(-state.sticks[k]);
  return ll;
}

}  // namespace

Eigen::VectorXd stick_weights(const Eigen::VectorXd& sticks) {
  const Eigen::Index K = sticks.size();
  if (K < 1) throw std::invalid_argument("stick_weights: empty sticks");
  if (sticks[K - 1] != 1.0)
    throw std::invalid_argument("stick_weights: last stick must equal 1");
  Eigen::VectorXd w(K);
  double remaining = 1.0;
  double partial = 0.0;
  for (Eigen::Index k = 0; k + 1 < K; ++k) {
    w[k] = sticks[k] * remaining;
    // keep the running (left-to-right) sum at or below one so the last
    // weight closes it exactly
    if (w[k] > 1.0 - partial) w[k] = 1.0 - partial;
    remaining *= 1.0 - sticks[k];
    partial += w[k];
  }
  w[K - 1] = std::max(0.0, 1.0 - partial);
  return w;
}

double mixture_density(double u, const DPState& state) {
  double f = 0.0;
  for (int k = 0; k < state.K; ++k)
    if (std::abs(u) < state.atoms[k])
      f += state.weights[k] / (2.0 * state.atoms[k]);
  return f;
}

void gibbs_alloc(DPState& state, const Eigen::VectorXd& residuals, Rng& rng) {
  const Eigen::Index n = residuals.size();
  if (static_cast<Eigen::Index>(state.alloc.size()) != n)
    throw std::invalid_argument("gibbs_alloc: alloc length mismatch");
  std::vector<double> mass(state.K);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = std::abs(residuals[i]);
    double total = 0.0;
    for (int k = 0; k < state.K; ++k) {
      mass[k] = r < state.atoms[k]
                    ? state.weights[k] / (2.0 * state.atoms[k])
                    : 0.0;
      total += mass[k];
    }
    if (total <= 0.0)
      throw std::logic_error(
          "gibbs_alloc: no feasible cluster for a residual (invariant "
          "violation)");
    double u = rng.uniform() * total;
    int pick = state.K - 1;
    for (int k = 0; k < state.K; ++k) {
      u -= mass[k];
      if (u < 0.0) {
        pick = k;
        break;
      }
    }
    // the scan can fall through on round-off: land on the last feasible k
    while (mass[pick] == 0.0 && pick > 0) --pick;
    state.alloc[static_cast<std::size_t>(i)] = pick;
  }
}

void gibbs_sticks(DPState& state, Rng& rng) {
  const std::vector<int> n_k = cluster_counts(state);
  int downstream = 0;
  for (int k = state.K - 1; k >= 0; --k) {
    if (k == state.K - 1) {
      state.sticks[k] = 1.0;
    } else {
      const double a = 1.0 + n_k[k];
      const double b = state.concentration + downstream;
      state.sticks[k] = std::min(sample_beta(rng, a, b), kStickCap);
    }
    downstream += n_k[k];
  }
  state.weights = stick_weights(state.sticks);
}

void gibbs_atoms(DPState& state, const Eigen::VectorXd& residuals, Rng& rng) {
  const std::vector<int> n_k = cluster_counts(state);
  std::vector<double> a_k(state.K, 0.0);
  for (std::size_t i = 0; i < state.alloc.size(); ++i) {
    const double r = std::abs(residuals[static_cast<Eigen::Index>(i)]);
    a_k[state.alloc[i]] = std::max(a_k[state.alloc[i]], r);
  }
  for (int k = 0; k < state.K; ++k) {
    if (n_k[k] == 0) {
      state.atoms[k] = state.d * (1.0 - rng.uniform());  // (0, d]
      continue;
    }
    if (a_k[k] >= state.d)
      throw std::runtime_error(
          "gibbs_atoms: base-distribution endpoint too small (residual " +
          std::to_string(a_k[k]) + " >= d = " + std::to_string(state.d) +
          ")");
    // all-zero residuals in a cluster would pin the inverse cdf at zero
    const double a = std::max(a_k[k], 1e-12 * state.d);
    const double u = rng.uniform();
    if (n_k[k] == 1) {
      // density 1/sigma on (a, d]: sigma = a (d/a)^u
      state.atoms[k] = a * std::pow(state.d / a, u);
    } else {
      // density sigma^(-m) on (a, d] for m >= 2:
      //   F(s) = (a^(1-m) - s^(1-m)) / (a^(1-m) - d^(1-m))
      // inverted in the overflow-safe form
      //   sigma = a [1 - u (1 - (a/d)^(m-1))]^(-1/(m-1))
      const double m1 = static_cast<double>(n_k[k]) - 1.0;
      const double t = std::exp(m1 * std::log(a / state.d));
      state.atoms[k] = a * std::exp(-std::log(1.0 - u * (1.0 - t)) / m1);
    }
    // round-off guard: the conditional support is (a, d]
    state.atoms[k] = std::min(std::max(state.atoms[k],
                                       std::nextafter(a, state.d)),
                              state.d);
  }
}

Chain fit_nbmr(const Dataset& data, const NbmrHyper& hyper,
               const SamplerConfig& config, Rng& rng, NbmrReport* report,
               const SweepObserver& observer) {
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  if (hyper.truncation < 1)
    throw std::invalid_argument("fit_nbmr: truncation must be >= 1");
  if (!(0.0 < hyper.m_lo && hyper.m_lo < hyper.m_hi))
    throw std::invalid_argument("fit_nbmr: needs 0 < m_lo < m_hi");

  std::vector<BetaPrior> beta_priors = hyper.beta_priors;
  if (beta_priors.empty())
    beta_priors.assign(static_cast<std::size_t>(p), BetaPrior::normal(0, 100));
  if (static_cast<Eigen::Index>(beta_priors.size()) != p)
    throw std::invalid_argument("fit_nbmr: one beta prior per design column");

  Eigen::VectorXd beta = config.init.size() == 0 ? ols_init(data)
                                                 : config.init;
  if (beta.size() != p)
    throw std::invalid_argument("fit_nbmr: init length does not match p");
  Eigen::VectorXd resid = data.y - data.X * beta;

  const double d =
      hyper.d > 0.0 ? hyper.d : apply_sigma_rule(SigmaRule::kChebyshev, data);
  const double max_r = resid.cwiseAbs().maxCoeff();
  if (max_r >= d)
    throw std::runtime_error(
        "fit_nbmr: max |OLS residual| (" + std::to_string(max_r) +
        ") is not below d (" + std::to_string(d) +
        "); raise the base-distribution endpoint");

  DPState state;
  state.K = hyper.truncation;
  state.d = d;
  state.concentration = 0.5 * (hyper.m_lo + hyper.m_hi);
  state.alloc.assign(static_cast<std::size_t>(n), 0);
  state.atoms.resize(state.K);
  state.atoms[0] = d;  // cluster 1 holds everything at the start
  for (int k = 1; k < state.K; ++k) state.atoms[k] = d * (1.0 - rng.uniform());
  state.sticks.resize(state.K);
  for (int k = 0; k + 1 < state.K; ++k)
    state.sticks[k] =
        std::min(sample_beta(rng, 1.0, state.concentration), kStickCap);
  state.sticks[state.K - 1] = 1.0;
  state.weights = stick_weights(state.sticks);

  // allocated-uniform log likelihood in beta, -inf when any member leaves
  // its cluster's window
  auto beta_loglik = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd r = data.y - data.X * b;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sig = state.atoms[state.alloc[static_cast<std::size_t>(i)]];
      if (std::abs(r[i]) >= sig) return kNegInf;
      ll -= std::log(2.0 * sig);
    }
    return ll + log_beta_prior_density(b, beta_priors);
  };

  // proposal scales: per-coefficient OLS standard errors, adapted in burn-in
  std::vector<AdaptiveScale> beta_tuner(static_cast<std::size_t>(p));
  {
    const double sd_r = std::max(
        1e-3, std::sqrt(resid.squaredNorm() /
                        static_cast<double>(std::max<Eigen::Index>(1, n - p))));
    const Eigen::MatrixXd xtx_inv =
        (data.X.transpose() * data.X)
            .ldlt()
            .solve(Eigen::MatrixXd::Identity(p, p));
    for (Eigen::Index j = 0; j < p; ++j) {
      auto& t = beta_tuner[static_cast<std::size_t>(j)];
      t.scale = std::max(1e-3, sd_r * std::sqrt(std::max(0.0, xtx_inv(j, j))));
      t.target = config.target_acceptance;
      t.factor = config.adapt_factor;
      t.interval = config.adapt_interval;
    }
  }
  AdaptiveScale m_tuner;
  m_tuner.scale = 0.5;
  m_tuner.target = config.target_acceptance;
  m_tuner.factor = config.adapt_factor;
  m_tuner.interval = config.adapt_interval;

  Chain chain;
  chain.seed = rng.seed();
  chain.n_burnin = config.n_burnin;
  chain.n_keep = config.n_keep;
  for (Eigen::Index j = 0; j < p; ++j)
    chain.param_names.push_back(data.column_names[static_cast<std::size_t>(j)]);
  chain.param_names.emplace_back("sigma_bar");
  chain.param_names.emplace_back("occupied_clusters");
  chain.draws.reserve(config.n_keep);
  chain.log_target.reserve(config.n_keep);

  std::size_t kept_beta_props = 0, kept_beta_accs = 0;
  std::size_t kept_m_props = 0, kept_m_accs = 0;
  std::size_t sweeps_at_truncation = 0;

  const std::size_t total = config.n_burnin + config.n_keep;
  for (std::size_t sweep = 0; sweep < total; ++sweep) {
    const bool burnin = sweep < config.n_burnin;

    gibbs_alloc(state, resid, rng);
    gibbs_sticks(state, rng);
    gibbs_atoms(state, resid, rng);

    // Metropolis within Gibbs: one sub-step per coefficient
    double ll = beta_loglik(beta);
    for (Eigen::Index j = 0; j < p; ++j) {
      auto& t = beta_tuner[static_cast<std::size_t>(j)];
      Eigen::VectorXd prop = beta;
      prop[j] += t.scale * rng.normal();
      const double ll_prop = beta_loglik(prop);
      const double delta = ll_prop - ll;
      bool acc = false;
      if (std::isfinite(delta) &&
          (delta >= 0.0 || std::log(1.0 - rng.uniform()) < delta)) {
        beta = prop;
        ll = ll_prop;
        acc = true;
      }
      if (burnin)
        t.record(acc);
      else {
        ++kept_beta_props;
        if (acc) ++kept_beta_accs;
      }
    }
    resid = data.y - data.X * beta;

    // random walk on log M inside its uniform prior (Jacobian included)
    {
      const double log_m = std::log(state.concentration);
      const double log_m_prop = log_m + m_tuner.scale * rng.normal();
      const double m_prop = std::exp(log_m_prop);
      bool acc = false;
      if (m_prop > hyper.m_lo && m_prop < hyper.m_hi) {
        const double delta = stick_loglik(state, m_prop) -
                             stick_loglik(state, state.concentration) +
                             log_m_prop - log_m;
        if (delta >= 0.0 || std::log(1.0 - rng.uniform()) < delta) {
          state.concentration = m_prop;
          acc = true;
        }
      }
      if (burnin)
        m_tuner.record(acc);
      else {
        ++kept_m_props;
        if (acc) ++kept_m_accs;
      }
    }

    std::set<int> occupied(state.alloc.begin(), state.alloc.end());
    if (occupied.count(state.K - 1)) ++sweeps_at_truncation;

    if (observer) observer(state, sweep);

    if (!burnin) {
      Eigen::VectorXd row(p + 2);
      row.head(p) = beta;
      row[p] = state.weights.dot(state.atoms);
      row[p + 1] = static_cast<double>(occupied.size());
      chain.draws.push_back(std::move(row));
      chain.log_target.push_back(ll);
    }
  }

  chain.acceptance_rates = {
      kept_beta_props ? static_cast<double>(kept_beta_accs) / kept_beta_props
                      : 0.0,
      kept_m_props ? static_cast<double>(kept_m_accs) / kept_m_props : 0.0};
  chain.proposal_scales.resize(static_cast<std::size_t>(p) + 1);
  for (Eigen::Index j = 0; j < p; ++j)
    chain.proposal_scales[static_cast<std::size_t>(j)] =
        beta_tuner[static_cast<std::size_t>(j)].scale;
  chain.proposal_scales.back() = m_tuner.scale;

  if (report) {
    report->sweeps_at_truncation = sweeps_at_truncation;
    report->beta_acceptance = chain.acceptance_rates[0];
    report->m_acceptance = chain.acceptance_rates[1];
  }
  return chain;
}

}  // namespace bmr
