#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "bmr/model_core.hpp"
#include "bmr/pbmr.hpp"
#include "bmr/rw_sampler.hpp"

namespace bmr {

// Truncated stick-breaking state of the uniform scale mixture.
struct DPState {
  int K = 0;                  // truncation level
  Eigen::VectorXd sticks;     // v_1..v_K, v_K == 1
  Eigen::VectorXd weights;    // w_k = v_k prod_{l<k} (1 - v_l)
  Eigen::VectorXd atoms;      // sigma_k in (0, d]
  std::vector<int> alloc;     // cluster index per observation, 0-based
  double concentration = 1.0; // M
  double d = 0.0;             // base-distribution upper endpoint
};

// w_k = v_k prod_{l<k}(1 - v_l); the last weight is set to one minus the
// rest so the sum is exactly 1. Requires v.back() == 1.
Eigen::VectorXd stick_weights(const Eigen::VectorXd& sticks);

// sum_k w_k (1/(2 sigma_k)) I(-sigma_k < u < sigma_k).
double mixture_density(double u, const DPState& state);

// z_i ~ Categorical with masses w_k/(2 sigma_k) I(|r_i| < sigma_k). Every
// observation must have at least one feasible cluster (the sweep order
// guarantees it); an all-zero mass row throws.
void gibbs_alloc(DPState& state, const Eigen::VectorXd& residuals, Rng& rng);

// v_k ~ Beta(1 + n_k, M + sum_{l>k} n_l), v_K := 1; weights recomputed.
void gibbs_sticks(DPState& state, Rng& rng);

// Occupied cluster k: sigma_k ~ density proportional to sigma^(-n_k) on
// (a_k, d], a_k = max |r_i| over members, drawn by inverse CDF. Empty
// cluster: sigma_k ~ Uniform(0, d]. Throws when a_k >= d.
void gibbs_atoms(DPState& state, const Eigen::VectorXd& residuals, Rng& rng);

struct NbmrHyper {
  int truncation = 30;
  double m_lo = 0.1;   // uniform prior on the concentration M
  double m_hi = 10.0;
  double d = 0.0;      // 0: chebyshev rule on the OLS residuals
  std::vector<BetaPrior> beta_priors;  // empty: Normal(0, 100) each
};

struct NbmrReport {
  std::size_t sweeps_at_truncation = 0;  // sweeps occupying cluster K
  double beta_acceptance = 0.0;          // kept phase, averaged over coords
  double m_acceptance = 0.0;
};

using SweepObserver = std::function<void(const DPState&, std::size_t sweep)>;

// Blocked Gibbs: allocations, sticks, atoms, one Metropolis sub-step per
// coefficient against the allocated-uniform likelihood, then a random-walk
// update of log M within its uniform prior. The chain stores the beta
// draws plus derived columns sigma_bar = sum w_k sigma_k and
// occupied_clusters. Requires max |OLS residual| < d.
Chain fit_nbmr(const Dataset& data, const NbmrHyper& hyper,
               const SamplerConfig& config, Rng& rng,
               NbmrReport* report = nullptr,
               const SweepObserver& observer = nullptr);

}  // namespace bmr
