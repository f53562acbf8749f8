#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bmr/special_math.hpp"

namespace bmr {

// Post-burn-in draws of one MCMC run plus provenance.
struct Chain {
  std::vector<std::string> param_names;   // one per stored column
  std::vector<Eigen::VectorXd> draws;     // kept draws, in order
  std::vector<double> log_target;         // aligned with draws
  std::vector<double> acceptance_rates;   // per updated component, kept phase
  std::vector<double> proposal_scales;    // frozen scales used after burn-in
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::size_t n_burnin = 0;
  std::size_t n_keep = 0;
};

struct SamplerConfig {
  std::size_t n_burnin = 10000;
  std::size_t n_keep = 10000;
  Eigen::VectorXd init;             // empty: fitter derives from the data
  Eigen::VectorXd initial_scales;   // empty: fitter derives from the data
  double target_acceptance = 0.44;  // 0.234 is conventional for joint updates
  std::size_t adapt_interval = 100;
  double adapt_factor = 1.1;
  bool joint_update = false;  // whole-vector proposal instead of per-component
};

// Scale tuner used during burn-in: after every `interval` proposals the
// scale is multiplied by `factor` when the window acceptance rate exceeds
// the target and divided by it otherwise.
struct AdaptiveScale {
  double scale = 1.0;
  double target = 0.44;
  double factor = 1.1;
  std::size_t interval = 100;
  std::size_t proposals = 0;
  std::size_t accepts = 0;

  void record(bool accepted) {
    ++proposals;
    if (accepted) ++accepts;
    if (proposals >= interval) {
      const double rate =
          static_cast<double>(accepts) / static_cast<double>(proposals);
      if (rate > target)
        scale *= factor;
      else
        scale /= factor;
      proposals = 0;
      accepts = 0;
    }
  }
};

using LogTarget = std::function<double(const Eigen::VectorXd&)>;

// Random-walk Metropolis with Gaussian proposals. By default one component
// is updated per sub-step; scales adapt toward the target acceptance during
// burn-in and are frozen afterwards. A non-finite log target at a proposal
// is a rejection; a non-finite log target at the init throws.
Chain run_chain(const LogTarget& log_target, const SamplerConfig& config,
                Rng& rng);

// Geweke z comparing the first 10% to the last 50% of the kept draws, with
// plain sample variances. Zero-variance segments give z = 0. |z| > 3 is the
// non-convergence flag used in reports. Requires n_keep >= 100.
double geweke_z(const Chain& chain, std::size_t component);

// Initial-positive-sequence autocorrelation estimator; result in
// (0, n_keep]. A constant series returns n_keep. Requires n_keep >= 100.
double effective_sample_size(const Chain& chain, std::size_t component);

// Fraction of kept iterations whose parameter vector differs from the
// previous one; the chain-level mixing figure reported in summaries
// (derivable from a dump, unlike per-component acceptance).
double move_rate(const Chain& chain);

// Dump format: header `iter,<param names...>,log_target`, one row per kept
// draw, %.17g values.
void write_chain_csv(const Chain& chain, const std::string& path);

// Reads a dump back; n_burnin is not recoverable from the file and is
// left 0, n_keep is the row count.
Chain read_chain_csv(const std::string& path);

}  // namespace bmr
