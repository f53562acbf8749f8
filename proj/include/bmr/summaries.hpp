#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bmr/rw_sampler.hpp"

namespace bmr {

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double hpd_lo = 0.0;
  double hpd_hi = 0.0;
  // set when a distant near-optimal HPD window (width within 10%) exists,
  // i.e. the single-interval report may hide multimodality
  bool hpd_ambiguous = false;
};

// Pools the kept draws of all chains (equal parameter layout required) and
// reports mean, sd and the shortest 95% window over consecutive order
// statistics, ties broken toward the smaller left endpoint.
std::vector<ParamSummary> posterior_summary(const std::vector<Chain>& chains);

// Shortest window over sorted draws containing ceil(prob * N) consecutive
// order statistics.
std::pair<double, double> hpd_interval(std::vector<double> draws,
                                       double prob = 0.95);

// Sample covariance of the pooled draws, n-1 denominator.
Eigen::MatrixXd chain_covariance(const std::vector<Chain>& chains);

// N times the pooled chain covariance (N = pooled kept draws): the sequence
// scaling reported alongside classical-estimator asymptotics. Note the
// interpretation caveat in the README; this is the literal prescription.
Eigen::MatrixXd scaled_inverse_cov(const std::vector<Chain>& chains);

struct SummaryReport {
  std::vector<ParamSummary> params;
  std::vector<double> acceptance;  // per chain: kept-draw move rate
  std::vector<double> ess;         // per parameter: summed over chains
  std::vector<double> geweke;      // per parameter: max |z| over chains
  bool diagnostics_valid = false;  // false when chains are too short
  std::uint64_t seed = 0;
  std::string method = "pooled";
  std::size_t n_chains = 0;
};

SummaryReport summarize_chains(const std::vector<Chain>& chains,
                               const std::string& method, std::uint64_t seed);

// Fixed-schema JSON:
// {params: [{name, mean, sd, hpd95: [lo, hi]}], acceptance, ess, geweke_z,
//  seed, method, n_chains}
std::string summary_json(const SummaryReport& report);

// Aligned text rendering of the same numbers.
std::string summary_table(const SummaryReport& report);

}  // namespace bmr
