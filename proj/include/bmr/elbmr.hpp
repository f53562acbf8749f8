#pragma once

#include <Eigen/Dense>

#include "bmr/model_core.hpp"
#include "bmr/pbmr.hpp"
#include "bmr/rw_sampler.hpp"

namespace bmr {

struct ELSolution {
  Eigen::VectorXd lambda;   // multiplier, length p
  Eigen::VectorXd weights;  // p_i, empty when infeasible
  double log_el_ratio = 0.0;  // log R(beta) <= 0, -inf when infeasible
  bool feasible = false;
};

// Mode moment row: (y - x'beta) * I(|y - x'beta| < sigma) * x, strict
// inequality at the window edge.
Eigen::VectorXd moment_g(const Eigen::VectorXd& x, double y,
                         const Eigen::VectorXd& beta, double sigma);

// Inner profile solve for moment rows G (n x p): maximizes the log-star
// convexified dual sum_i log*(1 + lambda'g_i) by Newton with backtracking.
// On a feasible optimum (all 1 + lambda'g_i > 1/n): p_i = 1/(n(1+lambda'g_i))
// and log_el_ratio = -sum_i log(1 + lambda'g_i). A failed per-coordinate
// sign condition or a boundary optimum is reported infeasible, not an
// error. Non-convergence after max_iter throws with the gradient norm.
ELSolution el_inner_solve(const Eigen::MatrixXd& G, double tol = 1e-11,
                          int max_iter = 200);

// log R(beta): assembles the moment rows at (beta, sigma) and runs the
// inner solve.
double profile_log_el(const Eigen::VectorXd& beta, const Dataset& data,
                      double sigma);

// Chain over beta with target log prior + log R(beta); sigma is held fixed.
// Betas whose moment rows have fewer than ceil(n/4) nonzero entries are
// rejected outright (the all-outside-window plateau would otherwise look
// as good as the data region).
Chain fit_elbmr(const Dataset& data, const std::vector<BetaPrior>& prior,
                double sigma, const SamplerConfig& config, Rng& rng);

// (1/n) sum_i g_i g_i'. The minimum eigenvalue (the positive-definiteness
// check of the existence conditions) is returned through min_eigenvalue
// when non-null.
Eigen::MatrixXd el_v11(const Eigen::MatrixXd& G,
                       double* min_eigenvalue = nullptr);

}  // namespace bmr
