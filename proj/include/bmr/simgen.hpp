#pragma once

#include "bmr/model_core.hpp"
#include "bmr/special_math.hpp"

namespace bmr {

enum class Example1Case { kNormal, kFisherZ, kContaminated };

Example1Case parse_example1_case(const std::string& name);

// y = b0 + b1 x + e with x ~ N(0,1) and a zero-mode error:
//   normal        e ~ N(0,1)
//   fisherz       e = 0.5 log Z, Z ~ F(2,2)
//   contaminated  e ~ 0.8 N(0, 1/4) + 0.2 N(2.5, 1/4)   (variances)
// Returns a Dataset whose design is [intercept, x1].
Dataset gen_example1(std::size_t n, Example1Case error_case, double beta0,
                     double beta1, Rng& rng);

// Error scale for the heteroscedastic log-gamma design:
//   lambda = [(1 + 2 E(x) v + E(x^2) v^2) * trigamma(alpha)]^(-1/2)
// with E(x) = 3/sqrt(6), E(x^2) = 5/2, the analytic moments of the
// unit-variance chi-square(3) covariate. Calibrated so the error's
// expected conditional variance E{Var[(1+vx)e | x]} is one.
double example2_error_scale(double alpha, double v);

// y = b0 + b1 x + (1 + v x) e with x = chisq3/sqrt(6) and
// e = -lambda ln Z, Z ~ Gamma(shape alpha, scale 1/alpha); the error has
// zero mode for every alpha. Returns a Dataset with [intercept, x1].
Dataset gen_example2(std::size_t n, double alpha, double v, double beta0,
                     double beta1, Rng& rng);

// A named, seeded scenario from either study; the usual unit for batch
// replications.
struct ScenarioSpec {
  int example = 1;
  std::size_t n = 100;
  Example1Case error_case = Example1Case::kNormal;  // example 1
  double alpha = 5.0;                               // example 2
  double v = 0.0;
  double beta0 = 1.0;  // (1, 2) for example 1, (0, 1) for example 2
  double beta1 = 2.0;
  std::uint64_t seed = 0;

  static ScenarioSpec example1(std::size_t n, Example1Case error_case,
                               std::uint64_t seed);
  static ScenarioSpec example2(std::size_t n, double alpha, double v,
                               std::uint64_t seed);
};

Dataset gen_scenario(const ScenarioSpec& spec);

}  // namespace bmr
