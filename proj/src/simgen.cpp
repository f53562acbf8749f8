#include "bmr/simgen.hpp"

#include <cmath>
#include <stdexcept>

namespace bmr {

namespace {

Dataset assemble(std::size_t n, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& y) {
  Eigen::MatrixXd X(n, 2);
  X.col(0).setOnes();
  X.col(1) = x;
  return make_dataset(y, std::move(X), {"intercept", "x1"});
}

}  // namespace

Example1Case parse_example1_case(const std::string& name) {
  if (name == "normal") return Example1Case::kNormal;
  if (name == "fisherz") return Example1Case::kFisherZ;
  if (name == "contaminated") return Example1Case::kContaminated;
  throw std::invalid_argument(
      "unknown error case '" + name +
      "' (expected normal, fisherz or contaminated)");
}

Dataset gen_example1(std::size_t n, Example1Case error_case, double beta0,
                     double beta1, Rng& rng) {
  if (n < 2) throw std::invalid_argument("gen_example1: needs n >= 2");
  Eigen::VectorXd x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.normal();
    double e;
    switch (error_case) {
      case Example1Case::kNormal:
        e = rng.normal();
        break;
      case Example1Case::kFisherZ:
        e = 0.5 * std::log(sample_f22(rng));
        break;
      case Example1Case::kContaminated:
        e = rng.uniform() < 0.8 ? 0.5 * rng.normal()
                                : 2.5 + 0.5 * rng.normal();
        break;
      default:
        throw std::logic_error("gen_example1: unreachable");
    }
    y[i] = beta0 + beta1 * x[i] + e;
  }
  return assemble(n, x, y);
}

double example2_error_scale(double alpha, double v) {
  if (!(alpha > 0.0))
    throw std::domain_error("example2_error_scale: alpha must be > 0");
  if (v < 0.0) throw std::domain_error("example2_error_scale: v must be >= 0");
  const double ex = 3.0 / std::sqrt(6.0);
  const double ex2 = 2.5;
  return 1.0 / std::sqrt((1.0 + 2.0 * ex * v + ex2 * v * v) * trigamma(alpha));
}

Dataset gen_example2(std::size_t n, double alpha, double v, double beta0,
                     double beta1, Rng& rng) {
  if (n < 2) throw std::invalid_argument("gen_example2: needs n >= 2");
  const double lambda = example2_error_scale(alpha, v);
  Eigen::VectorXd x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = sample_chisq3_scaled(rng);
    const double z = sample_gamma(rng, alpha, 1.0 / alpha);
    const double e = -lambda * std::log(z);
    y[i] = beta0 + beta1 * x[i] + (1.0 + v * x[i]) * e;
  }
  return assemble(n, x, y);
}

ScenarioSpec ScenarioSpec::example1(std::size_t n, Example1Case error_case,
                                    std::uint64_t seed) {
  ScenarioSpec s;
  s.example = 1;
  s.n = n;
  s.error_case = error_case;
  s.seed = seed;
  return s;
}

ScenarioSpec ScenarioSpec::example2(std::size_t n, double alpha, double v,
                                    std::uint64_t seed) {
  ScenarioSpec s;
  s.example = 2;
  s.n = n;
  s.alpha = alpha;
  s.v = v;
  s.beta0 = 0.0;
  s.beta1 = 1.0;
  s.seed = seed;
  return s;
}

Dataset gen_scenario(const ScenarioSpec& spec) {
  Rng rng(spec.seed);
  if (spec.example == 1)
    return gen_example1(spec.n, spec.error_case, spec.beta0, spec.beta1, rng);
  if (spec.example == 2)
    return gen_example2(spec.n, spec.alpha, spec.v, spec.beta0, spec.beta1,
                        rng);
  throw std::invalid_argument("gen_scenario: example must be 1 or 2");
}

}  // namespace bmr
