#include "bmr/window_rules.hpp"

#include <cmath>
#include <stdexcept>

#include "bmr/special_math.hpp"

namespace bmr {

namespace {

void check_sd(double sd_hat, const char* who) {
  if (!(sd_hat > 0.0))
    throw std::domain_error(std::string(who) + ": sd must be > 0");
}

std::vector<double> scale_basis(const Dataset& data, bool use_raw_y) {
  const Eigen::VectorXd v =
      use_raw_y ? data.y
                : Eigen::VectorXd(data.y - data.X * ols_init(data));
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

double empirical_rule(double sd_hat) {
  check_sd(sd_hat, "empirical_rule");
  return 3.0 * sd_hat;
}

double chebyshev_rule(double sd_hat) {
  check_sd(sd_hat, "chebyshev_rule");
  return 4.0 * sd_hat;
}

double silverman_rule(std::size_t n, double sd_hat, std::optional<double> iqr,
                      std::optional<double> mad) {
  if (n < 2) throw std::domain_error("silverman_rule: needs n >= 2");
  check_sd(sd_hat, "silverman_rule");
  if (!iqr && !mad)
    throw std::invalid_argument("silverman_rule: needs iqr or mad");
  const double robust = mad ? 1.4826 * *mad : *iqr / 1.349;
  return 1.3643 * 1.3510 * std::pow(static_cast<double>(n), -0.2) *
         std::min(sd_hat, robust);
}

double kemp_bandwidth(double k, double mad_of_ols_residuals, std::size_t n) {
  if (n < 2) throw std::domain_error("kemp_bandwidth: needs n >= 2");
  if (!(k > 0.0)) throw std::domain_error("kemp_bandwidth: k must be > 0");
  if (mad_of_ols_residuals < 0.0)
    throw std::domain_error("kemp_bandwidth: mad must be >= 0");
  return k * mad_of_ols_residuals * std::pow(static_cast<double>(n), -0.143);
}

SigmaRule parse_sigma_rule(const std::string& name) {
  if (name == "empirical") return SigmaRule::kEmpirical;
  if (name == "chebyshev") return SigmaRule::kChebyshev;
  if (name == "silverman") return SigmaRule::kSilverman;
  throw std::invalid_argument(
      "unknown sigma rule '" + name +
      "' (expected empirical, chebyshev or silverman)");
}

std::string sigma_rule_name(SigmaRule rule) {
  switch (rule) {
    case SigmaRule::kEmpirical: return "empirical";
    case SigmaRule::kChebyshev: return "chebyshev";
    case SigmaRule::kSilverman: return "silverman";
  }
  return "?";
}

double apply_sigma_rule(SigmaRule rule, const Dataset& data, bool use_raw_y) {
  const RobustScales s = robust_scales(scale_basis(data, use_raw_y));
  switch (rule) {
    case SigmaRule::kEmpirical: return empirical_rule(s.sd);
    case SigmaRule::kChebyshev: return chebyshev_rule(s.sd);
    case SigmaRule::kSilverman:
      return silverman_rule(static_cast<std::size_t>(data.n()), s.sd, s.iqr);
  }
  throw std::logic_error("apply_sigma_rule: unreachable");
}

std::pair<double, double> sigma_prior_interval(const Dataset& data,
                                               SigmaRule rule_low,
                                               SigmaRule rule_high,
                                               bool use_raw_y) {
  if (rule_low == rule_high)
    throw std::invalid_argument(
        "sigma_prior_interval: endpoints need two different rules");
  const double w1 = apply_sigma_rule(rule_low, data, use_raw_y);
  const double w2 = apply_sigma_rule(rule_high, data, use_raw_y);
  if (!(w1 < w2))
    throw std::runtime_error(
        "sigma_prior_interval: " + sigma_rule_name(rule_low) + " (" +
        std::to_string(w1) + ") is not below " + sigma_rule_name(rule_high) +
        " (" + std::to_string(w2) + "); pick a different rule pair");
  return {w1, w2};
}

}  // namespace bmr
