#pragma once

#include <optional>
#include <string>
#include <utility>

#include "bmr/model_core.hpp"

namespace bmr {

// Rules of thumb for the sigma window endpoints, all applied to a scale
// estimate of the regression residuals.

// 3 * sd: about 99.7% of a symmetric distribution.
double empirical_rule(double sd_hat);

// 4 * sd: at least 93.75% of any distribution.
double chebyshev_rule(double sd_hat);

// 1.3643 * 1.3510 * n^(-0.2) * min(sd, iqr/1.349), the uniform-kernel
// plug-in. When mad is supplied, 1.4826*mad replaces iqr/1.349 (the
// outlier-heavy variant). At least one of iqr/mad must be present.
double silverman_rule(std::size_t n, double sd_hat,
                      std::optional<double> iqr,
                      std::optional<double> mad = std::nullopt);

// k * mad * n^(-0.143), the bandwidth of the classical comparison
// estimators (k = 1.6 and k = 0.8 in the study this mirrors); mad is taken
// from OLS residuals.
double kemp_bandwidth(double k, double mad_of_ols_residuals, std::size_t n);

enum class SigmaRule { kEmpirical, kChebyshev, kSilverman };

SigmaRule parse_sigma_rule(const std::string& name);
std::string sigma_rule_name(SigmaRule rule);

// Applies one named rule to the scale of the OLS residuals of `data`
// (or of raw y when use_raw_y is set).
double apply_sigma_rule(SigmaRule rule, const Dataset& data,
                        bool use_raw_y = false);

// Uniform(w1, w2) prior endpoints from two named rules evaluated on the
// OLS residual scale. Throws unless 0 < w1 < w2; the default pairing
// (silverman, chebyshev) gives the widest of the typical intervals.
std::pair<double, double> sigma_prior_interval(
    const Dataset& data, SigmaRule rule_low = SigmaRule::kSilverman,
    SigmaRule rule_high = SigmaRule::kChebyshev, bool use_raw_y = false);

}  // namespace bmr
